"""Command line entry point.

Subcommands cover the whole flow: synthesize or ingest a corpus, split it,
extract oracle regions, train and evaluate the localizer, collect and train
the start adjuster, generate fixes, and score them.  `pipeline` chains the
stages into one run directory.

Exit codes: 0 on success, 2 for configuration or data validation problems,
1 for operational failures such as an unreachable backend.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .adjuster import (
    AdjusterTrainingConfig,
    AdjustmentExample,
    collect_adjustment_data,
    load_adjuster,
    save_adjuster,
    shift_feature,
    train_adjuster,
)
from .corpus import (
    BugFixSample,
    CorpusSplit,
    load_corpus,
    read_jsonl,
    split_corpus,
    write_corpus,
    write_jsonl,
)
from .embeddings import (
    HASHED,
    NONE,
    REMOTE,
    SINUSOIDAL,
    TRAINABLE_TABLE,
    EmbeddingConfig,
    make_provider,
)
from .errors import (
    BackendError,
    CheckpointError,
    ConfigError,
    CorpusSchemaError,
    DegeneratePairError,
    MismatchedSourceError,
    RegionMismatchError,
    RemoteUnavailableError,
    SplitError,
)
from .fixer import (
    EchoOracleBackend,
    FixOutcome,
    FixSettings,
    HttpCompletionBackend,
    NoisyLengthBackend,
    run_fixes,
)
from .localizer import (
    TrainingConfig,
    evaluate_split,
    load_checkpoint,
    prepare_examples,
    provider_for_params,
    save_checkpoint,
    train_localizer,
)
from .metrics import (
    EvalReport,
    check_report_invariants,
    config_fingerprint,
    exact_match,
    localization_accuracies,
    render_report,
    topk_curve,
)
from .regions import BugRegion, extract_region, region_record
from .runconfig import apply_overrides, load_config, write_resolved
from .synthetic import MutationSpec, generate_corpus, preset
from .tokenizers import FIX, LOC, tokenize

PARTS = ["train", "validation", "test"]


def _config(args) -> dict:
    cfg = load_config(getattr(args, "config", None))
    return apply_overrides(cfg, getattr(args, "set", None) or [])


def _ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"ratios must be three comma-separated numbers, got {text!r}")
    try:
        r = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad ratio value in {text!r}") from exc
    return r


_PROVIDER_NAMES = {
    "hashed": HASHED,
    "trainable_table": TRAINABLE_TABLE,
    "remote": REMOTE,
}


def _embedding_config(cfg: dict) -> EmbeddingConfig:
    """Map friendly config values onto the provider constants."""
    ecfg = cfg["embedding"]
    provider = _PROVIDER_NAMES.get(str(ecfg["provider"]).lower())
    if provider is None:
        raise ConfigError(f"unknown embedding provider {ecfg['provider']!r}")
    pos = ecfg.get("positional", True)
    if isinstance(pos, bool):
        positional = SINUSOIDAL if pos else NONE
    else:
        positional = str(pos).upper()
        if positional not in (SINUSOIDAL, NONE):
            raise ConfigError(f"unknown positional encoding {pos!r}")
    if provider == REMOTE and not ecfg.get("endpoint"):
        raise ConfigError("embedding.endpoint is required for the remote provider")
    return EmbeddingConfig(
        provider=provider,
        dim=ecfg["dim"],
        positional=positional,
        seed=ecfg["seed"],
        endpoint=ecfg.get("endpoint"),
    )


def _spec_from_args(args) -> MutationSpec:
    spec = preset(args.preset, seed=args.seed, n_functions=args.n)
    updates = {}
    if args.kind is not None:
        updates["kind"] = args.kind
    if args.comment_fraction is not None:
        updates["comment_fraction"] = args.comment_fraction
    if args.ambiguous_fraction is not None:
        updates["ambiguous_fraction"] = args.ambiguous_fraction
    if updates:
        spec = replace(spec, **updates)
    return spec


def cmd_gen_synthetic(args) -> int:
    spec = _spec_from_args(args)
    samples, records = generate_corpus(spec)
    write_corpus(samples, args.out)
    if args.regions_out:
        write_jsonl(records, args.regions_out)
    print(json.dumps({"samples": len(samples), "out": str(args.out)}))
    return 0


def cmd_ingest(args) -> int:
    samples = load_corpus(args.infile)
    write_corpus(samples, args.out)
    noop = sum(1 for s in samples if s.is_noop)
    print(json.dumps({"samples": len(samples), "noop": noop, "out": str(args.out)}))
    return 0


def cmd_split(args) -> int:
    samples = load_corpus(args.corpus)
    split = split_corpus(samples, _ratios(args.ratios), args.seed)
    split.save(args.out)
    print(
        json.dumps(
            {
                "train": len(split.train),
                "validation": len(split.validation),
                "test": len(split.test),
            }
        )
    )
    return 0


def cmd_oracle(args) -> int:
    samples = load_corpus(args.corpus)
    tokenizers = [FIX, LOC] if args.tokenizer == "both" else [args.tokenizer]
    expand = not args.no_expand_empty
    records = []
    degenerate = 0
    for sample in samples:
        for tok_id in tokenizers:
            try:
                decomp = extract_region(
                    tokenize(sample.buggy, tok_id),
                    tokenize(sample.fixed, tok_id),
                    expand_empty=expand,
                )
            except DegeneratePairError:
                degenerate += 1
                records.append(
                    {"id": sample.id, "tokenizer_id": tok_id, "error": "degenerate"}
                )
                continue
            records.append(region_record(sample.id, decomp))
    write_jsonl(records, args.out)
    print(json.dumps({"records": len(records), "degenerate": degenerate}))
    return 0


def _training_config(cfg: dict) -> TrainingConfig:
    lcfg = cfg["localizer"]
    return TrainingConfig(
        attn_dim=lcfg["attn_dim"],
        batch_size=lcfg["batch_size"],
        lr=lcfg["lr"],
        epochs=lcfg["epochs"],
        patience=lcfg["patience"],
        seed=lcfg["seed"],
        use_line_mask=lcfg["use_line_mask"],
        structural_end_mask=lcfg["structural_end_mask"],
        scale_logits=lcfg["scale_logits"],
    )


def _build_provider(emb_cfg: EmbeddingConfig, examples):
    if emb_cfg.provider == TRAINABLE_TABLE:
        from .embeddings import TableProvider

        texts: set[str] = set()
        for ex in examples:
            texts.update(ex.texts)
        return TableProvider.from_texts(emb_cfg, texts)
    return make_provider(emb_cfg)


def cmd_train_loc(args) -> int:
    cfg = _config(args)
    samples = load_corpus(args.corpus)
    split = CorpusSplit.load(args.split)
    train = prepare_examples(split.subset(samples, "train"))
    val = prepare_examples(split.subset(samples, "validation"))
    emb_cfg = _embedding_config(cfg)
    provider = _build_provider(emb_cfg, train + val)
    params, history = train_localizer(train, val, provider, _training_config(cfg))
    save_checkpoint(params, args.out)
    if args.history:
        Path(args.history).write_text(json.dumps(history, indent=2), encoding="utf-8")
    print(
        json.dumps(
            {
                "best_val_start": history.get("best_val_start"),
                "epochs": len(history.get("epochs", [])),
                "diverged": history.get("diverged", False),
                "out": str(args.out),
            }
        )
    )
    return 0


def cmd_eval_loc(args) -> int:
    samples = load_corpus(args.corpus)
    split = CorpusSplit.load(args.split)
    params = load_checkpoint(args.ckpt)
    provider = provider_for_params(params)
    examples = prepare_examples(split.subset(samples, args.part))
    acc, records = evaluate_split(params, provider, examples, use_line_mask=args.use_line_mask)
    if args.dump:
        write_jsonl(records, args.dump)
    print(json.dumps({"part": args.part, "n": len(examples), **acc.as_dict()}))
    return 0


def _fix_settings(cfg: dict, use_oracle_regions: bool | None = None) -> FixSettings:
    fcfg = cfg["fixer"]
    oracle = fcfg["use_oracle_regions"] if use_oracle_regions is None else use_oracle_regions
    return FixSettings(
        style=fcfg["style"],
        budget=fcfg["budget"],
        max_new_tokens=fcfg["max_new_tokens"],
        temperature=fcfg["temperature"],
        seed=fcfg["seed"],
        retries=fcfg["retries"],
        backoff=fcfg["backoff"],
        use_oracle_regions=oracle,
        use_comment=fcfg["use_comment"],
        max_in_flight=fcfg.get("max_in_flight", 8),
    )


def _make_backend(cfg: dict):
    fcfg = cfg["fixer"]
    name = fcfg["backend"]
    if name == "noisy":
        return NoisyLengthBackend(
            fcfg["eps"], seed=fcfg["seed"], line_start_failure=fcfg["line_start_failure"]
        )
    if name == "oracle":
        return EchoOracleBackend()
    if name == "http":
        if not fcfg.get("endpoint"):
            raise ConfigError("fixer.endpoint is required for the http backend")
        return HttpCompletionBackend(fcfg["endpoint"])
    raise ConfigError(f"unknown fixer backend {name!r}")


def _loc_bundle(ckpt_path):
    params = load_checkpoint(ckpt_path)
    return params, provider_for_params(params)


def _adj_bundle(ckpt_path):
    params = load_adjuster(ckpt_path)
    return params, make_provider(params.embedding)


def cmd_collect_adjust(args) -> int:
    cfg = _config(args)
    samples = load_corpus(args.corpus)
    split = CorpusSplit.load(args.split)
    part = split.subset(samples, args.part)
    if args.limit:
        part = part[: args.limit]
    settings = _fix_settings(cfg)
    backend = _make_backend(cfg)
    bundle = _loc_bundle(args.ckpt)
    single = cfg["adjuster"]["single_embedding"]
    examples, stats = collect_adjustment_data(part, bundle, backend, settings, single)
    write_jsonl([ex.to_record() for ex in examples], args.out)
    print(
        json.dumps(
            {
                "collected": stats.collected,
                "dropped_no_viable": stats.dropped_no_viable,
                "skipped": stats.skipped,
                "out": str(args.out),
            }
        )
    )
    return 0


def cmd_train_adjust(args) -> int:
    cfg = _config(args)
    records = read_jsonl(args.data)
    samples = {s.id: s for s in load_corpus(args.corpus)}
    loc_params = load_checkpoint(args.ckpt)
    provider = provider_for_params(loc_params)
    single = cfg["adjuster"]["single_embedding"]
    examples = []
    for rec in records:
        sample = samples.get(rec["sample_id"])
        if sample is None:
            raise ConfigError(f"adjustment record for unknown sample {rec['sample_id']!r}")
        buggy_fix = tokenize(sample.buggy, FIX)
        feature = shift_feature(buggy_fix, rec["predicted_start"], provider, single)
        examples.append(
            AdjustmentExample(
                sample_id=rec["sample_id"],
                predicted_start=rec["predicted_start"],
                viable_shifts=list(rec["viable_shifts"]),
                label=rec["label"],
                feature=feature,
            )
        )
    acfg = cfg["adjuster"]
    params, history = train_adjuster(
        examples,
        loc_params.embedding,
        AdjusterTrainingConfig(
            lr=acfg["lr"],
            epochs=acfg["epochs"],
            batch_size=acfg["batch_size"],
            patience=acfg["patience"],
            holdout=acfg["holdout"],
            seed=acfg["seed"],
        ),
        single_embedding=single,
    )
    save_adjuster(params, args.out)
    print(
        json.dumps(
            {
                "examples": len(examples),
                "best_val_acc": history.get("best_val_acc"),
                "out": str(args.out),
            }
        )
    )
    return 0


def _outcome_record(outcome: FixOutcome) -> dict:
    region = None
    if outcome.region is not None:
        region = {
            "start": outcome.region.start,
            "end": outcome.region.end,
            "empty": outcome.region.empty,
        }
    return {
        "sample_id": outcome.sample_id,
        "region": region,
        "error": outcome.error,
        "candidates": [c.to_record() for c in outcome.candidates],
    }


def cmd_fix(args) -> int:
    cfg = _config(args)
    samples = load_corpus(args.corpus)
    if args.split:
        split = CorpusSplit.load(args.split)
        samples = split.subset(samples, args.part)
    use_oracle = True if args.use_oracle_regions else None
    settings = _fix_settings(cfg, use_oracle)
    backend = _make_backend(cfg)
    loc_bundle = None
    if not settings.use_oracle_regions:
        if not args.ckpt:
            raise ConfigError("--ckpt is required unless --use-oracle-regions is set")
        loc_bundle = _loc_bundle(args.ckpt)
    adj_bundle = _adj_bundle(args.adj) if args.adj else None
    outcomes = run_fixes(samples, backend, settings, loc_bundle, adj_bundle)
    records = [_outcome_record(outcomes[sid]) for sid in sorted(outcomes)]
    write_jsonl(records, args.out)
    errors = sum(1 for r in records if r["error"])
    print(json.dumps({"samples": len(records), "errors": errors, "out": str(args.out)}))
    return 0


def _evaluate_records(
    samples: dict[str, BugFixSample],
    fix_records: list[dict],
    corpus_id: str,
    cfg: dict,
) -> EvalReport:
    ks = list(cfg["evaluate"]["ks"])
    raw = cfg["evaluate"]["raw"]
    ranked: dict[str, list[str]] = {}
    truths: dict[str, str] = {}
    pairs: list[tuple[BugRegion, BugRegion]] = []
    per_sample = []
    hits = 0
    n = 0
    for rec in sorted(fix_records, key=lambda r: r["sample_id"]):
        sample = samples.get(rec["sample_id"])
        if sample is None:
            raise ConfigError(f"fix record for unknown sample {rec['sample_id']!r}")
        n += 1
        cands = [c["fixed_function"] for c in rec["candidates"]]
        ranked[sample.id] = cands
        truths[sample.id] = sample.fixed
        em = bool(cands) and exact_match(cands[0], sample.fixed, raw=raw)
        hits += em
        first_hit = None
        for c in rec["candidates"]:
            if exact_match(c["fixed_function"], sample.fixed, raw=raw):
                first_hit = c["rank"]
                break
        if rec.get("region"):
            try:
                gt = extract_region(
                    tokenize(sample.buggy, FIX), tokenize(sample.fixed, FIX)
                )
            except DegeneratePairError:
                gt = None
            if gt is not None:
                pred = BugRegion(
                    rec["region"]["start"],
                    rec["region"]["end"],
                    empty=rec["region"]["empty"],
                )
                pairs.append((pred, gt.region))
        per_sample.append(
            {
                "id": sample.id,
                "em": em,
                "error": rec.get("error"),
                "n_candidates": len(cands),
                "first_hit_rank": first_hit,
            }
        )
    report = EvalReport(
        corpus_id=corpus_id,
        n_samples=n,
        em_accuracy=(hits / n) if n else None,
        loc_accuracy=localization_accuracies(pairs) if pairs else None,
        topk=topk_curve(ranked, truths, ks, raw=raw) if ranked else None,
        per_sample=per_sample,
        fingerprint=config_fingerprint(cfg),
    )
    return report


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    samples = {s.id: s for s in load_corpus(args.corpus)}
    fix_records = read_jsonl(args.fixes)
    corpus_id = args.corpus_id or Path(args.corpus).stem
    report = _evaluate_records(samples, fix_records, corpus_id, cfg)
    problems = check_report_invariants(report)
    Path(args.out).write_text(render_report(report, "machine"), encoding="utf-8")
    print(render_report(report, args.format))
    if problems:
        for p in problems:
            print(f"invariant violation: {p}", file=sys.stderr)
        return 2
    return 0


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_resolved(cfg, out / "config.resolved.json")

    ccfg = cfg["corpus"]
    if ccfg.get("path"):
        samples = load_corpus(ccfg["path"])
        corpus_id = Path(ccfg["path"]).stem
    else:
        spec = preset(ccfg["preset"], seed=cfg["seed"], n_functions=ccfg["n_functions"])
        samples, records = generate_corpus(spec)
        write_jsonl(records, out / "regions.jsonl")
        corpus_id = f"synthetic-{ccfg['preset']}-s{cfg['seed']}-n{ccfg['n_functions']}"
    write_corpus(samples, out / "corpus.jsonl")

    split = split_corpus(samples, _ratios_list(cfg["split"]["ratios"]), cfg["split"]["seed"])
    split.save(out / "split.json")

    settings = _fix_settings(cfg)
    backend = _make_backend(cfg)

    loc_bundle = None
    if not settings.use_oracle_regions:
        train = prepare_examples(split.subset(samples, "train"))
        val = prepare_examples(split.subset(samples, "validation"))
        emb_cfg = _embedding_config(cfg)
        provider = _build_provider(emb_cfg, train + val)
        params, history = train_localizer(train, val, provider, _training_config(cfg))
        save_checkpoint(params, out / "localizer.json")
        (out / "history.json").write_text(json.dumps(history, indent=2), encoding="utf-8")
        test_examples = prepare_examples(split.subset(samples, "test"))
        acc, loc_records = evaluate_split(
            params, provider, test_examples, use_line_mask=cfg["localizer"]["use_line_mask"]
        )
        write_jsonl(loc_records, out / "loc_test.jsonl")
        (out / "loc_eval.json").write_text(
            json.dumps({"part": "test", "n": len(test_examples), **acc.as_dict()}, indent=2),
            encoding="utf-8",
        )
        loc_bundle = (params, provider)

    adj_bundle = None
    if cfg["adjuster"]["enabled"]:
        if loc_bundle is None:
            raise ConfigError("the adjuster needs a trained localizer; disable oracle regions")
        acfg = cfg["adjuster"]
        collect_from = split.subset(samples, "train")
        limit = acfg.get("max_collect")
        if limit:
            collect_from = collect_from[:limit]
        examples, stats = collect_adjustment_data(
            collect_from, loc_bundle, backend, settings, acfg["single_embedding"]
        )
        write_jsonl([ex.to_record() for ex in examples], out / "adjust_data.jsonl")
        adj_params, adj_history = train_adjuster(
            examples,
            loc_bundle[0].embedding,
            AdjusterTrainingConfig(
                lr=acfg["lr"],
                epochs=acfg["epochs"],
                batch_size=acfg["batch_size"],
                patience=acfg["patience"],
                holdout=acfg["holdout"],
                seed=acfg["seed"],
            ),
            single_embedding=acfg["single_embedding"],
        )
        save_adjuster(adj_params, out / "adjuster.json")
        adj_bundle = (adj_params, loc_bundle[1])

    test = split.subset(samples, "test")
    outcomes = run_fixes(test, backend, settings, loc_bundle, adj_bundle)
    fix_records = [_outcome_record(outcomes[sid]) for sid in sorted(outcomes)]
    write_jsonl(fix_records, out / "fixes.jsonl")

    report = _evaluate_records({s.id: s for s in samples}, fix_records, corpus_id, cfg)
    problems = check_report_invariants(report)
    (out / "report.json").write_text(render_report(report, "machine"), encoding="utf-8")
    (out / "report.txt").write_text(render_report(report, "table"), encoding="utf-8")
    print(render_report(report, "table"))
    if problems:
        for p in problems:
            print(f"invariant violation: {p}", file=sys.stderr)
        return 2
    return 0


def _ratios_list(ratios) -> tuple[float, float, float]:
    if isinstance(ratios, str):
        return _ratios(ratios)
    if len(ratios) != 3:
        raise ConfigError(f"split.ratios must have three entries, got {ratios!r}")
    return tuple(float(r) for r in ratios)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokrepair",
        description="Token-level bug localization and repair pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY.PATH=VALUE",
            help="override a config value (repeatable)",
        )

    p = sub.add_parser("gen-synthetic", help="generate a synthetic corpus")
    p.add_argument("--preset", default="standard", choices=["standard", "discrepancy"])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", default=None)
    p.add_argument("--comment-fraction", type=float, default=None)
    p.add_argument("--ambiguous-fraction", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--regions-out", default=None)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("ingest", help="validate and normalize a corpus file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="make a train/validation/test split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("oracle", help="extract ground-truth regions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tokenizer", default="both", choices=["both", FIX, LOC])
    p.add_argument("--no-expand-empty", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("train-loc", help="train the localizer")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--history", default=None)
    add_config_args(p)
    p.set_defaults(func=cmd_train_loc)

    p = sub.add_parser("eval-loc", help="evaluate a localizer checkpoint")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--part", default="validation", choices=PARTS)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--use-line-mask", action="store_true")
    p.add_argument("--dump", default=None)
    p.set_defaults(func=cmd_eval_loc)

    p = sub.add_parser("collect-adjust", help="collect shift-adjustment data")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--part", default="train", choices=PARTS)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--out", required=True)
    add_config_args(p)
    p.set_defaults(func=cmd_collect_adjust)

    p = sub.add_parser("train-adjust", help="train the start adjuster")
    p.add_argument("--data", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--ckpt", required=True, help="localizer checkpoint for embeddings")
    p.add_argument("--out", required=True)
    add_config_args(p)
    p.set_defaults(func=cmd_train_adjust)

    p = sub.add_parser("fix", help="generate candidate fixes")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--part", default="test", choices=PARTS)
    p.add_argument("--ckpt", default=None)
    p.add_argument("--adj", default=None)
    p.add_argument("--use-oracle-regions", action="store_true")
    p.add_argument("--out", required=True)
    add_config_args(p)
    p.set_defaults(func=cmd_fix)

    p = sub.add_parser("evaluate", help="score fixes into a report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--fixes", required=True)
    p.add_argument("--corpus-id", default=None)
    p.add_argument("--format", default="table", choices=["table", "machine"])
    p.add_argument("--out", required=True)
    add_config_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="run the whole flow into a directory")
    p.add_argument("--out-dir", required=True)
    add_config_args(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except (
        ConfigError,
        CorpusSchemaError,
        SplitError,
        CheckpointError,
        MismatchedSourceError,
        DegeneratePairError,
        RegionMismatchError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BackendError, RemoteUnavailableError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
