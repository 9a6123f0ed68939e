"""Start-location adjustment across the tokenizer boundary.

The localizer predicts in its own fine-grained view; prompts are cut in the
fixer's coarser view.  Residual misplacements (a prediction one token late,
or a cut landing right after a line break that the fixer would rather
generate itself) are correctable by small shifts.  Collection probes each
candidate shift in -3..+3 by actually running the fixer on the shifted
prompt and marking shifts whose reconstruction exact-matches; the label is
the smallest viable magnitude, ties broken toward the negative side.  A
multinomial logistic regression over the embedding window around the
predicted start learns to pick the shift.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import BugFixSample
from .embeddings import EmbeddingConfig
from .errors import (
    CheckpointError,
    ConfigError,
    DegeneratePairError,
    SampleFailedError,
)
from .fixer import FixSettings, GenerationRequest, generate, _sample_seed
from .metrics import exact_match
from .prompts import build_prompt, completion_to_fix, oracle_completion
from .regions import BugRegion, PredictedRegionView, extract_region
from .tokenizers import FIX, LOC, START, TokenizedFunction, tokenize, translate_location

log = logging.getLogger(__name__)

MAX_SHIFT = 3
N_CLASSES = 2 * MAX_SHIFT + 1


@dataclass
class AdjustmentExample:
    sample_id: str
    predicted_start: int  # FIX-token index before adjustment
    viable_shifts: list[int]
    label: int
    feature: np.ndarray | None = None

    def to_record(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "predicted_start": self.predicted_start,
            "viable_shifts": self.viable_shifts,
            "label": self.label,
        }


def _pick_label(viable: list[int]) -> int:
    return sorted(viable, key=lambda s: (abs(s), s))[0]


def shift_feature(
    buggy_fix: TokenizedFunction,
    predicted_start: int,
    provider,
    single_embedding: bool = False,
) -> np.ndarray:
    """Embedding window around the predicted start, flattened.

    The default window spans the predicted position and three neighbors on
    each side (zero-padded at the boundaries); ``single_embedding`` keeps
    only the predicted position's own embedding.
    """
    texts = [t.text for t in buggy_fix.tokens]
    emb = provider.embed(texts).code
    d = emb.shape[1]
    if single_embedding:
        return emb[predicted_start].copy()
    window = np.zeros((N_CLASSES, d), dtype=np.float64)
    for j, pos in enumerate(range(predicted_start - MAX_SHIFT, predicted_start + MAX_SHIFT + 1)):
        if 0 <= pos < len(texts):
            window[j] = emb[pos]
    return window.reshape(-1)


@dataclass
class CollectStats:
    collected: int = 0
    dropped_no_viable: int = 0
    skipped: int = 0


def collect_adjustment_data(
    samples: list[BugFixSample],
    localizer_bundle,
    backend,
    settings: FixSettings,
    single_embedding: bool = False,
) -> tuple[list[AdjustmentExample], CollectStats]:
    """Probe shifted prompts with the fixer and label viable shifts.

    Backend failures for a probe are retried per the fixer policy and then
    recorded as non-viable for that shift.
    """
    from .localizer import localize

    params, provider = localizer_bundle
    stats = CollectStats()
    out: list[AdjustmentExample] = []
    for sample in samples:
        buggy_fix = tokenize(sample.buggy, FIX)
        buggy_loc = tokenize(sample.buggy, LOC)
        try:
            gt = extract_region(buggy_fix, tokenize(sample.fixed, FIX))
        except DegeneratePairError:
            stats.skipped += 1
            continue
        loc = localize(params, provider, buggy_loc, buggy_lines=sample.buggy_lines)
        if loc.region.empty:
            stats.skipped += 1
            continue
        pred_start = translate_location(buggy_loc, buggy_fix, loc.region.start, START)
        n = len(buggy_fix)
        viable: list[int] = []
        for shift in range(-MAX_SHIFT, MAX_SHIFT + 1):
            start = min(max(pred_start + shift, 0), n - 1)
            region = BugRegion(start, n - 1)
            view = PredictedRegionView(buggy_fix, region)
            prompt = build_prompt(settings.style, buggy_fix, view, sample_id=sample.id)
            reference = oracle_completion(gt, region, settings.style)
            request = GenerationRequest(
                prompt_text=prompt.text,
                n=1,
                max_new_tokens=settings.max_new_tokens,
                temperature=settings.temperature,
                stop=prompt.stop_markers,
                seed=_sample_seed(settings, f"{sample.id}@{shift}"),
                reference=reference,
            )
            try:
                completions = generate(backend, request, settings.retries, settings.backoff)
            except SampleFailedError:
                continue
            for comp in completions:
                candidate = completion_to_fix(prompt, comp.text)
                if exact_match(candidate, sample.fixed):
                    viable.append(shift)
                    break
        if not viable:
            stats.dropped_no_viable += 1
            continue
        feature = shift_feature(buggy_fix, pred_start, provider, single_embedding)
        out.append(
            AdjustmentExample(
                sample_id=sample.id,
                predicted_start=pred_start,
                viable_shifts=viable,
                label=_pick_label(viable),
                feature=feature,
            )
        )
        stats.collected += 1
    return out, stats


@dataclass
class AdjusterParams:
    w: np.ndarray  # (7, feature_dim)
    b: np.ndarray  # (7,)
    embedding: EmbeddingConfig
    single_embedding: bool = False

    def clone(self) -> "AdjusterParams":
        import copy

        return copy.deepcopy(self)


def save_adjuster(params: AdjusterParams, path: str | Path) -> None:
    rec = {
        "format_version": 1,
        "kind": "adjuster",
        "max_shift": MAX_SHIFT,
        "single_embedding": params.single_embedding,
        "embedding": params.embedding.as_dict(),
        "weights": {"w": params.w.tolist(), "b": params.b.tolist()},
    }
    Path(path).write_text(json.dumps(rec), encoding="utf-8")


def load_adjuster(path: str | Path) -> AdjusterParams:
    try:
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise CheckpointError(f"adjuster checkpoint not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"adjuster checkpoint is not valid JSON: {path}") from exc
    if rec.get("format_version") != 1 or rec.get("kind") != "adjuster":
        raise CheckpointError(f"unsupported adjuster checkpoint header in {path}")
    return AdjusterParams(
        w=np.array(rec["weights"]["w"], dtype=np.float64),
        b=np.array(rec["weights"]["b"], dtype=np.float64),
        embedding=EmbeddingConfig(**rec["embedding"]),
        single_embedding=rec["single_embedding"],
    )


@dataclass
class AdjusterTrainingConfig:
    lr: float = 1e-2
    epochs: int = 200
    batch_size: int = 64
    patience: int = 25
    holdout: float = 0.1
    seed: int = 0


def train_adjuster(
    examples: list[AdjustmentExample],
    emb_cfg: EmbeddingConfig,
    cfg: AdjusterTrainingConfig,
    single_embedding: bool = False,
) -> tuple[AdjusterParams, dict]:
    """Minibatch Adam on softmax cross-entropy with a 10% holdout."""
    if len(examples) < 50:
        raise ConfigError(
            f"adjuster needs at least 50 examples, got {len(examples)}"
        )
    if any(ex.feature is None for ex in examples):
        raise ConfigError("adjustment examples lack features")
    X = np.stack([ex.feature for ex in examples])
    y = np.array([ex.label + MAX_SHIFT for ex in examples], dtype=np.int64)
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(X))
    n_hold = max(1, int(len(X) * cfg.holdout))
    hold, tr = order[:n_hold], order[n_hold:]
    Xt, yt, Xh, yh = X[tr], y[tr], X[hold], y[hold]

    from .localizer import Adam  # same optimizer family

    dim = X.shape[1]
    params = AdjusterParams(
        w=rng.standard_normal((N_CLASSES, dim)) * (1.0 / np.sqrt(dim)),
        b=np.zeros(N_CLASSES),
        embedding=emb_cfg,
        single_embedding=single_embedding,
    )
    opt = Adam(cfg.lr)
    best = params.clone()
    best_acc = -1.0
    since = 0
    history: dict = {"epochs": [], "diverged": False}

    def logits(w, b, xs):
        return xs @ w.T + b

    for epoch in range(cfg.epochs):
        perm = rng.permutation(len(Xt))
        total = 0.0
        n_batches = 0
        diverged = False
        for lo in range(0, len(perm), cfg.batch_size):
            idx = perm[lo : lo + cfg.batch_size]
            xb, yb = Xt[idx], yt[idx]
            z = logits(params.w, params.b, xb)
            z -= z.max(axis=1, keepdims=True)
            ez = np.exp(z)
            p = ez / ez.sum(axis=1, keepdims=True)
            rows = np.arange(len(xb))
            loss = -np.log(p[rows, yb] + 1e-300).mean()
            if not np.isfinite(loss):
                diverged = True
                break
            g = p
            g[rows, yb] -= 1.0
            g /= len(xb)
            grads = {"w": g.T @ xb, "b": g.sum(axis=0)}
            opt.step({"w": params.w, "b": params.b}, grads)
            total += loss
            n_batches += 1
        if diverged:
            history["diverged"] = True
            break
        val_pred = logits(params.w, params.b, Xh).argmax(axis=1)
        acc = float((val_pred == yh).mean())
        history["epochs"].append(
            {"epoch": epoch, "train_loss": total / max(n_batches, 1), "val_acc": acc}
        )
        if acc > best_acc:
            best_acc = acc
            best = params.clone()
            since = 0
        else:
            since += 1
            if since >= cfg.patience:
                break
    history["best_val_acc"] = best_acc
    return best, history


def adjust(
    buggy_fix: TokenizedFunction,
    predicted_start: int,
    params: AdjusterParams,
    provider,
) -> int:
    """Apply the classifier's shift, clamped to the valid index range."""
    x = shift_feature(buggy_fix, predicted_start, provider, params.single_embedding)
    shift = int(np.argmax(params.w @ x + params.b)) - MAX_SHIFT
    return min(max(predicted_start + shift, 0), len(buggy_fix) - 1)
