"""Evaluation metrics and report rendering.

Exact match compares candidate and truth as FIX-token text sequences, so
intra-line spacing is ignored while newline structure still counts.  A raw
string mode is available for ablation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import RegionMismatchError
from .regions import BugRegion
from .tokenizers import FIX, tokenize


def normalize_tokens(text: str) -> tuple[str, ...]:
    """FIX-token text sequence; the dedup and exact-match key."""
    return tuple(t.text for t in tokenize(text, FIX).tokens)


def exact_match(candidate: str, truth: str, raw: bool = False) -> bool:
    if raw:
        return candidate == truth
    return normalize_tokens(candidate) == normalize_tokens(truth)


@dataclass(frozen=True)
class LocalizationAccuracy:
    start: float
    end: float
    both: float
    partial: float

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "both": self.both,
            "partial": self.partial,
        }


def localization_accuracies(
    pairs: list[tuple[BugRegion, BugRegion]],
    pred_tokenizer: str | None = None,
    truth_tokenizer: str | None = None,
) -> LocalizationAccuracy:
    """Start/end/both/partial accuracies over (predicted, truth) regions.

    Partial credit means the prediction covers the truth: pred.start <=
    truth.start and pred.end >= truth.end.
    """
    if pred_tokenizer is not None and truth_tokenizer is not None:
        if pred_tokenizer != truth_tokenizer:
            raise RegionMismatchError(
                f"regions live in different tokenizers: "
                f"{pred_tokenizer} vs {truth_tokenizer}"
            )
    if not pairs:
        return LocalizationAccuracy(0.0, 0.0, 0.0, 0.0)
    n = len(pairs)
    hit_s = hit_e = hit_b = hit_p = 0
    for pred, truth in pairs:
        s_ok = pred.start == truth.start
        e_ok = pred.end == truth.end
        hit_s += s_ok
        hit_e += e_ok
        hit_b += s_ok and e_ok
        hit_p += pred.start <= truth.start and pred.end >= truth.end
    return LocalizationAccuracy(hit_s / n, hit_e / n, hit_b / n, hit_p / n)


def topk_curve(
    ranked: dict[str, list[str]],
    truths: dict[str, str],
    ks: list[int],
    raw: bool = False,
) -> dict[int, int]:
    """Bugs fixed within the first K ranked candidates, per K.

    ``ranked`` maps bug id to candidate functions in rank order.
    """
    truth_keys = {
        bug_id: (t if raw else normalize_tokens(t)) for bug_id, t in truths.items()
    }
    counts = {}
    for k in ks:
        hit = 0
        for bug_id, cands in ranked.items():
            key = truth_keys.get(bug_id)
            if key is None:
                continue
            for cand in cands[:k]:
                if (cand if raw else normalize_tokens(cand)) == key:
                    hit += 1
                    break
        counts[k] = hit
    return counts


def config_fingerprint(config: dict) -> str:
    """Stable digest of the behavior-relevant config.

    File paths are dropped so the same experiment fingerprints identically
    wherever its artifacts live.
    """
    def strip(obj):
        if isinstance(obj, dict):
            return {
                k: strip(v)
                for k, v in sorted(obj.items())
                if not (k == "path" or k.endswith("_path") or k.endswith("_dir"))
            }
        if isinstance(obj, list):
            return [strip(v) for v in obj]
        return obj

    canon = json.dumps(strip(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass
class EvalReport:
    corpus_id: str
    n_samples: int
    em_accuracy: float | None = None
    loc_accuracy: LocalizationAccuracy | None = None
    topk: dict[int, int] | None = None
    per_sample: list[dict] = field(default_factory=list)
    fingerprint: str = ""

    def as_dict(self) -> dict:
        return {
            "corpus_id": self.corpus_id,
            "n_samples": self.n_samples,
            "em_accuracy": self.em_accuracy,
            "loc_accuracy": self.loc_accuracy.as_dict() if self.loc_accuracy else None,
            "topk": {str(k): v for k, v in self.topk.items()} if self.topk else None,
            "per_sample": self.per_sample,
            "config_fingerprint": self.fingerprint,
        }


def check_report_invariants(report: EvalReport) -> list[str]:
    """Metric inequalities that must hold; violations are listed."""
    problems = []
    acc = report.loc_accuracy
    if acc is not None:
        if acc.both > min(acc.start, acc.end) + 1e-12:
            problems.append("both-token accuracy exceeds min(start, end)")
        if acc.partial < acc.both - 1e-12:
            problems.append("partial accuracy is below both-token accuracy")
    if report.topk:
        ks = sorted(report.topk)
        counts = [report.topk[k] for k in ks]
        if any(b < a for a, b in zip(counts, counts[1:])):
            problems.append("top-K counts are not non-decreasing in K")
        if any(c > report.n_samples for c in counts):
            problems.append("top-K count exceeds sample count")
    if report.em_accuracy is not None and not 0.0 <= report.em_accuracy <= 1.0:
        problems.append("exact-match accuracy outside [0, 1]")
    return problems


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def render_report(report: EvalReport, fmt: str = "machine") -> str:
    """machine: canonical JSON.  table: aligned text, one row per metric."""
    if fmt == "machine":
        return json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")
    rows = [
        ("corpus", report.corpus_id),
        ("samples", str(report.n_samples)),
        ("exact_match", _fmt(report.em_accuracy)),
    ]
    acc = report.loc_accuracy
    for name in ("start", "end", "both", "partial"):
        rows.append(
            (f"loc_{name}", _fmt(getattr(acc, name) if acc else None))
        )
    if report.topk:
        for k in sorted(report.topk):
            rows.append((f"top_{k}", str(report.topk[k])))
    rows.append(("fingerprint", report.fingerprint or "n/a"))
    width = max(len(name) for name, _ in rows)
    lines = [f"{name.ljust(width)}  {value}" for name, value in rows]
    return "\n".join(lines) + "\n"
