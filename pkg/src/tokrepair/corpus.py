"""Bug-fix corpus records, JSONL IO, and deterministic splits."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusSchemaError, SplitError

log = logging.getLogger(__name__)


@dataclass
class BugFixSample:
    id: str
    buggy: str
    fixed: str
    comment: str | None = None
    buggy_lines: list[int] | None = None
    language_tag: str | None = None

    @property
    def is_noop(self) -> bool:
        """True when buggy and fixed are the same string (kept but flagged)."""
        return self.buggy == self.fixed

    def to_record(self) -> dict:
        rec = {"id": self.id, "buggy": self.buggy, "fixed": self.fixed}
        if self.comment is not None:
            rec["comment"] = self.comment
        if self.buggy_lines is not None:
            rec["buggy_lines"] = self.buggy_lines
        if self.language_tag is not None:
            rec["language_tag"] = self.language_tag
        return rec


def _check_record(rec: object, lineno: int, errors: list[str]) -> BugFixSample | None:
    if not isinstance(rec, dict):
        errors.append(f"line {lineno}: record is not an object")
        return None
    problems = []
    for key in ("id", "buggy", "fixed"):
        v = rec.get(key)
        if not isinstance(v, str) or not v:
            problems.append(f"missing or empty {key!r}")
    comment = rec.get("comment")
    if comment is not None and not isinstance(comment, str):
        problems.append("comment must be a string")
    buggy_lines = rec.get("buggy_lines")
    if buggy_lines is not None:
        n_lines = rec["buggy"].count("\n") + 1 if isinstance(rec.get("buggy"), str) else 0
        if (
            not isinstance(buggy_lines, list)
            or not all(isinstance(x, int) for x in buggy_lines)
            or any(x < 1 or x > n_lines for x in buggy_lines)
        ):
            problems.append("buggy_lines must be 1-based line numbers within buggy")
    tag = rec.get("language_tag")
    if tag is not None and not isinstance(tag, str):
        problems.append("language_tag must be a string")
    if problems:
        errors.append(f"line {lineno}: " + "; ".join(problems))
        return None
    return BugFixSample(
        id=rec["id"],
        buggy=rec["buggy"],
        fixed=rec["fixed"],
        comment=comment,
        buggy_lines=list(buggy_lines) if buggy_lines is not None else None,
        language_tag=tag,
    )


def load_corpus(path: str | Path) -> list[BugFixSample]:
    """Read a line-delimited UTF-8 corpus; any invalid record is an error."""
    samples: list[BugFixSample] = []
    errors: list[str] = []
    seen_ids: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(f"line {lineno}: invalid JSON ({exc.msg})")
                continue
            sample = _check_record(rec, lineno, errors)
            if sample is None:
                continue
            if sample.id in seen_ids:
                errors.append(
                    f"line {lineno}: duplicate id {sample.id!r} "
                    f"(first seen on line {seen_ids[sample.id]})"
                )
                continue
            seen_ids[sample.id] = lineno
            samples.append(sample)
    if errors:
        raise CorpusSchemaError(
            f"{path}: {len(errors)} invalid record(s):\n" + "\n".join(errors)
        )
    noops = sum(1 for s in samples if s.is_noop)
    if noops:
        log.warning("%s: %d sample(s) have buggy == fixed", path, noops)
    return samples


def write_corpus(samples: list[BugFixSample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_record(), ensure_ascii=False) + "\n")


@dataclass
class CorpusSplit:
    seed: int
    ratios: tuple[float, float, float]
    train: list[str] = field(default_factory=list)
    validation: list[str] = field(default_factory=list)
    test: list[str] = field(default_factory=list)

    def save(self, path: str | Path) -> None:
        rec = {
            "seed": self.seed,
            "ratios": list(self.ratios),
            "train": self.train,
            "validation": self.validation,
            "test": self.test,
        }
        Path(path).write_text(json.dumps(rec, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CorpusSplit":
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            seed=rec["seed"],
            ratios=tuple(rec["ratios"]),
            train=list(rec["train"]),
            validation=list(rec["validation"]),
            test=list(rec["test"]),
        )

    def subset(self, samples: list[BugFixSample], part: str) -> list[BugFixSample]:
        wanted = set(getattr(self, part))
        return [s for s in samples if s.id in wanted]


def split_corpus(
    samples: list[BugFixSample],
    ratios: tuple[float, float, float],
    seed: int,
) -> CorpusSplit:
    """Shuffle ids with the seed and cut floor(n*r1) / floor(n*r2) / rest.

    Pure function of (ids in file order, ratios, seed).
    """
    if not samples:
        raise SplitError("cannot split an empty corpus")
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise SplitError(f"ratios must be three non-negative numbers, got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise SplitError(f"ratios must sum to 1, got {sum(ratios)!r}")
    ids = [s.id for s in samples]
    rng = random.Random(seed)
    rng.shuffle(ids)
    n = len(ids)
    n_train = int(n * ratios[0])
    n_val = int(n * ratios[1])
    return CorpusSplit(
        seed=seed,
        ratios=(ratios[0], ratios[1], ratios[2]),
        train=ids[:n_train],
        validation=ids[n_train : n_train + n_val],
        test=ids[n_train + n_val :],
    )


# Generic JSONL helpers shared by dump files.

def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


def write_jsonl(records: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
