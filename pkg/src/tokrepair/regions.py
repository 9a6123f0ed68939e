"""Maximal-affix region oracle over buggy/fixed token streams.

Given the two token streams of a bug-fix pair, the oracle finds the longest
shared token prefix, then the longest shared suffix that still fits beside
it, and calls everything between them on the buggy side the bug region.
A pure insertion (empty middle) is widened by one anchor token by default
so a non-empty generation target always exists.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegeneratePairError, RegionMismatchError
from .tokenizers import TokenizedFunction


@dataclass(frozen=True)
class BugRegion:
    """Inclusive token span [start, end] on the buggy side.

    An empty region (pure insertion point before ``start``) is encoded as
    end == start - 1.
    """

    start: int
    end: int
    empty: bool = False

    def as_tuple(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class RegionDecomposition:
    """A bug-fix pair split into shared affixes and differing middles.

    ``p`` tokens of shared prefix and ``s`` tokens of shared suffix are
    counted after any widening, so the reassembly identities hold verbatim:
    prefix + buggy_middle + suffix == buggy tokens, and
    prefix + fixed_middle + suffix == fixed tokens.
    """

    buggy: TokenizedFunction
    fixed: TokenizedFunction
    p: int
    s: int
    region: BugRegion
    widened: bool = False

    # Token views ---------------------------------------------------------

    def prefix_tokens(self) -> list[str]:
        return [t.text for t in self.buggy.tokens[: self.p]]

    def buggy_middle_tokens(self) -> list[str]:
        return [t.text for t in self.buggy.tokens[self.p : len(self.buggy) - self.s]]

    def suffix_tokens(self) -> list[str]:
        n = len(self.buggy)
        return [t.text for t in self.buggy.tokens[n - self.s : n]]

    def fixed_middle_tokens(self) -> list[str]:
        return [t.text for t in self.fixed.tokens[self.p : len(self.fixed) - self.s]]

    # Text views (spacing preserved from the owning source) ----------------

    def _buggy_cut_chars(self) -> tuple[int, int]:
        src = self.buggy.source
        toks = self.buggy.tokens
        if self.region.empty:
            at = toks[self.region.start].start if self.region.start < len(toks) else len(src)
            return at, at
        return toks[self.region.start].start, toks[self.region.end].end

    def prefix_text(self) -> str:
        return self.buggy.source[: self._buggy_cut_chars()[0]]

    def suffix_text(self) -> str:
        return self.buggy.source[self._buggy_cut_chars()[1] :]

    def buggy_middle_text(self) -> str:
        a, b = self._buggy_cut_chars()
        return self.buggy.source[a:b]

    def truncated_buggy_text(self) -> str:
        return self.buggy.source[self._buggy_cut_chars()[0] :]

    def _fixed_middle_chars(self) -> tuple[int, int]:
        toks = self.fixed.tokens
        lo, hi = self.p, len(toks) - self.s
        if lo >= hi:
            at = toks[lo].start if lo < len(toks) else len(self.fixed.source)
            return at, at
        return toks[lo].start, toks[hi - 1].end

    def fixed_middle_text(self) -> str:
        a, b = self._fixed_middle_chars()
        return self.fixed.source[a:b]

    def truncated_fixed_text(self) -> str:
        return self.fixed.source[self._fixed_middle_chars()[0] :]


def extract_region(
    buggy: TokenizedFunction,
    fixed: TokenizedFunction,
    expand_empty: bool = True,
) -> RegionDecomposition:
    """Decompose a bug-fix pair around the maximal shared affixes.

    The prefix is maximal; the suffix is then maximal subject to
    p + s <= min(len(buggy), len(fixed)).  With *expand_empty* (default), a
    pure insertion widens to a single anchor token on the buggy side and the
    anchor joins ``fixed_middle``, so the target is never empty.
    """
    if buggy.tokenizer_id != fixed.tokenizer_id:
        raise RegionMismatchError(
            f"tokenizer mismatch: {buggy.tokenizer_id} vs {fixed.tokenizer_id}"
        )
    b = [t.text for t in buggy.tokens]
    f = [t.text for t in fixed.tokens]
    if b == f:
        raise DegeneratePairError("buggy and fixed are token-identical")
    if not b:
        raise DegeneratePairError("buggy function has no tokens")
    nb, nf = len(b), len(f)
    cap = min(nb, nf)

    p = 0
    while p < cap and b[p] == f[p]:
        p += 1
    s = 0
    while s < cap - p and b[nb - 1 - s] == f[nf - 1 - s]:
        s += 1

    widened = False
    if nb - p - s == 0:
        # Pure insertion; widen by one anchor token.
        if not expand_empty:
            return RegionDecomposition(
                buggy, fixed, p, s, BugRegion(p, p - 1, empty=True)
            )
        if p < nb:
            s -= 1  # anchor taken from the suffix side
        else:
            p -= 1  # insertion at end of function; anchor from the prefix
        widened = True

    region = BugRegion(p, nb - s - 1)
    return RegionDecomposition(buggy, fixed, p, s, region, widened)


@dataclass
class PredictedRegionView:
    """Affix view of a buggy function around a predicted region.

    Mirrors the text accessors of RegionDecomposition for prompt building
    when no fixed function is available.
    """

    buggy: TokenizedFunction
    region: BugRegion

    def __post_init__(self) -> None:
        n = len(self.buggy)
        r = self.region
        if r.empty:
            if not 0 <= r.start <= n or r.end != r.start - 1:
                raise RegionMismatchError(f"bad empty region {r} for n={n}")
        elif not (0 <= r.start <= r.end < n):
            raise RegionMismatchError(f"region {r.as_tuple()} out of range for n={n}")

    def _cut_chars(self) -> tuple[int, int]:
        src = self.buggy.source
        toks = self.buggy.tokens
        r = self.region
        if r.empty:
            at = toks[r.start].start if r.start < len(toks) else len(src)
            return at, at
        return toks[r.start].start, toks[r.end].end

    def prefix_text(self) -> str:
        return self.buggy.source[: self._cut_chars()[0]]

    def suffix_text(self) -> str:
        return self.buggy.source[self._cut_chars()[1] :]

    def buggy_middle_text(self) -> str:
        a, b = self._cut_chars()
        return self.buggy.source[a:b]

    def truncated_buggy_text(self) -> str:
        return self.buggy.source[self._cut_chars()[0] :]


_WORD_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$"
)


def glue(left: str, right: str) -> str:
    """Concatenate without fusing two word tokens into one.

    When the junction is word-char against word-char a space goes in
    between.  The shared-affix construction guarantees the genuine fixed
    source separates such neighbors with whitespace, so the inserted space
    reproduces a valid spelling of the same token sequence.
    """
    if left and right and left[-1] in _WORD_CHARS and right[0] in _WORD_CHARS:
        return left + " " + right
    return left + right


def reconstruct_fix(
    decomp: RegionDecomposition | PredictedRegionView,
    generated_middle: str | list[str],
) -> str:
    """Splice a generated middle between the buggy affix texts."""
    middle = (
        " ".join(generated_middle)
        if isinstance(generated_middle, list)
        else generated_middle
    )
    return glue(glue(decomp.prefix_text(), middle), decomp.suffix_text())


# Dump file helpers (one JSON record per line; see corpus module for IO).

def region_record(sample_id: str, decomp: RegionDecomposition) -> dict:
    return {
        "id": sample_id,
        "tokenizer_id": decomp.buggy.tokenizer_id,
        "start": decomp.region.start,
        "end": decomp.region.end,
        "empty": decomp.region.empty,
        "p": decomp.p,
        "s": decomp.s,
    }
