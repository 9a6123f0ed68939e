"""Dual rule-based tokenizers over function source text.

Two views of the same source are used throughout the pipeline:

* ``LOC``: the localization view.  Splits on whitespace, punctuation and
  operator boundaries, camel-case humps, underscores, and digit runs, so
  identifiers break into sub-tokens (``getProperty`` -> ``get``,
  ``Property``).
* ``FIX``: the fix-generation view.  Splits on whitespace and punctuation
  only; identifiers stay whole.

Newline is a token under both views; other whitespace never is.  Tokens are
offset-preserving character spans, so locations can be translated between
the two views through the source string.

The span scanner has a compiled implementation selected at import time;
set ``TOKREPAIR_PURE_PY=1`` to force the pure-Python fallback.
"""

from __future__ import annotations

import bisect
import json
import os
from dataclasses import dataclass, field

from .errors import MismatchedSourceError

LOC = "LOC"
FIX = "FIX"

if os.environ.get("TOKREPAIR_PURE_PY") == "1":
    from . import _scan_py as _scan

    SCAN_BACKEND = "python"
else:
    try:
        from . import _scan_c as _scan  # type: ignore[no-redef]

        SCAN_BACKEND = "compiled"
    except ImportError:
        from . import _scan_py as _scan  # type: ignore[no-redef]

        SCAN_BACKEND = "python"

_MODES = {FIX: 0, LOC: 1}


@dataclass(frozen=True)
class Token:
    """One token: its text and half-open character span in the source."""

    text: str
    start: int
    end: int


@dataclass
class TokenizedFunction:
    """A source string with its token stream under one tokenizer."""

    source: str
    tokenizer_id: str
    tokens: list[Token]
    _starts: list[int] = field(repr=False, default_factory=list)
    _lines: list[int] = field(repr=False, default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def line_of(self, index: int) -> int:
        """1-based line number of the token's first character."""
        return self._lines[index]

    def token_at_char(self, offset: int) -> int:
        """Index of the token whose span contains character *offset*."""
        i = bisect.bisect_right(self._starts, offset) - 1
        if i >= 0 and self.tokens[i].start <= offset < self.tokens[i].end:
            return i
        raise ValueError(f"no token covers character offset {offset}")


def tokenize(source: str, tokenizer_id: str) -> TokenizedFunction:
    if tokenizer_id not in _MODES:
        raise ValueError(f"unknown tokenizer_id {tokenizer_id!r}")
    spans = _scan.scan(source, _MODES[tokenizer_id])
    tokens = [Token(source[a:b], a, b) for a, b in spans]
    starts = [a for a, _ in spans]
    # Line numbers via a single pass over newline positions.
    lines = []
    line = 1
    prev = 0
    for a, _ in spans:
        line += source.count("\n", prev, a)
        lines.append(line)
        prev = a
    return TokenizedFunction(source, tokenizer_id, tokens, starts, lines)


START = "START"
END = "END"


def translate_location(
    src: TokenizedFunction, dst: TokenizedFunction, index: int, side: str
) -> int:
    """Map a token index from one view to the other via character offsets.

    START maps through the token's first character, END through its last,
    so a location landing mid-token in the destination view widens to that
    whole destination token.
    """
    if src.source != dst.source:
        raise MismatchedSourceError(
            "token streams come from different source strings"
        )
    if not 0 <= index < len(src):
        raise IndexError(f"token index {index} out of range")
    if side == START:
        offset = src.tokens[index].start
    elif side == END:
        offset = src.tokens[index].end - 1
    else:
        raise ValueError(f"side must be START or END, got {side!r}")
    return dst.token_at_char(offset)


def dump_tokens(tf: TokenizedFunction) -> str:
    """Debug text format: one token per line (index, start, end, text)."""
    lines = [
        f"{i}\t{t.start}\t{t.end}\t{json.dumps(t.text)}"
        for i, t in enumerate(tf.tokens)
    ]
    return "\n".join(lines) + ("\n" if lines else "")
