"""Pure-Python token scanner.

Reference implementation of the span scanner; the compiled module
``tokrepair._scan_c`` mirrors this algorithm exactly.  Character classes:

* ``\\n`` is always a single-character token (line structure matters).
* Other whitespace (space, tab, CR, FF, VT) separates tokens and is dropped.
* Word characters ``[A-Za-z0-9_$]`` form maximal runs.  Mode 0 keeps the
  run whole; mode 1 splits it into camel-case humps, digit runs, and
  single-character ``_`` / ``$`` tokens.
* Every remaining character is a single-character token.

Coverage invariant: every non-whitespace character of the source lies
inside exactly one emitted span.
"""

from __future__ import annotations

MODE_FIX = 0
MODE_LOC = 1

_SKIP = " \t\r\x0b\x0c"


def _is_word(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_" or ch == "$")


def _is_upper(ch: str) -> bool:
    return "A" <= ch <= "Z"


def _is_lower(ch: str) -> bool:
    return "a" <= ch <= "z"


def _is_alpha(ch: str) -> bool:
    return _is_upper(ch) or _is_lower(ch)


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def _split_word(s: str, start: int, end: int, out: list) -> None:
    # Subdivide a word run [start, end) into LOC segments.
    k = start
    while k < end:
        ch = s[k]
        if ch == "_" or ch == "$":
            out.append((k, k + 1))
            k += 1
        elif _is_digit(ch):
            m = k + 1
            while m < end and _is_digit(s[m]):
                m += 1
            out.append((k, m))
            k = m
        else:
            # Letter segment; stop at a camel boundary: before an uppercase
            # that follows a lowercase, or before the last uppercase of an
            # uppercase run that is followed by a lowercase (HTTPServer ->
            # HTTP | Server).
            m = k + 1
            while m < end and _is_alpha(s[m]):
                if _is_upper(s[m]) and (
                    _is_lower(s[m - 1])
                    or (
                        _is_upper(s[m - 1])
                        and m + 1 < end
                        and _is_lower(s[m + 1])
                    )
                ):
                    break
                m += 1
            out.append((k, m))
            k = m


def scan(source: str, mode: int) -> list:
    """Return token spans [(start, end), ...] for *source* under *mode*."""
    out: list = []
    n = len(source)
    i = 0
    while i < n:
        ch = source[i]
        if ch == "\n":
            out.append((i, i + 1))
            i += 1
        elif ch in _SKIP:
            i += 1
        elif _is_word(ch):
            j = i + 1
            while j < n and _is_word(source[j]):
                j += 1
            if mode == MODE_FIX:
                out.append((i, j))
            else:
                _split_word(source, i, j, out)
            i = j
        else:
            out.append((i, i + 1))
            i += 1
    return out
