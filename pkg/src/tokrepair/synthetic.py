"""Synthetic bug-fix corpus generator.

Produces small Java-like functions (one statement per line) paired with a
single seeded mutation, so every sample has a known changed region, known
changed lines, and an optional hint comment.  Mutations mostly introduce
identifiers, operators, and literals from vocabularies disjoint from the
clean templates; a configurable fraction of renames instead reuses clean
identifiers already present in the function, which keeps perfect
localization impossible and leaves room for line hints to help.

Mutation kinds are named after the fix action: STATEMENT_DELETE means the
fix deletes a junk statement present in the buggy version, STATEMENT_INSERT
means the fix inserts a statement that the buggy version lacks.

Each sample's changed region is recorded through an exhaustive search
(`brute_force_affix`) rather than the library's own region extractor, so
the two can be checked against each other.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .corpus import BugFixSample
from .errors import ConfigError
from .tokenizers import FIX, LOC, tokenize

CLEAN_SUBWORDS = [
    "get", "set", "value", "count", "index", "item", "list", "name", "data",
    "node", "key", "map", "size", "total", "next", "prev", "first", "last",
    "buffer", "cache", "limit", "offset", "input", "output", "result",
    "state", "flag", "code", "text", "line", "word", "base", "step", "mode",
    "rank", "width", "height", "depth", "scale", "shift", "compute",
]

WRONG_SUBWORDS = [
    "zork", "blix", "quux", "fnord", "grue", "snarf", "blorp", "wump",
    "krell", "vex", "glip", "trax",
]

CLEAN_OPS = ["+", "-", "*"]
WRONG_OPS = ["%", "^", "&", "|"]
CLEAN_LITERALS = [str(i) for i in range(10)]
WRONG_LITERALS = ["777", "888", "9991", "31337", "4242"]

IDENT_RENAME = "IDENT_RENAME"
OPERATOR_SWAP = "OPERATOR_SWAP"
CALL_RENAME = "CALL_RENAME"
STATEMENT_DELETE = "STATEMENT_DELETE"
STATEMENT_INSERT = "STATEMENT_INSERT"
LITERAL_CHANGE = "LITERAL_CHANGE"

MUTATION_KINDS = [
    IDENT_RENAME,
    OPERATOR_SWAP,
    CALL_RENAME,
    STATEMENT_DELETE,
    STATEMENT_INSERT,
    LITERAL_CHANGE,
]

DEFAULT_WEIGHTS = {
    IDENT_RENAME: 0.30,
    CALL_RENAME: 0.20,
    STATEMENT_DELETE: 0.15,
    LITERAL_CHANGE: 0.15,
    OPERATOR_SWAP: 0.12,
    STATEMENT_INSERT: 0.08,
}


def brute_force_affix(b: list[str], f: list[str]) -> tuple[int, int]:
    """Exhaustive search for the preserved affix pair.

    Among all (p, s) with b[:p] == f[:p], b[len(b)-s:] == f[len(f)-s:] and
    p + s <= min(len(b), len(f)), returns the pair maximizing p + s, ties
    broken toward larger p.  Quadratic; used as an oracle, not in the
    pipeline.
    """
    nb, nf = len(b), len(f)
    cap = min(nb, nf)
    max_p = 0
    while max_p < cap and b[max_p] == f[max_p]:
        max_p += 1
    best = (-1, -1)  # (p + s, p)
    best_pair = (0, 0)
    for p in range(max_p + 1):
        for s in range(cap - p, -1, -1):
            if b[nb - s :] == f[nf - s :]:
                if (p + s, p) > best:
                    best = (p + s, p)
                    best_pair = (p, s)
                break
    return best_pair


def brute_force_region(b: list[str], f: list[str], expand_empty: bool = True) -> dict:
    """Region record derived from the exhaustive affix search."""
    p, s = brute_force_affix(b, f)
    nb = len(b)
    start, end = p, nb - s - 1
    empty = end < start
    widened = False
    if empty and expand_empty:
        if p < nb:
            s -= 1
        else:
            p -= 1
        start, end = p, nb - s - 1
        widened = True
        empty = False
    return {"p": p, "s": s, "start": start, "end": end, "empty": empty, "widened": widened}


@dataclass
class MutationSpec:
    kind: str | None = None  # None draws from weights
    weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    seed: int = 0
    n_functions: int = 100
    lines_range: tuple[int, int] = (4, 10)
    comment_fraction: float = 0.5
    ambiguous_fraction: float = 0.05

    def __post_init__(self):
        if self.kind is not None and self.kind not in MUTATION_KINDS:
            raise ConfigError(f"unknown mutation kind {self.kind!r}")
        if self.n_functions <= 0:
            raise ConfigError("n_functions must be positive")
        lo, hi = self.lines_range
        if lo < 3 or hi < lo:
            raise ConfigError("lines_range must satisfy 3 <= lo <= hi")
        unknown = set(self.weights) - set(MUTATION_KINDS)
        if unknown:
            raise ConfigError(f"unknown mutation kinds in weights: {sorted(unknown)}")
        if self.kind is None and sum(self.weights.values()) <= 0:
            raise ConfigError("mutation weights must sum to a positive value")


def preset(name: str, seed: int = 0, n_functions: int = 100) -> MutationSpec:
    if name == "standard":
        return MutationSpec(seed=seed, n_functions=n_functions)
    if name == "discrepancy":
        # Skews toward junk statements whose fix region starts right after
        # a line break, the case where shifting the prompt cut helps.
        return MutationSpec(
            seed=seed,
            n_functions=n_functions,
            weights={
                STATEMENT_DELETE: 0.50,
                IDENT_RENAME: 0.25,
                CALL_RENAME: 0.10,
                LITERAL_CHANGE: 0.10,
                OPERATOR_SWAP: 0.05,
                STATEMENT_INSERT: 0.0,
            },
            comment_fraction=0.3,
        )
    raise ConfigError(f"unknown preset {name!r}")


def _cap(s: str) -> str:
    return s[0].upper() + s[1:]


def _camel(parts: list[str]) -> str:
    return parts[0] + "".join(_cap(p) for p in parts[1:])


def _split_camel(name: str) -> list[str]:
    return [p.lower() for p in re.findall(r"[a-z]+|[A-Z][a-z]*", name)]


class _Fn:
    """A clean function plus per-line facts used to target mutations."""

    def __init__(self):
        self.lines: list[str] = []
        self.facts: list[dict] = []  # parallel to lines
        self.vars: list[str] = []
        self.helpers: list[str] = []

    def add(self, text: str, **facts):
        self.lines.append(text)
        base = {"vars": [], "helper": None, "op": None, "literal": None, "removable": False}
        base.update(facts)
        self.facts.append(base)

    def identifiers(self) -> list[str]:
        seen = []
        for name in self.vars + self.helpers:
            if name not in seen:
                seen.append(name)
        return seen


def _new_name(rng: random.Random, used: set[str], n_parts: int) -> str:
    for _ in range(100):
        name = _camel([rng.choice(CLEAN_SUBWORDS) for _ in range(n_parts)])
        if name not in used:
            used.add(name)
            return name
    name = _camel([rng.choice(CLEAN_SUBWORDS) for _ in range(n_parts + 1)])
    used.add(name)
    return name


def _expr(rng: random.Random, avail: list[str]) -> tuple[str, str, str | None]:
    left = rng.choice(avail)
    op = rng.choice(CLEAN_OPS)
    if rng.random() < 0.5:
        lit = rng.choice(CLEAN_LITERALS)
        return f"{left} {op} {lit}", op, lit
    return f"{left} {op} {rng.choice(avail)}", op, None


def _build_function(rng: random.Random, lines_range: tuple[int, int]) -> _Fn:
    fn = _Fn()
    used: set[str] = set()
    fname = _new_name(rng, used, rng.choice([2, 3]))
    p1 = _new_name(rng, used, 1)
    p2 = _new_name(rng, used, rng.choice([1, 2]))
    fn.vars = [p1, p2]
    fn.add(f"public int {fname}(int {p1}, int {p2}) {{")

    n_body = rng.randint(*lines_range)
    v = _new_name(rng, used, rng.choice([1, 2]))
    text, op, lit = _expr(rng, fn.vars)
    fn.add(f"    int {v} = {text};", vars=[v] + _vars_in(text, fn.vars), op=op, literal=lit)
    fn.vars.append(v)

    emitted = 1
    while emitted < n_body:
        roll = rng.random()
        if roll < 0.25 and emitted + 1 < n_body:
            v = _new_name(rng, used, rng.choice([1, 2]))
            text, op, lit = _expr(rng, fn.vars)
            fn.add(f"    int {v} = {text};", vars=[v] + _vars_in(text, fn.vars), op=op, literal=lit)
            fn.vars.append(v)
        elif roll < 0.55:
            v = rng.choice(fn.vars)
            text, op, lit = _expr(rng, fn.vars)
            fn.add(f"    {v} = {text};", vars=[v] + _vars_in(text, fn.vars), op=op, literal=lit, removable=True)
        elif roll < 0.8:
            v = rng.choice(fn.vars)
            helper = _new_name(rng, used, 2)
            fn.helpers.append(helper)
            arg = rng.choice(fn.vars)
            lit = rng.choice(CLEAN_LITERALS)
            fn.add(
                f"    {v} = {helper}({arg}, {lit});",
                vars=[v, arg],
                helper=helper,
                literal=lit,
                removable=True,
            )
        elif emitted + 2 < n_body:
            v = rng.choice(fn.vars)
            lit = rng.choice(CLEAN_LITERALS)
            fn.add(f"    if ({v} > {lit}) {{", vars=[v])
            w = rng.choice(fn.vars)
            text, op, lit2 = _expr(rng, fn.vars)
            fn.add(f"        {w} = {text};", vars=[w] + _vars_in(text, fn.vars), op=op, literal=lit2, removable=True)
            fn.add("    }")
            emitted += 2
        else:
            v = rng.choice(fn.vars)
            text, op, lit = _expr(rng, fn.vars)
            fn.add(f"    {v} = {text};", vars=[v] + _vars_in(text, fn.vars), op=op, literal=lit, removable=True)
        emitted += 1

    fn.add(f"    return {rng.choice(fn.vars)};")
    fn.add("}")
    return fn


def _vars_in(expr_text: str, known: list[str]) -> list[str]:
    words = re.findall(r"[A-Za-z][A-Za-z0-9]*", expr_text)
    return [w for w in words if w in known]


def _replace_ident(line: str, old: str, new: str) -> str:
    return re.sub(rf"\b{re.escape(old)}\b", new, line, count=1)


def _rename(rng: random.Random, name: str, ambiguous_pool: list[str], ambiguous: bool) -> str:
    pool = [x for x in ambiguous_pool if x != name]
    if ambiguous and pool:
        return rng.choice(pool)
    parts = _split_camel(name)
    i = rng.randrange(len(parts))
    wrong = rng.choice(WRONG_SUBWORDS)
    parts[i] = wrong
    return _camel(parts)


def _eligible(fn: _Fn, kind: str) -> list[int]:
    idx = []
    for i, fact in enumerate(fn.facts):
        if i == 0 or fn.lines[i].strip() in ("}",):
            continue
        if kind == IDENT_RENAME and fact["vars"]:
            idx.append(i)
        elif kind == CALL_RENAME and fact["helper"]:
            idx.append(i)
        elif kind == OPERATOR_SWAP and fact["op"]:
            idx.append(i)
        elif kind == LITERAL_CHANGE and fact["literal"]:
            idx.append(i)
        elif kind == STATEMENT_INSERT and fact["removable"]:
            idx.append(i)
    return idx


def _apply_mutation(rng: random.Random, fn: _Fn, kind: str, ambiguous_fraction: float):
    """Returns (buggy_lines_list, changed_line_1based, comment_text) or None."""
    fixed = fn.lines
    if kind == STATEMENT_DELETE:
        # Junk call the fix removes, inserted at a top-level body position.
        spots = [i for i in range(1, len(fixed) - 1) if not fixed[i].startswith("        ")]
        pos = rng.choice(spots)
        junk_name = _camel([rng.choice(WRONG_SUBWORDS), rng.choice(WRONG_SUBWORDS)])
        junk = f"    {junk_name}({rng.choice(fn.vars)});"
        buggy = fixed[:pos] + [junk] + fixed[pos:]
        return buggy, pos + 1, f"remove line {pos + 1}"

    if kind == STATEMENT_INSERT:
        spots = _eligible(fn, kind)
        rng.shuffle(spots)
        for r in spots:
            if fixed[r] != fixed[r - 1] and (r + 1 >= len(fixed) or fixed[r] != fixed[r + 1]):
                buggy = fixed[:r] + fixed[r + 1 :]
                return buggy, r + 1, f"insert a statement before line {r + 1}"
        return None

    spots = _eligible(fn, kind)
    if not spots:
        return None
    i = rng.choice(spots)
    line = fixed[i]
    if kind == OPERATOR_SWAP:
        old = fn.facts[i]["op"]
        new = rng.choice(WRONG_OPS)
        mutated = line.replace(f" {old} ", f" {new} ", 1)
        note = f"change {new} to {old} on line {i + 1}"
    elif kind == LITERAL_CHANGE:
        old = fn.facts[i]["literal"]
        new = rng.choice(WRONG_LITERALS)
        mutated = re.sub(rf"\b{old}\b", new, line, count=1)
        note = f"change {new} to {old} on line {i + 1}"
    else:
        if kind == CALL_RENAME:
            old = fn.facts[i]["helper"]
        else:
            old = rng.choice(fn.facts[i]["vars"])
        ambiguous = rng.random() < ambiguous_fraction
        new = _rename(rng, old, fn.identifiers(), ambiguous)
        mutated = _replace_ident(line, old, new)
        note = f"change {new} to {old} on line {i + 1}"
    if mutated == line:
        return None
    buggy = list(fixed)
    buggy[i] = mutated
    return buggy, i + 1, note


def _draw_kind(rng: random.Random, spec: MutationSpec) -> str:
    if spec.kind is not None:
        return spec.kind
    kinds = list(spec.weights)
    weights = [spec.weights[k] for k in kinds]
    return rng.choices(kinds, weights=weights, k=1)[0]


def generate_corpus(spec: MutationSpec) -> tuple[list[BugFixSample], list[dict]]:
    """Returns samples plus region records for both tokenizers.

    Region records come from `brute_force_region` so they form an
    independent check on the pipeline's own extraction.
    """
    rng = random.Random(spec.seed)
    samples: list[BugFixSample] = []
    records: list[dict] = []
    for i in range(spec.n_functions):
        for _attempt in range(30):
            fn = _build_function(rng, spec.lines_range)
            kind = _draw_kind(rng, spec)
            result = _apply_mutation(rng, fn, kind, spec.ambiguous_fraction)
            if result is None:
                continue
            buggy_lines_list, changed_line, note = result
            buggy = "\n".join(buggy_lines_list) + "\n"
            fixed = "\n".join(fn.lines) + "\n"
            if buggy == fixed:
                continue
            sample = BugFixSample(
                id=f"syn-{spec.seed}-{i:05d}",
                buggy=buggy,
                fixed=fixed,
                comment=note if rng.random() < spec.comment_fraction else None,
                buggy_lines=[changed_line],
                language_tag="java",
            )
            samples.append(sample)
            for tok_id in (LOC, FIX):
                b = tokenize(buggy, tok_id).texts()
                f = tokenize(fixed, tok_id).texts()
                rec = brute_force_region(list(b), list(f))
                rec.update({"id": sample.id, "tokenizer_id": tok_id, "kind": kind})
                records.append(rec)
            break
        else:
            raise ConfigError(f"could not produce a mutation for sample {i}")
    return samples, records
