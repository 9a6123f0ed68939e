"""Tests for the synthetic corpus generator and its brute-force oracle."""

import re

import pytest

from tokrepair.errors import ConfigError
from tokrepair.regions import extract_region
from tokrepair.synthetic import (
    CLEAN_LITERALS,
    CLEAN_OPS,
    CLEAN_SUBWORDS,
    DEFAULT_WEIGHTS,
    MUTATION_KINDS,
    STATEMENT_DELETE,
    STATEMENT_INSERT,
    WRONG_LITERALS,
    WRONG_OPS,
    WRONG_SUBWORDS,
    MutationSpec,
    brute_force_affix,
    brute_force_region,
    generate_corpus,
    preset,
)
from tokrepair.tokenizers import FIX, LOC, START, tokenize, translate_location


def test_brute_force_affix_hand_cases():
    assert brute_force_affix(list("xyz"), list("xqz")) == (1, 1)
    assert brute_force_affix(["a", "b"], ["a", "b", "c"]) == (2, 0)
    assert brute_force_affix(["q", "a", "b"], ["a", "b"]) == (0, 2)
    # budget p + s <= min(|b|, |f|); ties resolved toward the longer prefix
    assert brute_force_affix(["a", "b", "a"], ["a"]) == (1, 0)
    assert brute_force_affix(["a"], ["a", "b", "a"]) == (1, 0)


def test_brute_force_region_widening():
    rec = brute_force_region(["a", "b"], ["a", "x", "b"])
    assert rec["widened"] and not rec["empty"]
    assert (rec["start"], rec["end"]) == (1, 1)
    rec = brute_force_region(["a", "b"], ["a", "x", "b"], expand_empty=False)
    assert rec["empty"] and rec["end"] == rec["start"] - 1


def test_vocabularies_disjoint():
    assert not set(CLEAN_SUBWORDS) & set(WRONG_SUBWORDS)
    assert not set(CLEAN_OPS) & set(WRONG_OPS)
    assert not set(CLEAN_LITERALS) & set(WRONG_LITERALS)
    assert abs(sum(DEFAULT_WEIGHTS.values()) - 1.0) < 1e-9
    assert set(DEFAULT_WEIGHTS) == set(MUTATION_KINDS)


def test_recorded_regions_match_extractor():
    samples, records = generate_corpus(MutationSpec(seed=41, n_functions=50))
    by_key = {(r["id"], r["tokenizer_id"]): r for r in records}
    for s in samples:
        for tok_id in (LOC, FIX):
            rec = by_key[(s.id, tok_id)]
            d = extract_region(tokenize(s.buggy, tok_id), tokenize(s.fixed, tok_id))
            assert (rec["start"], rec["end"]) == d.region.as_tuple(), (s.id, tok_id)
            assert (rec["p"], rec["s"]) == (d.p, d.s)
            assert rec["widened"] == d.widened
        # the two views must agree through index translation
        b_loc = tokenize(s.buggy, LOC)
        b_fix = tokenize(s.buggy, FIX)
        loc_rec = by_key[(s.id, LOC)]
        fix_rec = by_key[(s.id, FIX)]
        translated = translate_location(b_loc, b_fix, loc_rec["start"], START)
        assert translated == fix_rec["start"]


def test_generation_is_deterministic():
    a_samples, a_records = generate_corpus(MutationSpec(seed=42, n_functions=20))
    b_samples, b_records = generate_corpus(MutationSpec(seed=42, n_functions=20))
    assert a_samples == b_samples
    assert a_records == b_records
    c_samples, _ = generate_corpus(MutationSpec(seed=43, n_functions=20))
    assert a_samples != c_samples


def test_sample_shape_and_hints():
    spec = MutationSpec(seed=44, n_functions=40, lines_range=(4, 8))
    samples, _ = generate_corpus(spec)
    assert len(samples) == 40
    for s in samples:
        assert s.id.startswith("syn-44-")
        assert s.language_tag == "java"
        assert s.buggy.endswith("\n") and s.fixed.endswith("\n")
        assert len(s.buggy_lines) == 1
        n_lines = s.buggy.count("\n")
        assert 1 <= s.buggy_lines[0] <= n_lines
        if s.comment is not None:
            assert re.fullmatch(
                r"remove line \d+"
                r"|insert a statement before line \d+"
                r"|change \S+ to \S+ on line \d+",
                s.comment,
            ), s.comment


def test_hint_line_covers_the_buggy_region():
    samples, records = generate_corpus(MutationSpec(seed=45, n_functions=40))
    regions = {r["id"]: r for r in records if r["tokenizer_id"] == LOC}
    for s in samples:
        b = tokenize(s.buggy, LOC)
        rec = regions[s.id]
        lines = {b.line_of(i) for i in range(rec["start"], rec["end"] + 1)}
        assert s.buggy_lines[0] in lines, s.id


def test_forced_kind_applies_everywhere():
    spec = MutationSpec(kind="OPERATOR_SWAP", seed=46, n_functions=15)
    samples, records = generate_corpus(spec)
    assert all(r["kind"] == "OPERATOR_SWAP" for r in records)
    for s in samples:
        assert any(f" {op} " in s.buggy for op in WRONG_OPS)
        assert not any(f" {op} " in s.fixed for op in WRONG_OPS)


def test_clean_sources_avoid_wrong_vocab():
    samples, _ = generate_corpus(MutationSpec(seed=47, n_functions=30))
    for s in samples:
        fixed_tokens = set(tokenize(s.fixed, LOC).texts())
        assert not fixed_tokens & set(WRONG_SUBWORDS)
        assert not fixed_tokens & set(WRONG_OPS)
        assert not fixed_tokens & set(WRONG_LITERALS)


def test_ambiguous_renames_reuse_existing_names():
    clean = MutationSpec(kind="IDENT_RENAME", seed=48, n_functions=25,
                         ambiguous_fraction=0.0)
    for s in generate_corpus(clean)[0]:
        # camel-joined parts are capitalized, so compare casefolded
        buggy_tokens = {t.lower() for t in tokenize(s.buggy, LOC).texts()}
        assert buggy_tokens & set(WRONG_SUBWORDS), s.id

    tricky = MutationSpec(kind="IDENT_RENAME", seed=48, n_functions=25,
                          ambiguous_fraction=1.0)
    for s in generate_corpus(tricky)[0]:
        buggy_tokens = {t.lower() for t in tokenize(s.buggy, LOC).texts()}
        assert not buggy_tokens & set(WRONG_SUBWORDS), s.id


def test_presets():
    std = preset("standard", seed=1, n_functions=5)
    assert std.weights == DEFAULT_WEIGHTS and std.n_functions == 5
    disc = preset("discrepancy", seed=1, n_functions=5)
    assert disc.weights[STATEMENT_DELETE] == 0.50
    assert disc.weights[STATEMENT_INSERT] == 0.0
    assert disc.comment_fraction == 0.3
    with pytest.raises(ConfigError):
        preset("adversarial")


def test_discrepancy_corpus_is_delete_heavy():
    samples, records = generate_corpus(preset("discrepancy", seed=49, n_functions=60))
    kinds = [r["kind"] for r in records if r["tokenizer_id"] == FIX]
    assert kinds.count(STATEMENT_DELETE) >= 20
    assert STATEMENT_INSERT not in kinds


def test_spec_validation():
    with pytest.raises(ConfigError):
        MutationSpec(kind="TYPO")
    with pytest.raises(ConfigError):
        MutationSpec(n_functions=0)
    with pytest.raises(ConfigError):
        MutationSpec(lines_range=(2, 5))
    with pytest.raises(ConfigError):
        MutationSpec(lines_range=(6, 4))
    with pytest.raises(ConfigError):
        MutationSpec(weights={"TYPO": 1.0})
    with pytest.raises(ConfigError):
        MutationSpec(weights={k: 0.0 for k in MUTATION_KINDS})


def test_statement_mutations_change_line_count():
    dels, _ = generate_corpus(MutationSpec(kind=STATEMENT_DELETE, seed=50, n_functions=10))
    for s in dels:
        assert s.buggy.count("\n") == s.fixed.count("\n") + 1
    ins, _ = generate_corpus(MutationSpec(kind=STATEMENT_INSERT, seed=51, n_functions=10))
    for s in ins:
        assert s.buggy.count("\n") == s.fixed.count("\n") - 1
