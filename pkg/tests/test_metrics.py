import json

import pytest

from tokrepair.errors import RegionMismatchError
from tokrepair.metrics import (
    EvalReport,
    LocalizationAccuracy,
    check_report_invariants,
    config_fingerprint,
    exact_match,
    localization_accuracies,
    normalize_tokens,
    render_report,
    topk_curve,
)
from tokrepair.regions import BugRegion


def test_exact_match_ignores_spaces_and_tabs():
    assert exact_match("int x=1 ;", "int x = 1;")
    assert exact_match("a\t=  b;", "a = b;")
    # newline is a real token, so line structure is significant
    assert not exact_match("a\n= b;", "a = b;")
    assert not exact_match("int x = 2;", "int x = 1;")
    # identifiers stay whole under the fix view
    assert not exact_match("get Property()", "getProperty()")


def test_exact_match_raw_mode():
    assert not exact_match("int x=1;", "int x = 1;", raw=True)
    assert exact_match("int x = 1;", "int x = 1;", raw=True)


def test_normalize_tokens():
    assert normalize_tokens(" a =\tb ;\n") == ("a", "=", "b", ";", "\n")


def test_localization_accuracies():
    pairs = [
        (BugRegion(2, 4), BugRegion(2, 4)),  # both
        (BugRegion(2, 5), BugRegion(2, 4)),  # start only, covers
        (BugRegion(1, 4), BugRegion(2, 4)),  # end only, covers
        (BugRegion(7, 9), BugRegion(2, 4)),  # neither
    ]
    acc = localization_accuracies(pairs)
    assert acc.start == 0.5
    assert acc.end == 0.5
    assert acc.both == 0.25
    assert acc.partial == 0.75
    assert acc.as_dict() == {"start": 0.5, "end": 0.5, "both": 0.25, "partial": 0.75}


def test_localization_accuracies_tokenizer_guard():
    with pytest.raises(RegionMismatchError):
        localization_accuracies([], pred_tokenizer="LOC", truth_tokenizer="FIX")
    assert localization_accuracies([]).start == 0.0


def test_topk_curve_counts_and_monotonicity():
    ranked = {
        "a": ["wrong()", "int x = 1;", "other()"],
        "b": ["int y = 2;"],
        "c": ["nope()"],
    }
    truths = {"a": "int x=1;", "b": "int y = 2;", "c": "int z = 3;"}
    curve = topk_curve(ranked, truths, [1, 2, 3])
    assert curve == {1: 1, 2: 2, 3: 2}
    ks = sorted(curve)
    assert all(curve[a] <= curve[b] for a, b in zip(ks, ks[1:]))


def test_fingerprint_stable_and_path_free():
    a = {"fixer": {"eps": 0.02, "out_path": "/tmp/x"}, "seed": 1, "path": "/a"}
    b = {"seed": 1, "fixer": {"out_path": "/elsewhere", "eps": 0.02}, "path": "/b"}
    assert config_fingerprint(a) == config_fingerprint(b)
    c = {"fixer": {"eps": 0.03}, "seed": 1}
    assert config_fingerprint(a) != config_fingerprint(c)
    # nested working dirs are ignored too
    d = {"fixer": {"eps": 0.02, "run_dir": "/x"}, "seed": 1}
    e = {"fixer": {"eps": 0.02, "run_dir": "/y"}, "seed": 1}
    assert config_fingerprint(d) == config_fingerprint(e)


def _report(**kw):
    base = dict(
        corpus_id="c",
        n_samples=4,
        em_accuracy=0.5,
        loc_accuracy=LocalizationAccuracy(0.5, 0.5, 0.25, 0.75),
        topk={10: 2, 30: 3},
        fingerprint="abc",
    )
    base.update(kw)
    return EvalReport(**base)


def test_invariants_pass_on_consistent_report():
    assert check_report_invariants(_report()) == []


def test_invariants_catch_violations():
    bad_both = _report(loc_accuracy=LocalizationAccuracy(0.5, 0.5, 0.6, 0.7))
    assert any("both" in p for p in check_report_invariants(bad_both))
    bad_partial = _report(loc_accuracy=LocalizationAccuracy(0.5, 0.5, 0.4, 0.1))
    assert any("partial" in p for p in check_report_invariants(bad_partial))
    bad_topk = _report(topk={10: 3, 30: 2})
    assert any("non-decreasing" in p for p in check_report_invariants(bad_topk))
    too_many = _report(topk={10: 9})
    assert any("exceeds" in p for p in check_report_invariants(too_many))
    bad_em = _report(em_accuracy=1.5)
    assert any("exact-match" in p for p in check_report_invariants(bad_em))


def test_machine_report_is_canonical_json():
    r = _report()
    text = render_report(r, "machine")
    assert text == render_report(r, "machine")  # byte stable
    parsed = json.loads(text)
    assert parsed == r.as_dict() | {"topk": {"10": 2, "30": 3}}
    assert parsed["config_fingerprint"] == "abc"


def test_table_report_rows():
    text = render_report(_report(), "table")
    lines = text.splitlines()
    names = [ln.split()[0] for ln in lines]
    assert names == [
        "corpus", "samples", "exact_match",
        "loc_start", "loc_end", "loc_both", "loc_partial",
        "top_10", "top_30", "fingerprint",
    ]
    assert "0.5000" in text
    with pytest.raises(ValueError):
        render_report(_report(), "yaml")


def test_report_with_nothing_scored():
    r = EvalReport(corpus_id="empty", n_samples=0)
    assert check_report_invariants(r) == []
    table = render_report(r, "table")
    assert "n/a" in table
    machine = json.loads(render_report(r, "machine"))
    assert machine["em_accuracy"] is None
    assert machine["topk"] is None
