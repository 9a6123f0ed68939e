"""Tests for generation backends, candidate ranking, and the repair loop."""

import math

import pytest

from tokrepair.corpus import BugFixSample
from tokrepair.embeddings import EmbeddingConfig, HASHED, HashedProvider
from tokrepair.errors import (
    BackendUnavailableError,
    MalformedResponseError,
    SampleFailedError,
)
from tokrepair.fixer import (
    CandidatePatch,
    Completion,
    EchoOracleBackend,
    FixSettings,
    GenerationRequest,
    HttpCompletionBackend,
    MockTableBackend,
    NoisyLengthBackend,
    _derive_rng,
    _sample_seed,
    fix_sample,
    generate,
    merge_candidate_lists,
    rank_candidates,
    run_fixes,
)
from tokrepair.localizer import TrainingConfig, prepare_examples, train_localizer
from tokrepair.metrics import exact_match
from tokrepair.prompts import EOT, SEP, STYLES, build_prompt
from tokrepair.synthetic import MutationSpec, generate_corpus
from tokrepair.testing import MockSidecar
from tokrepair.tokenizers import FIX, tokenize


def _request(prompt_text="p", n=1, reference=None, seed=None, stop=None):
    return GenerationRequest(
        prompt_text=prompt_text,
        n=n,
        max_new_tokens=64,
        temperature=0.5,
        stop=stop or [SEP, EOT],
        seed=seed,
        reference=reference,
    )


# Backends --------------------------------------------------------------------

def test_mock_table_backend():
    backend = MockTableBackend({"p": ["fix one", "fix two"]})
    assert [c.text for c in backend.generate(_request("p"))] == ["fix one", "fix two"]
    assert backend.generate(_request("unknown")) == []


def test_echo_oracle_backend():
    backend = EchoOracleBackend()
    assert backend.generate(_request(reference="the fix"))[0].text == "the fix"
    assert backend.generate(_request(reference=None)) == []


def test_noisy_backend_zero_eps_is_exact():
    backend = NoisyLengthBackend(eps=0.0, seed=1)
    out = backend.generate(_request(n=3, reference="a = b + 1;\n"))
    assert [c.text for c in out] == ["a = b + 1;\n"] * 3


def test_noisy_backend_deterministic_per_seed():
    backend = NoisyLengthBackend(eps=0.5, seed=1)
    req = _request(n=4, reference="total = total + step;\n", seed=9)
    a = [c.text for c in backend.generate(req)]
    b = [c.text for c in backend.generate(req)]
    assert a == b
    c = [x.text for x in backend.generate(_request(n=4, reference=req.reference, seed=10))]
    assert a != c


def test_noisy_backend_match_rate_tracks_length():
    # P(exact) = (1 - eps)^L with L the FIX token count of the target
    target = "x = y + z;\n"
    L = len(tokenize(target, FIX))
    eps = 0.1
    n = 2000
    backend = NoisyLengthBackend(eps=eps, seed=3)
    out = backend.generate(_request(n=n, reference=target, seed=0))
    hits = sum(1 for c in out if c.text == target)
    p = (1.0 - eps) ** L
    se = math.sqrt(p * (1.0 - p) / n)
    assert abs(hits / n - p) <= 3.0 * se


def test_noisy_backend_line_start_failure():
    fragile = f"bug body{SEP}int a = 1;\n"  # prefix segment ends at a line break
    sturdy = f"bug body{SEP}int a = "
    backend = NoisyLengthBackend(eps=0.0, seed=0, line_start_failure=1.0)
    out = backend.generate(_request(fragile, n=3, reference="x;\n"))
    assert [c.text for c in out] == ["\n}\n"] * 3
    out = backend.generate(_request(sturdy, n=3, reference="x;\n"))
    assert [c.text for c in out] == ["x;\n"] * 3


def test_noisy_backend_validates_eps():
    with pytest.raises(ValueError):
        NoisyLengthBackend(eps=1.0)
    with pytest.raises(ValueError):
        NoisyLengthBackend(eps=-0.1)


def test_derive_rng_stable():
    assert _derive_rng(1, "p", 0).random() == _derive_rng(1, "p", 0).random()
    assert _derive_rng(1, "p", 0).random() != _derive_rng(1, "p", 1).random()


# generate() wrapper ----------------------------------------------------------

class FlakyBackend:
    backend_id = "flaky"

    def __init__(self, failures: int, text: str = "ok"):
        self.failures = failures
        self.calls = 0
        self.text = text

    def generate(self, request: GenerationRequest) -> list[Completion]:
        self.calls += 1
        if self.calls <= self.failures:
            raise BackendUnavailableError("down")
        return [Completion(self.text) for _ in range(request.n)]


def test_generate_truncates_at_earliest_stop():
    backend = MockTableBackend({"p": [f"good part{EOT}tail{SEP}more"]})
    out = generate(backend, _request("p"))
    assert out[0].text == "good part"


def test_generate_caps_at_requested_n():
    backend = MockTableBackend({"p": ["a", "b", "c"]})
    assert len(generate(backend, _request("p", n=2))) == 2


def test_generate_retries_then_succeeds():
    backend = FlakyBackend(failures=2)
    out = generate(backend, _request("p"), retries=2, backoff=0.0)
    assert out[0].text == "ok"
    assert backend.calls == 3


def test_generate_gives_up_after_retries():
    backend = FlakyBackend(failures=10)
    with pytest.raises(SampleFailedError):
        generate(backend, _request("p"), retries=1, backoff=0.0)
    assert backend.calls == 2


def test_generate_validates_request():
    backend = MockTableBackend({})
    with pytest.raises(ValueError):
        generate(backend, _request("p", n=0))
    bad = _request("p")
    bad.stop = []
    with pytest.raises(ValueError):
        generate(backend, bad)


# HTTP backend ----------------------------------------------------------------

def test_http_backend_round_trip():
    table = {"the prompt": ["a = 1;", "a = 2;"]}
    with MockSidecar(completion_table=table) as sidecar:
        backend = HttpCompletionBackend(sidecar.endpoint)
        out = backend.generate(_request("the prompt", n=2))
        assert [c.text for c in out] == ["a = 1;", "a = 2;"]
        assert all(c.score is not None for c in out)


def test_http_backend_retries_5xx_via_generate():
    with MockSidecar(completion_table={"p": ["ok"]}, fail_first=2) as sidecar:
        backend = HttpCompletionBackend(sidecar.endpoint)
        with pytest.raises(BackendUnavailableError):
            backend.generate(_request("p"))
        out = generate(backend, _request("p"), retries=2, backoff=0.0)
        assert out[0].text == "ok"
        assert sidecar.requests_seen == 3


def test_http_backend_malformed_body_is_not_retried():
    with MockSidecar(malformed=True) as sidecar:
        backend = HttpCompletionBackend(sidecar.endpoint)
        with pytest.raises(MalformedResponseError):
            generate(backend, _request("p"), retries=3, backoff=0.0)
        assert sidecar.requests_seen == 1


def test_http_backend_4xx_is_malformed():
    with MockSidecar() as sidecar:
        backend = HttpCompletionBackend(sidecar.endpoint + "/bogus")
        with pytest.raises(MalformedResponseError):
            backend.generate(_request("p"))


def test_http_backend_connection_refused():
    sidecar = MockSidecar().start()
    endpoint = sidecar.endpoint
    sidecar.stop()
    backend = HttpCompletionBackend(endpoint)
    with pytest.raises(BackendUnavailableError):
        backend.generate(_request("p"))


# Ranking ---------------------------------------------------------------------

def _p1_prompt():
    sample = BugFixSample(id="s", buggy="a = 1;\n", fixed="a = 2;\n")
    return build_prompt("P1", tokenize(sample.buggy, FIX), sample_id="s")


def test_rank_candidates_orders_by_score():
    prompt = _p1_prompt()
    comps = [
        Completion("a = 1;\n", score=0.2),
        Completion("a = 2;\n", score=0.9),
        Completion("a = 3;\n", score=0.5),
    ]
    cands = rank_candidates("s", prompt, comps, "b")
    assert [c.fixed_function for c in cands] == ["a = 2;\n", "a = 3;\n", "a = 1;\n"]
    assert [c.rank for c in cands] == [1, 2, 3]
    assert cands[0].backend_id == "b"


def test_rank_candidates_dedups_on_tokens():
    prompt = _p1_prompt()
    comps = [
        Completion("a = 2;\n", score=0.9),
        Completion("a  =  2;\n", score=0.8),  # same token sequence
        Completion("a = 3;\n", score=0.1),
    ]
    cands = rank_candidates("s", prompt, comps, "b")
    assert len(cands) == 2
    assert cands[0].raw_completion == "a = 2;\n"
    assert [c.rank for c in cands] == [1, 2]


def test_rank_candidates_without_scores_keeps_order():
    prompt = _p1_prompt()
    comps = [Completion("a = 9;\n"), Completion("a = 8;\n")]
    cands = rank_candidates("s", prompt, comps, "b")
    assert [c.fixed_function for c in cands] == ["a = 9;\n", "a = 8;\n"]


def test_merge_candidate_lists_dedups_and_reranks():
    def patch(text, rank):
        return CandidatePatch("s", rank, text, text, None, "b")

    merged = merge_candidate_lists([
        [patch("a = 1;\n", 1), patch("a = 2;\n", 2)],
        [patch("a  =  1;\n", 1), patch("a = 3;\n", 2)],
    ])
    assert [c.fixed_function for c in merged] == ["a = 1;\n", "a = 2;\n", "a = 3;\n"]
    assert [c.rank for c in merged] == [1, 2, 3]


# End-to-end sample repair ------------------------------------------------------

def test_sample_seed_stable():
    s = FixSettings(seed=5)
    assert _sample_seed(s, "a") == _sample_seed(s, "a")
    assert _sample_seed(s, "a") != _sample_seed(s, "b")
    assert _sample_seed(FixSettings(seed=6), "a") != _sample_seed(s, "a")


@pytest.mark.parametrize("style", sorted(STYLES))
def test_fix_sample_oracle_regions_all_styles(style):
    samples, _ = generate_corpus(MutationSpec(seed=21, n_functions=6))
    backend = EchoOracleBackend()
    settings = FixSettings(style=style, use_oracle_regions=True)
    for sample in samples:
        outcome = fix_sample(sample, backend, settings)
        assert outcome.error is None
        assert outcome.region is not None
        assert exact_match(outcome.candidates[0].fixed_function, sample.fixed)


def test_fix_sample_degenerate_pair_reports_error():
    noop = BugFixSample(id="n", buggy="a = 1;\n", fixed="a  =  1;\n")
    outcome = fix_sample(noop, EchoOracleBackend(), FixSettings(use_oracle_regions=True))
    assert outcome.error == "degenerate pair"
    assert outcome.candidates == []


def test_fix_sample_predicted_region_path():
    buggy = "value = config.getVeryOldPropertyName(key);\n"
    fixed = "value = config.fetch(key);\n"
    sample = BugFixSample(id="w", buggy=buggy, fixed=fixed)
    examples = prepare_examples([sample])
    cfg = EmbeddingConfig(provider=HASHED, dim=32, positional="SINUSOIDAL", seed=0)
    provider = HashedProvider(cfg)
    params, _ = train_localizer(
        examples, examples, provider,
        TrainingConfig(attn_dim=16, batch_size=4, lr=5e-2, epochs=40, patience=40, seed=0),
    )
    outcome = fix_sample(sample, EchoOracleBackend(), FixSettings(style="P3"),
                         localizer_bundle=(params, provider))
    assert outcome.error is None
    assert outcome.region.as_tuple() == (4, 4)  # LOC (4, 8) translated to FIX
    assert exact_match(outcome.candidates[0].fixed_function, fixed)


def test_fix_sample_backend_failure_is_reported():
    samples, _ = generate_corpus(MutationSpec(seed=22, n_functions=1))
    backend = FlakyBackend(failures=10)
    settings = FixSettings(use_oracle_regions=True, retries=0, backoff=0.0)
    outcome = fix_sample(samples[0], backend, settings)
    assert outcome.error is not None
    assert outcome.candidates == []
    assert outcome.region is not None


def test_run_fixes_parallel_and_deterministic():
    samples, _ = generate_corpus(MutationSpec(seed=23, n_functions=16))
    backend = NoisyLengthBackend(eps=0.15, seed=2)
    settings = FixSettings(style="P3", budget=3, use_oracle_regions=True,
                           max_in_flight=8)
    first = run_fixes(samples, backend, settings)
    second = run_fixes(samples, backend, settings)
    assert set(first) == {s.id for s in samples}
    for sid in first:
        a = [c.fixed_function for c in first[sid].candidates]
        b = [c.fixed_function for c in second[sid].candidates]
        assert a == b
