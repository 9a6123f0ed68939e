"""Fix-generation backends and the per-sample repair pipeline.

Backends implement ``generate(request) -> [Completion, ...]``.  Three are
in-process test doubles (a prompt-keyed table, an oracle echo, and an
oracle with i.i.d. per-token corruption whose exact-match rate is
(1 - eps) ** target_length); the fourth speaks the HTTP completion wire
contract.  Oracle-family backends read the reference target that the
pipeline attaches to the request; they exist for tests and desk-scale
experiments and are useless without ground truth.
"""

from __future__ import annotations

import hashlib
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from .corpus import BugFixSample
from .errors import (
    BackendUnavailableError,
    DegeneratePairError,
    MalformedResponseError,
    SampleFailedError,
)
from .metrics import normalize_tokens
from .prompts import SEP, RepairPrompt, build_prompt, completion_to_fix, oracle_completion
from .regions import (
    BugRegion,
    PredictedRegionView,
    extract_region,
    RegionDecomposition,
)
from .tokenizers import END, FIX, LOC, START, tokenize, translate_location

log = logging.getLogger(__name__)


@dataclass
class GenerationRequest:
    prompt_text: str
    n: int
    max_new_tokens: int
    temperature: float
    stop: list[str]
    seed: int | None = None
    # Ground-truth channel for oracle-family test backends; never on the wire.
    reference: str | None = None

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.stop:
            raise ValueError("stop markers must be non-empty")


@dataclass
class Completion:
    text: str
    score: float | None = None


class MockTableBackend:
    """Returns configured completions for exact prompt texts."""

    backend_id = "mock-table"

    def __init__(self, table: dict[str, list[str]]):
        self.table = dict(table)

    def generate(self, request: GenerationRequest) -> list[Completion]:
        return [Completion(t) for t in self.table.get(request.prompt_text, [])]


class EchoOracleBackend:
    """Echoes the reference target; the ideal fixer for round-trip tests."""

    backend_id = "echo-oracle"

    def generate(self, request: GenerationRequest) -> list[Completion]:
        if request.reference is None:
            return []
        return [Completion(request.reference)]


def _derive_rng(seed: int, prompt_text: str, index: int) -> random.Random:
    digest = hashlib.blake2b(
        f"{seed}\x00{index}\x00{prompt_text}".encode("utf-8"), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "little"))


class NoisyLengthBackend:
    """Oracle with i.i.d. per-token corruption at rate ``eps``.

    Longer targets fail more often: P(exact match) = (1 - eps) ** L where L
    is the FIX-token length of the target.  ``line_start_failure`` models a
    failure mode of real fixers: when the text before the generation point
    (the prompt's prefix segment) ends at a line boundary, the generation
    is replaced by a premature close of the method with that probability.
    Defaults keep the backend a clean length-only model.
    """

    backend_id = "noisy-length"

    def __init__(self, eps: float, seed: int = 0, line_start_failure: float = 0.0):
        if not 0.0 <= eps < 1.0:
            raise ValueError("eps must be in [0, 1)")
        self.eps = eps
        self.seed = seed
        self.line_start_failure = line_start_failure

    def _cut_at_line_start(self, prompt_text: str) -> bool:
        segments = prompt_text.split(SEP)
        if len(segments) < 2:
            return False
        prefix = segments[1]
        trimmed = prefix.rstrip(" \t")
        return trimmed.endswith("\n") or trimmed == ""

    def _corrupt(self, target: str, rng: random.Random) -> str:
        tokens = tokenize(target, FIX)
        flips = [i for i in range(len(tokens)) if rng.random() < self.eps]
        if not flips:
            return target
        out = []
        prev = 0
        for i in flips:
            tok = tokens.tokens[i]
            out.append(target[prev : tok.start])
            out.append("__noise__" if tok.text != "__noise__" else "__noise2__")
            prev = tok.end
        out.append(target[prev:])
        return "".join(out)

    def generate(self, request: GenerationRequest) -> list[Completion]:
        if request.reference is None:
            return []
        seed = self.seed if request.seed is None else self.seed ^ request.seed
        fragile = (
            self.line_start_failure > 0.0
            and self._cut_at_line_start(request.prompt_text)
        )
        out = []
        for k in range(request.n):
            rng = _derive_rng(seed, request.prompt_text, k)
            if fragile and rng.random() < self.line_start_failure:
                out.append(Completion("\n}\n"))
                continue
            out.append(Completion(self._corrupt(request.reference, rng)))
        return out


class HttpCompletionBackend:
    """Speaks the completion wire contract.

    POST {endpoint}/v1/complete with {prompt, n, max_tokens, temperature,
    stop, seed?}; expects {choices: [{text, score?}]}.  Connection failures
    and 5xx responses are retryable; any other protocol violation raises
    MalformedResponseError.
    """

    backend_id = "http-completion"

    def __init__(self, endpoint: str, timeout: float = 60.0,
                 session: requests.Session | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.session = session or requests.Session()

    def generate(self, request: GenerationRequest) -> list[Completion]:
        payload = {
            "prompt": request.prompt_text,
            "n": request.n,
            "max_tokens": request.max_new_tokens,
            "temperature": request.temperature,
            "stop": request.stop,
        }
        if request.seed is not None:
            payload["seed"] = request.seed
        try:
            resp = self.session.post(
                self.endpoint + "/v1/complete", json=payload, timeout=self.timeout
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise BackendUnavailableError(f"completion endpoint unreachable: {exc}")
        if resp.status_code >= 500:
            raise BackendUnavailableError(
                f"completion endpoint returned {resp.status_code}"
            )
        if resp.status_code != 200:
            raise MalformedResponseError(
                f"completion endpoint returned {resp.status_code}"
            )
        try:
            body = resp.json()
        except ValueError as exc:
            raise MalformedResponseError(f"completion response is not JSON: {exc}")
        choices = body.get("choices")
        if not isinstance(choices, list):
            raise MalformedResponseError("completion response lacks choices")
        out = []
        for ch in choices:
            if not isinstance(ch, dict) or not isinstance(ch.get("text"), str):
                raise MalformedResponseError("completion choice lacks text")
            score = ch.get("score")
            if score is not None and not isinstance(score, (int, float)):
                raise MalformedResponseError("completion score is not numeric")
            out.append(Completion(ch["text"], float(score) if score is not None else None))
        return out


def generate(
    backend,
    request: GenerationRequest,
    retries: int = 3,
    backoff: float = 0.25,
) -> list[Completion]:
    """Call a backend with retry-on-unavailable and stop-marker truncation."""
    request.validate()
    last: Exception | None = None
    for attempt in range(retries + 1):
        try:
            raw = backend.generate(request)
            break
        except BackendUnavailableError as exc:
            last = exc
            if attempt < retries:
                time.sleep(backoff * (2 ** attempt))
    else:
        raise SampleFailedError(f"backend unavailable after {retries + 1} attempts: {last}")
    out = []
    for comp in raw[: request.n]:
        text = comp.text
        cut = len(text)
        for marker in request.stop:
            idx = text.find(marker)
            if idx != -1 and idx < cut:
                cut = idx
        out.append(Completion(text[:cut], comp.score))
    return out


# Candidate assembly ----------------------------------------------------------

@dataclass
class CandidatePatch:
    sample_id: str
    rank: int
    fixed_function: str
    raw_completion: str
    score: float | None = None
    backend_id: str = ""

    def to_record(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "rank": self.rank,
            "fixed_function": self.fixed_function,
            "raw_completion": self.raw_completion,
            "score": self.score,
            "backend_id": self.backend_id,
        }


def rank_candidates(
    sample_id: str,
    prompt: RepairPrompt,
    completions: list[Completion],
    backend_id: str,
) -> list[CandidatePatch]:
    """Order by score (descending) when present, else generation order;
    dedup on the normalized token sequence keeping the best rank."""
    scored = any(c.score is not None for c in completions)
    order = list(range(len(completions)))
    if scored:
        order.sort(key=lambda i: (-(completions[i].score or 0.0), i))
    seen: set[tuple[str, ...]] = set()
    out = []
    for i in order:
        comp = completions[i]
        fixed = completion_to_fix(prompt, comp.text)
        key = normalize_tokens(fixed)
        if key in seen:
            continue
        seen.add(key)
        out.append(
            CandidatePatch(
                sample_id=sample_id,
                rank=len(out) + 1,
                fixed_function=fixed,
                raw_completion=comp.text,
                score=comp.score,
                backend_id=backend_id,
            )
        )
    return out


def merge_candidate_lists(lists: list[list[CandidatePatch]]) -> list[CandidatePatch]:
    """Concatenate per-config candidate lists, re-rank, and dedup."""
    seen: set[tuple[str, ...]] = set()
    out = []
    for cands in lists:
        for c in cands:
            key = normalize_tokens(c.fixed_function)
            if key in seen:
                continue
            seen.add(key)
            out.append(
                CandidatePatch(
                    sample_id=c.sample_id,
                    rank=len(out) + 1,
                    fixed_function=c.fixed_function,
                    raw_completion=c.raw_completion,
                    score=c.score,
                    backend_id=c.backend_id,
                )
            )
    return out


@dataclass
class FixSettings:
    style: str = "P3"
    budget: int = 1
    max_new_tokens: int = 256
    temperature: float = 0.8
    seed: int = 0
    retries: int = 3
    backoff: float = 0.25
    use_oracle_regions: bool = False
    use_comment: bool = False
    max_in_flight: int = 8


@dataclass
class FixOutcome:
    sample_id: str
    candidates: list[CandidatePatch] = field(default_factory=list)
    region: BugRegion | None = None
    error: str | None = None


def _sample_seed(settings: FixSettings, sample_id: str) -> int:
    digest = hashlib.blake2b(
        f"{settings.seed}\x00{sample_id}".encode("utf-8"), digest_size=4
    ).digest()
    return int.from_bytes(digest, "little")


def fix_sample(
    sample: BugFixSample,
    backend,
    settings: FixSettings,
    localizer_bundle=None,
    adjuster_bundle=None,
) -> FixOutcome:
    """Localize, translate, optionally adjust, prompt, generate, rank.

    ``localizer_bundle`` is (params, provider); ``adjuster_bundle`` is
    (params, provider) from the adjuster module.  With
    ``settings.use_oracle_regions`` the ground-truth decomposition is used
    and no localizer is needed.
    """
    buggy_fix = tokenize(sample.buggy, FIX)
    gt_decomp: RegionDecomposition | None = None
    try:
        gt_decomp = extract_region(buggy_fix, tokenize(sample.fixed, FIX))
    except DegeneratePairError:
        if settings.use_oracle_regions:
            return FixOutcome(sample.id, error="degenerate pair")
        gt_decomp = None

    if settings.use_oracle_regions:
        view: RegionDecomposition | PredictedRegionView = gt_decomp
        region = gt_decomp.region
    else:
        from .localizer import localize  # local import to avoid cycle

        params, provider = localizer_bundle
        buggy_loc = tokenize(sample.buggy, LOC)
        loc = localize(
            params,
            provider,
            buggy_loc,
            buggy_lines=sample.buggy_lines,
            comment=sample.comment if settings.use_comment else None,
        )
        if loc.region.empty:
            start_fix = translate_location(buggy_loc, buggy_fix, loc.region.start, START) \
                if loc.region.start < len(buggy_loc) else len(buggy_fix)
            region = BugRegion(start_fix, start_fix - 1, empty=True)
        else:
            start_fix = translate_location(buggy_loc, buggy_fix, loc.region.start, START)
            end_fix = translate_location(buggy_loc, buggy_fix, loc.region.end, END)
            region = BugRegion(start_fix, max(end_fix, start_fix))
        if adjuster_bundle is not None and not region.empty:
            from .adjuster import adjust

            adj_params, adj_provider = adjuster_bundle
            new_start = adjust(buggy_fix, region.start, adj_params, adj_provider)
            region = BugRegion(new_start, max(region.end, new_start))
        view = PredictedRegionView(buggy_fix, region)

    prompt = build_prompt(
        settings.style,
        buggy_fix,
        view,
        comment=sample.comment if settings.use_comment else None,
        sample_id=sample.id,
    )
    reference = prompt.expected_target
    if reference is None and gt_decomp is not None:
        reference = oracle_completion(gt_decomp, region, settings.style)

    request = GenerationRequest(
        prompt_text=prompt.text,
        n=settings.budget,
        max_new_tokens=settings.max_new_tokens,
        temperature=settings.temperature,
        stop=prompt.stop_markers,
        seed=_sample_seed(settings, sample.id),
        reference=reference,
    )
    try:
        completions = generate(backend, request, settings.retries, settings.backoff)
    except SampleFailedError as exc:
        log.warning("sample %s failed: %s", sample.id, exc)
        return FixOutcome(sample.id, region=region, error=str(exc))
    cands = rank_candidates(sample.id, prompt, completions, backend.backend_id)
    return FixOutcome(sample.id, candidates=cands, region=region)


def run_fixes(
    samples: list[BugFixSample],
    backend,
    settings: FixSettings,
    localizer_bundle=None,
    adjuster_bundle=None,
) -> dict[str, FixOutcome]:
    """Fix samples in parallel with a bounded number of in-flight calls."""
    results: dict[str, FixOutcome] = {}
    with ThreadPoolExecutor(max_workers=max(1, settings.max_in_flight)) as pool:
        futures = {
            pool.submit(
                fix_sample, s, backend, settings, localizer_bundle, adjuster_bundle
            ): s.id
            for s in samples
        }
        for fut, sid in futures.items():
            results[sid] = fut.result()
    return results
