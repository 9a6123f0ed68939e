"""Token-granularity bug localization head.

Two attention stages over token embeddings score where a bug starts and
ends.  A query vector (a learned classification embedding for the start
stage, the start token's embedding for the end stage) is projected by W_q,
every candidate token by W_k, and the dot products are softmaxed into a
distribution over code tokens:

    start: a_i = softmax_i((W_q_pre @ e_cls) . (W_k_pre @ e_i))
    end:   a_i = softmax_i((W_q_suf @ e_start) . (W_k_suf @ e_i))

Training teacher-forces the end stage with the ground-truth start token;
inference is free-running.  Dot products are unscaled by default, with a
config flag for 1/sqrt(d_a) scaling.  The end stage structurally masks
positions before start - 1, so an empty-region prediction (end == start-1)
stays expressible.  Context enters in two ways: buggy-line hints become a
candidate mask, and reviewer comments are embedded as extra positions that
are never candidates themselves.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import BugFixSample
from .embeddings import (
    TRAINABLE_TABLE,
    EmbeddingConfig,
    TableProvider,
    make_provider,
)
from .errors import (
    CheckpointError,
    DegeneratePairError,
    DivergenceError,
    MaskEmptyError,
)
from .metrics import LocalizationAccuracy, localization_accuracies
from .regions import BugRegion, extract_region
from .tokenizers import LOC, TokenizedFunction, tokenize

log = logging.getLogger(__name__)

NEG_INF = -1e30


@dataclass
class LocalizerParams:
    w_q_pre: np.ndarray
    w_k_pre: np.ndarray
    w_q_suf: np.ndarray
    w_k_suf: np.ndarray
    e_cls: np.ndarray
    embedding: EmbeddingConfig
    structural_end_mask: bool = True
    scale_logits: bool = False
    table_vocab: list[str] | None = None
    table: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.w_q_pre.shape[1]

    @property
    def attn_dim(self) -> int:
        return self.w_q_pre.shape[0]

    def weight_dict(self) -> dict[str, np.ndarray]:
        w = {
            "w_q_pre": self.w_q_pre,
            "w_k_pre": self.w_k_pre,
            "w_q_suf": self.w_q_suf,
            "w_k_suf": self.w_k_suf,
            "e_cls": self.e_cls,
        }
        if self.table is not None:
            w["table"] = self.table
        return w

    def clone(self) -> "LocalizerParams":
        return copy.deepcopy(self)


def init_params(
    emb_cfg: EmbeddingConfig,
    attn_dim: int,
    seed: int,
    structural_end_mask: bool = True,
    scale_logits: bool = False,
    table_vocab: list[str] | None = None,
) -> LocalizerParams:
    rng = np.random.default_rng(seed)
    d = emb_cfg.dim
    scale = 1.0 / np.sqrt(d)

    def mat() -> np.ndarray:
        return rng.standard_normal((attn_dim, d)) * scale

    table = None
    if table_vocab is not None:
        from .embeddings import hashed_vector

        table = np.stack([hashed_vector(t, emb_cfg.seed, d) for t in table_vocab])
    return LocalizerParams(
        w_q_pre=mat(),
        w_k_pre=mat(),
        w_q_suf=mat(),
        w_k_suf=mat(),
        e_cls=rng.standard_normal(d) * scale,
        embedding=emb_cfg,
        structural_end_mask=structural_end_mask,
        scale_logits=scale_logits,
        table_vocab=list(table_vocab) if table_vocab else None,
        table=table,
    )


# Checkpoint IO --------------------------------------------------------------

def save_checkpoint(params: LocalizerParams, path: str | Path) -> None:
    rec = {
        "format_version": 1,
        "kind": "localizer",
        "dim": params.dim,
        "attn_dim": params.attn_dim,
        "embedding": params.embedding.as_dict(),
        "options": {
            "structural_end_mask": params.structural_end_mask,
            "scale_logits": params.scale_logits,
        },
        "weights": {
            "w_q_pre": params.w_q_pre.tolist(),
            "w_k_pre": params.w_k_pre.tolist(),
            "w_q_suf": params.w_q_suf.tolist(),
            "w_k_suf": params.w_k_suf.tolist(),
            "e_cls": params.e_cls.tolist(),
        },
        "table": (
            {"vocab": params.table_vocab, "rows": params.table.tolist()}
            if params.table is not None
            else None
        ),
    }
    Path(path).write_text(json.dumps(rec), encoding="utf-8")


def load_checkpoint(path: str | Path) -> LocalizerParams:
    try:
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise CheckpointError(f"checkpoint not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"checkpoint is not valid JSON: {path}") from exc
    if rec.get("format_version") != 1 or rec.get("kind") != "localizer":
        raise CheckpointError(f"unsupported checkpoint header in {path}")
    w = rec["weights"]
    table = rec.get("table")
    return LocalizerParams(
        w_q_pre=np.array(w["w_q_pre"], dtype=np.float64),
        w_k_pre=np.array(w["w_k_pre"], dtype=np.float64),
        w_q_suf=np.array(w["w_q_suf"], dtype=np.float64),
        w_k_suf=np.array(w["w_k_suf"], dtype=np.float64),
        e_cls=np.array(w["e_cls"], dtype=np.float64),
        embedding=EmbeddingConfig(**rec["embedding"]),
        structural_end_mask=rec["options"]["structural_end_mask"],
        scale_logits=rec["options"]["scale_logits"],
        table_vocab=table["vocab"] if table else None,
        table=np.array(table["rows"], dtype=np.float64) if table else None,
    )


# Forward / backward core ----------------------------------------------------

def _masked_log_softmax(z: np.ndarray, allow: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (probs, logprobs) with disallowed entries at exactly zero."""
    z = np.where(allow, z, NEG_INF)
    m = z.max(axis=-1, keepdims=True)
    ez = np.exp(z - m)
    ez = np.where(allow, ez, 0.0)
    total = ez.sum(axis=-1, keepdims=True)
    probs = ez / total
    logp = (z - m) - np.log(total)
    return probs, logp


def _structural_end_allow(n_max: int, starts: np.ndarray) -> np.ndarray:
    idx = np.arange(n_max)[None, :]
    return idx >= (starts[:, None] - 1)


@dataclass
class Batch:
    """Padded training batch. ``allow`` already folds in padding validity."""

    emb: np.ndarray  # (B, N, d)
    allow: np.ndarray  # (B, N) candidate mask for the start stage
    gt_start: np.ndarray  # (B,)
    gt_end: np.ndarray  # (B,)
    rows: np.ndarray | None = None  # (B, N) table row per position, -1 pad
    cls: np.ndarray | None = None  # (B, d) remote cls vectors, else None


def loss_and_grads(params: LocalizerParams, batch: Batch) -> tuple[float, dict]:
    """Mean summed cross-entropy of both stages, with analytic gradients."""
    E = batch.emb
    B, N, d = E.shape
    da = params.attn_dim
    inv_scale = 1.0 / np.sqrt(da) if params.scale_logits else 1.0

    cls = batch.cls if batch.cls is not None else np.broadcast_to(params.e_cls, (B, d))

    # Start stage.
    q_pre = cls @ params.w_q_pre.T  # (B, da)
    k_pre = E @ params.w_k_pre.T  # (B, N, da)
    z_pre = np.einsum("bna,ba->bn", k_pre, q_pre) * inv_scale
    p_pre, lp_pre = _masked_log_softmax(z_pre, batch.allow)

    # End stage, teacher-forced on the ground-truth start.
    rows_b = np.arange(B)
    q_tok = E[rows_b, batch.gt_start]  # (B, d)
    q_suf = q_tok @ params.w_q_suf.T  # (B, da)
    k_suf = E @ params.w_k_suf.T
    z_suf = np.einsum("bna,ba->bn", k_suf, q_suf) * inv_scale
    allow_suf = batch.allow
    if params.structural_end_mask:
        allow_suf = allow_suf & _structural_end_allow(N, batch.gt_start)
    p_suf, lp_suf = _masked_log_softmax(z_suf, allow_suf)

    loss = -(lp_pre[rows_b, batch.gt_start].mean() + lp_suf[rows_b, batch.gt_end].mean())

    # Backward.  g = (p - onehot)/B, scaled by the logit scale factor.
    g_pre = p_pre.copy()
    g_pre[rows_b, batch.gt_start] -= 1.0
    g_pre *= inv_scale / B
    g_suf = p_suf.copy()
    g_suf[rows_b, batch.gt_end] -= 1.0
    g_suf *= inv_scale / B

    dq_pre = np.einsum("bn,bna->ba", g_pre, k_pre)  # (B, da)
    d_w_q_pre = dq_pre.T @ np.asarray(cls)
    d_e_cls = (
        dq_pre.sum(axis=0) @ params.w_q_pre
        if batch.cls is None
        else np.zeros_like(params.e_cls)
    )
    d_w_k_pre = np.einsum(
        "ba,bnd->ad", q_pre, g_pre[:, :, None] * E
    )

    dq_suf = np.einsum("bn,bna->ba", g_suf, k_suf)
    d_w_q_suf = dq_suf.T @ q_tok
    dk_suf = g_suf[:, :, None] * q_suf[:, None, :]  # (B, N, da)
    d_w_k_suf = np.einsum("bna,bnd->ad", dk_suf, E)

    grads = {
        "w_q_pre": d_w_q_pre,
        "w_k_pre": d_w_k_pre,
        "w_q_suf": d_w_q_suf,
        "w_k_suf": d_w_k_suf,
        "e_cls": d_e_cls,
    }

    if params.table is not None and batch.rows is not None:
        # Gradients reach embeddings through both key projections and the
        # teacher-forced query row.
        dE = g_pre[:, :, None] * (params.w_k_pre.T @ q_pre.T).T[:, None, :]
        dE += dk_suf @ params.w_k_suf
        dQ = dq_suf @ params.w_q_suf  # (B, d)
        dE[rows_b, batch.gt_start] += dQ
        d_table = np.zeros_like(params.table)
        flat_rows = batch.rows.reshape(-1)
        ok = flat_rows >= 0
        np.add.at(d_table, flat_rows[ok], dE.reshape(-1, d)[ok])
        grads["table"] = d_table

    return float(loss), grads


def start_distribution(
    params: LocalizerParams,
    emb: np.ndarray,
    allow: np.ndarray | None = None,
    cls: np.ndarray | None = None,
) -> np.ndarray:
    n = emb.shape[0]
    if allow is None:
        allow = np.ones(n, dtype=bool)
    if not allow.any():
        raise MaskEmptyError("context mask excludes every candidate")
    cls_vec = cls if cls is not None else params.e_cls
    q = params.w_q_pre @ cls_vec
    z = (emb @ params.w_k_pre.T) @ q
    if params.scale_logits:
        z = z / np.sqrt(params.attn_dim)
    probs, _ = _masked_log_softmax(z[None, :], allow[None, :])
    return probs[0]


def end_distribution(
    params: LocalizerParams,
    emb: np.ndarray,
    query_index: int,
    allow: np.ndarray | None = None,
) -> np.ndarray:
    n = emb.shape[0]
    if allow is None:
        allow = np.ones(n, dtype=bool)
    if params.structural_end_mask:
        allow = allow & (np.arange(n) >= query_index - 1)
    if not allow.any():
        raise MaskEmptyError("end-stage mask excludes every candidate")
    q = params.w_q_suf @ emb[query_index]
    z = (emb @ params.w_k_suf.T) @ q
    if params.scale_logits:
        z = z / np.sqrt(params.attn_dim)
    probs, _ = _masked_log_softmax(z[None, :], allow[None, :])
    return probs[0]


@dataclass
class LocalizeResult:
    region: BugRegion
    start_probs: np.ndarray
    end_probs: np.ndarray

    def top_candidates(self, k: int = 5) -> dict:
        def top(probs: np.ndarray) -> list[list]:
            order = np.argsort(-probs, kind="stable")[:k]
            return [[int(i), float(probs[i])] for i in order]

        return {"start": top(self.start_probs), "end": top(self.end_probs)}


def line_mask(tf: TokenizedFunction, lines: list[int]) -> np.ndarray:
    wanted = set(lines)
    return np.fromiter(
        (tf.line_of(i) in wanted for i in range(len(tf))), dtype=bool, count=len(tf)
    )


def localize(
    params: LocalizerParams,
    provider,
    buggy: TokenizedFunction,
    buggy_lines: list[int] | None = None,
    comment: str | None = None,
) -> LocalizeResult:
    """Free-running prediction: start first, then end queried by the start.

    Comment tokens are appended as embedding context only; candidate
    indices always stay within the code tokens.
    """
    context_texts = None
    if comment:
        context_texts = [t.text for t in tokenize(comment, LOC).tokens]
    res = provider.embed([t.text for t in buggy.tokens], context_texts)
    emb = res.code
    allow = None
    if buggy_lines is not None:
        allow = line_mask(buggy, buggy_lines)
        if not allow.any():
            raise MaskEmptyError(f"buggy_lines {buggy_lines} cover no tokens")
    sp = start_distribution(params, emb, allow, cls=res.cls)
    start = int(np.argmax(sp))
    ep = end_distribution(params, emb, start, allow)
    end = int(np.argmax(ep))
    region = BugRegion(start, end, empty=end < start)
    return LocalizeResult(region, sp, ep)


# Training -------------------------------------------------------------------

@dataclass
class LabeledExample:
    sample_id: str
    texts: list[str]
    start: int
    end: int
    token_lines: list[int]
    buggy_lines: list[int] | None = None
    comment: str | None = None


def prepare_examples(samples: list[BugFixSample]) -> list[LabeledExample]:
    """Tokenize under LOC and label with the oracle region."""
    out = []
    skipped = 0
    for s in samples:
        b = tokenize(s.buggy, LOC)
        f = tokenize(s.fixed, LOC)
        try:
            decomp = extract_region(b, f)
        except DegeneratePairError:
            skipped += 1
            continue
        out.append(
            LabeledExample(
                sample_id=s.id,
                texts=[t.text for t in b.tokens],
                start=decomp.region.start,
                end=decomp.region.end,
                token_lines=[b.line_of(i) for i in range(len(b))],
                buggy_lines=s.buggy_lines,
                comment=s.comment,
            )
        )
    if skipped:
        log.warning("skipped %d degenerate pair(s) during labeling", skipped)
    return out


@dataclass
class TrainingConfig:
    attn_dim: int = 128
    batch_size: int = 32
    lr: float = 1e-3
    epochs: int = 30
    patience: int = 5
    seed: int = 0
    use_line_mask: bool = False
    structural_end_mask: bool = True
    scale_logits: bool = False

    def as_dict(self) -> dict:
        return {
            "attn_dim": self.attn_dim,
            "batch_size": self.batch_size,
            "lr": self.lr,
            "epochs": self.epochs,
            "patience": self.patience,
            "seed": self.seed,
            "use_line_mask": self.use_line_mask,
            "structural_end_mask": self.structural_end_mask,
            "scale_logits": self.scale_logits,
        }


class Adam:
    """Adaptive-moment optimizer over a dict of arrays."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, weights: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            w = weights[name]
            m = self.m.setdefault(name, np.zeros_like(w))
            v = self.v.setdefault(name, np.zeros_like(w))
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            w -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


def _make_batch(
    examples: list[LabeledExample],
    provider,
    cfg: TrainingConfig,
) -> Batch:
    B = len(examples)
    n_max = max(len(ex.texts) for ex in examples)
    d = provider.cfg.dim
    emb = np.zeros((B, n_max, d), dtype=np.float64)
    allow = np.zeros((B, n_max), dtype=bool)
    gs = np.zeros(B, dtype=np.int64)
    ge = np.zeros(B, dtype=np.int64)
    is_table = isinstance(provider, TableProvider)
    rows = np.full((B, n_max), -1, dtype=np.int64) if is_table else None
    cls_rows: list[np.ndarray] | None = None
    for b, ex in enumerate(examples):
        n = len(ex.texts)
        res = provider.embed(ex.texts)
        emb[b, :n] = res.code
        allow[b, :n] = True
        if res.cls is not None:
            if cls_rows is None:
                cls_rows = [np.zeros(d) for _ in range(B)]
            cls_rows[b] = res.cls
        if cfg.use_line_mask and ex.buggy_lines:
            mask = np.fromiter(
                (ln in set(ex.buggy_lines) for ln in ex.token_lines),
                dtype=bool,
                count=n,
            )
            # The mask must keep the labels reachable; otherwise skip it.
            if mask.any() and mask[ex.start] and mask[ex.end]:
                allow[b, :n] = mask
        gs[b] = ex.start
        ge[b] = ex.end
        if is_table:
            rows[b, :n] = provider.rows(ex.texts)
    cls = np.stack(cls_rows) if cls_rows is not None else None
    return Batch(emb, allow, gs, ge, rows=rows, cls=cls)


def evaluate_split(
    params: LocalizerParams,
    provider,
    examples: list[LabeledExample],
    use_line_mask: bool = False,
) -> tuple[LocalizationAccuracy, list[dict]]:
    """Free-running accuracy over a split, plus prediction dump records."""
    pairs = []
    records = []
    for ex in examples:
        buggy_lines = ex.buggy_lines if use_line_mask else None
        res = provider.embed(ex.texts)
        allow = None
        if buggy_lines:
            wanted = set(buggy_lines)
            allow = np.fromiter(
                (ln in wanted for ln in ex.token_lines), dtype=bool,
                count=len(ex.texts),
            )
            if not allow.any():
                allow = None
        sp = start_distribution(params, res.code, allow, cls=res.cls)
        start = int(np.argmax(sp))
        epr = end_distribution(params, res.code, start, allow)
        end = int(np.argmax(epr))
        pred = BugRegion(start, end, empty=end < start)
        truth = BugRegion(ex.start, ex.end)
        pairs.append((pred, truth))
        top = LocalizeResult(pred, sp, epr).top_candidates()
        records.append(
            {
                "id": ex.sample_id,
                "start": start,
                "end": end,
                "truth_start": ex.start,
                "truth_end": ex.end,
                "top_start": top["start"],
                "top_end": top["end"],
            }
        )
    return localization_accuracies(pairs), records


def train_localizer(
    train: list[LabeledExample],
    val: list[LabeledExample],
    provider,
    cfg: TrainingConfig,
) -> tuple[LocalizerParams, dict]:
    """Adam on the summed two-stage cross-entropy with early stopping.

    Keeps the checkpoint with the best validation start accuracy; stops
    after ``patience`` epochs without improvement.  A non-finite loss stops
    training immediately and the best finite checkpoint is returned.
    """
    if not train:
        raise ValueError("empty training set")
    table_vocab = None
    if isinstance(provider, TableProvider):
        table_vocab = provider.vocab
    params = init_params(
        provider.cfg,
        cfg.attn_dim,
        cfg.seed,
        structural_end_mask=cfg.structural_end_mask,
        scale_logits=cfg.scale_logits,
        table_vocab=table_vocab,
    )
    if params.table is not None:
        provider.table = params.table  # train the live table in place
    opt = Adam(cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    order = np.arange(len(train))
    best = params.clone()
    best_acc = -1.0
    since_best = 0
    history: dict = {"epochs": [], "diverged": False}

    for epoch in range(cfg.epochs):
        rng.shuffle(order)
        total = 0.0
        n_batches = 0
        diverged = False
        for lo in range(0, len(order), cfg.batch_size):
            chunk = [train[i] for i in order[lo : lo + cfg.batch_size]]
            batch = _make_batch(chunk, provider, cfg)
            loss, grads = loss_and_grads(params, batch)
            if not np.isfinite(loss):
                diverged = True
                break
            weights = params.weight_dict()
            opt.step(weights, grads)
            total += loss
            n_batches += 1
        if diverged:
            history["diverged"] = True
            log.warning("training diverged at epoch %d; keeping best checkpoint", epoch)
            break
        acc, _ = evaluate_split(params, provider, val, use_line_mask=cfg.use_line_mask)
        history["epochs"].append(
            {
                "epoch": epoch,
                "train_loss": total / max(n_batches, 1),
                "val_start": acc.start,
                "val_end": acc.end,
                "val_both": acc.both,
            }
        )
        log.info(
            "epoch %d loss %.4f val start %.4f end %.4f both %.4f",
            epoch, total / max(n_batches, 1), acc.start, acc.end, acc.both,
        )
        if acc.start > best_acc:
            best_acc = acc.start
            best = params.clone()
            since_best = 0
        else:
            since_best += 1
            if since_best >= cfg.patience:
                break
    history["best_val_start"] = best_acc
    if best.table is not None and isinstance(provider, TableProvider):
        provider.table = best.table
    return best, history


def provider_for_params(params: LocalizerParams, **kwargs):
    """Rebuild the matching embedding provider for a loaded checkpoint."""
    if params.embedding.provider == TRAINABLE_TABLE:
        return TableProvider(params.embedding, vocab=params.table_vocab, table=params.table)
    return make_provider(params.embedding, **kwargs)
