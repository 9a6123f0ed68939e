"""Repair prompt construction and fix reconstruction.

Four styles over a buggy function and a region decomposition:

* P1: the full buggy function; the model rewrites the whole function.
* P2: buggy function ++ SEP ++ shared prefix; target is the truncated fix.
* P3: truncated bug (region start to end of function) ++ SEP ++ shared
  prefix; same target as P2.
* P4: buggy middle ++ SEP ++ shared prefix ++ SEP ++ shared suffix; target
  is only the fixed middle.

A reviewer comment, when given, is appended after a comment marker.
Completions are cut at the earliest stop marker before reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RegionMismatchError
from .regions import BugRegion, PredictedRegionView, RegionDecomposition, glue
from .tokenizers import TokenizedFunction

SEP = "\n<sep>\n"
COMMENT_MARK = "\n<comment>\n"
EOT = "<|endoftext|>"

STYLES = ("P1", "P2", "P3", "P4")


@dataclass
class RepairPrompt:
    style: str
    text: str
    stop_markers: list[str]
    reconstruction: RegionDecomposition | PredictedRegionView | None
    expected_target: str | None = None
    sample_id: str | None = None
    comment: str | None = None


def build_prompt(
    style: str,
    buggy: TokenizedFunction,
    decomp: RegionDecomposition | PredictedRegionView | None = None,
    comment: str | None = None,
    sample_id: str | None = None,
    stop_markers: list[str] | None = None,
) -> RepairPrompt:
    """Assemble the prompt text for one style.

    P1 needs no region; the other styles require a decomposition built over
    the same buggy function.
    """
    if style not in STYLES:
        raise ValueError(f"unknown prompt style {style!r}")
    if style != "P1" and decomp is None:
        raise RegionMismatchError(f"style {style} requires a region decomposition")
    if decomp is not None and decomp.buggy is not buggy and decomp.buggy.source != buggy.source:
        raise RegionMismatchError("decomposition does not belong to this function")

    if style == "P1":
        text = buggy.source
    elif style == "P2":
        text = buggy.source + SEP + decomp.prefix_text()
    elif style == "P3":
        text = decomp.truncated_buggy_text() + SEP + decomp.prefix_text()
    else:  # P4
        text = (
            decomp.buggy_middle_text()
            + SEP
            + decomp.prefix_text()
            + SEP
            + decomp.suffix_text()
        )
    if comment:
        text = text + COMMENT_MARK + comment

    expected = None
    if isinstance(decomp, RegionDecomposition):
        if style == "P1":
            expected = decomp.fixed.source
        elif style in ("P2", "P3"):
            expected = decomp.truncated_fixed_text()
        else:
            expected = decomp.fixed_middle_text()
    elif style == "P1" and decomp is None:
        expected = None

    return RepairPrompt(
        style=style,
        text=text,
        stop_markers=list(stop_markers) if stop_markers else [SEP, EOT],
        reconstruction=decomp,
        expected_target=expected,
        sample_id=sample_id,
        comment=comment,
    )


def truncate_at_stop(completion: str, stop_markers: list[str]) -> str:
    cut = len(completion)
    for marker in stop_markers:
        idx = completion.find(marker)
        if idx != -1 and idx < cut:
            cut = idx
    return completion[:cut]


def completion_to_fix(prompt: RepairPrompt, completion: str) -> str:
    """Reassemble a full candidate function from a raw completion."""
    body = truncate_at_stop(completion, prompt.stop_markers)
    if prompt.style == "P1":
        return body
    decomp = prompt.reconstruction
    if decomp is None:
        raise RegionMismatchError(f"style {prompt.style} prompt lacks reconstruction info")
    if prompt.style in ("P2", "P3"):
        return glue(decomp.prefix_text(), body)
    return glue(glue(decomp.prefix_text(), body), decomp.suffix_text())


def oracle_completion(
    gt: RegionDecomposition,
    region: BugRegion,
    style: str,
) -> str | None:
    """The completion that reconstructs the true fix for a predicted region.

    Returns None when no completion can succeed, which happens when the
    predicted region fails to contain the ground-truth region: a start past
    the shared prefix bakes buggy tokens into the prefix, and for P4 an end
    before the true end bakes them into the suffix.
    """
    if style not in STYLES:
        raise ValueError(f"unknown prompt style {style!r}")
    if style == "P1":
        return gt.fixed.source
    nb = len(gt.buggy)
    nf = len(gt.fixed)
    start = region.start
    if start > gt.p:
        return None
    f_toks = gt.fixed.tokens
    if style in ("P2", "P3"):
        if start >= nf:
            return ""
        return gt.fixed.source[f_toks[start].start :]
    # P4: the suffix retained from the buggy side must be truly shared.
    kept_suffix = nb - 1 - region.end if not region.empty else nb - region.start
    if kept_suffix > gt.s:
        return None
    lo, hi = start, nf - kept_suffix
    if lo >= hi:
        return ""
    return gt.fixed.source[f_toks[lo].start : f_toks[hi - 1].end]


def prompt_record(prompt: RepairPrompt) -> dict:
    return {
        "id": prompt.sample_id,
        "style": prompt.style,
        "text": prompt.text,
        "expected_target": prompt.expected_target,
    }
