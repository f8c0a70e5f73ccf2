"""Shape judging via a multimodal client with strict Yes-parsing."""

from __future__ import annotations

from dataclasses import dataclass

from .clients import JUDGE_QUESTION, ShapeJudgeClient


@dataclass(frozen=True)
class JudgeVerdict:
    match: bool
    explanation: str
    raw_response: str


def match_rate(verdicts) -> float:
    """Fraction of matching verdicts: the judge-evaluation score over a set."""
    verdicts = list(verdicts)
    if not verdicts:
        raise ValueError("empty verdict list")
    return sum(1 for v in verdicts if v.match) / len(verdicts)


def judge_shapes(image_a_png: bytes, image_b_png: bytes, judge: ShapeJudgeClient) -> JudgeVerdict:
    """Ask the judge whether two rendered shapes match.

    A response whose first word is "Yes" counts as a match; anything else
    (including unparseable responses) is a mismatch with the text kept as
    the explanation. Transport errors propagate.
    """
    if not image_a_png or not image_b_png:
        raise ValueError("both images must be nonempty")
    raw = judge.compare(image_a_png, image_b_png, JUDGE_QUESTION)
    if not isinstance(raw, str):
        return JudgeVerdict(match=False, explanation="unparseable", raw_response=repr(raw))
    stripped = raw.strip()
    if stripped.startswith("Yes"):
        return JudgeVerdict(match=True, explanation=stripped, raw_response=raw)
    explanation = stripped if stripped else "unparseable"
    return JudgeVerdict(match=False, explanation=explanation, raw_response=raw)
