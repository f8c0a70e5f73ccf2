"""Annotation pipeline: prompts, clients, feedback loop, dataset ops."""

from .annotate import (
    AnnotationTask,
    Attempt,
    CallableSandbox,
    ExecOutcome,
    STATUS_ACCEPTED,
    STATUS_EXECUTION_FAILED,
    STATUS_SHAPE_MISMATCH,
    SubprocessSandbox,
    annotate_corpus,
    annotate_with_feedback,
    strip_code_fences,
    summarize_checkpoints,
    write_checkpoint,
)
from .clients import (
    DirectoryMockTransport,
    HttpLlmClient,
    HttpShapeJudgeClient,
    JUDGE_QUESTION,
    RateLimiter,
)
from .dataset import (
    DatasetSplit,
    TokenStats,
    approx_token_count,
    split_dataset,
    token_stats,
)
from .judge import JudgeVerdict, judge_shapes, match_rate
from .prompts import CLOSING_INSTRUCTION, SYSTEM_INSTRUCTION, assemble_prompt
from .review import export_review_bundles, import_review_verdicts
from .render import image_to_png, render_silhouette

__all__ = [
    "AnnotationTask",
    "Attempt",
    "CLOSING_INSTRUCTION",
    "CallableSandbox",
    "DatasetSplit",
    "DirectoryMockTransport",
    "ExecOutcome",
    "HttpLlmClient",
    "HttpShapeJudgeClient",
    "JUDGE_QUESTION",
    "JudgeVerdict",
    "RateLimiter",
    "STATUS_ACCEPTED",
    "STATUS_EXECUTION_FAILED",
    "STATUS_SHAPE_MISMATCH",
    "SYSTEM_INSTRUCTION",
    "SubprocessSandbox",
    "TokenStats",
    "annotate_corpus",
    "annotate_with_feedback",
    "approx_token_count",
    "assemble_prompt",
    "image_to_png",
    "export_review_bundles",
    "import_review_verdicts",
    "judge_shapes",
    "match_rate",
    "render_silhouette",
    "split_dataset",
    "strip_code_fences",
    "summarize_checkpoints",
    "token_stats",
    "write_checkpoint",
]
