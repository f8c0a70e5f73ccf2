"""Execute-and-self-correct annotation: LLM call, lint, sandboxed run,
error feedback, optional render-and-judge, checkpointed batch processing."""

from __future__ import annotations

import base64
import concurrent.futures
import json
import os
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

from ..errors import SandboxUnavailableError
from ..metrics.stl import load_stl
from ..transpiler import static_check
from .clients import LlmClient, ShapeJudgeClient
from .dataset import approx_token_count
from .judge import JudgeVerdict, judge_shapes
from .prompts import assemble_prompt
from .render import image_to_png, render_silhouette

DEFAULT_MAX_RETRIES = 2
DEFAULT_TIMEOUT = 60.0

CORRECTION_TEMPLATE = (
    "Your previous code failed with: {error}. Fix it and output only code."
)

STATUS_ACCEPTED = "accepted"
STATUS_EXECUTION_FAILED = "execution_failed"
STATUS_SHAPE_MISMATCH = "shape_mismatch"


@dataclass(frozen=True)
class ExecOutcome:
    ok: bool
    stl: Optional[bytes]
    error: Optional[str]
    wall_time: float

    def __post_init__(self):
        if self.ok and self.error is not None:
            raise ValueError("successful execution cannot carry an error")
        if not self.ok and not self.error:
            raise ValueError("failed execution must carry an error message")


@dataclass
class Attempt:
    prompt: str
    llm_output: str
    execution: ExecOutcome
    judge: Optional[JudgeVerdict] = None
    token_estimate: int = 0

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "llm_output": self.llm_output,
            "token_estimate": self.token_estimate,
            "execution": {
                "ok": self.execution.ok,
                "stl_b64": base64.b64encode(self.execution.stl).decode()
                if self.execution.stl
                else None,
                "error": self.execution.error,
                "wall_time": self.execution.wall_time,
            },
            "judge": None
            if self.judge is None
            else {"match": self.judge.match, "explanation": self.judge.explanation},
        }


@dataclass
class AnnotationTask:
    sample_id: str
    minimal_json: str
    ground_truth_stl: Optional[bytes] = None
    attempts: list[Attempt] = field(default_factory=list)
    status: str = "pending"

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "status": self.status,
            "attempts": [a.to_dict() for a in self.attempts],
        }


class Sandbox(Protocol):
    def run(self, script: str, timeout: float = DEFAULT_TIMEOUT) -> ExecOutcome: ...


class SubprocessSandbox:
    """Client for the external runner process.

    Contract: `<runner> --timeout N` with the script on stdin, one JSON
    object {ok, stl_b64?, stderr, wall_time, exit_code} on stdout.
    """

    def __init__(self, command: str = "cadkit-runner", env: Optional[dict] = None):
        self.command = command
        self.env = env

    def run(self, script: str, timeout: float = DEFAULT_TIMEOUT) -> ExecOutcome:
        argv = [self.command, "--timeout", str(timeout)]
        env = dict(os.environ, **self.env) if self.env else None
        try:
            proc = subprocess.run(
                argv,
                input=script.encode(),
                capture_output=True,
                timeout=timeout + 30.0,
                env=env,
            )
        except FileNotFoundError as exc:
            raise SandboxUnavailableError(f"runner {self.command!r} not found") from exc
        except subprocess.TimeoutExpired as exc:
            raise SandboxUnavailableError("runner did not answer in time") from exc
        try:
            result = json.loads(proc.stdout.decode())
        except ValueError as exc:
            raise SandboxUnavailableError(
                f"runner emitted invalid JSON (exit {proc.returncode}): "
                f"{proc.stdout[:200]!r}"
            ) from exc
        stl = base64.b64decode(result["stl_b64"]) if result.get("stl_b64") else None
        ok = bool(result.get("ok"))
        return ExecOutcome(
            ok=ok,
            stl=stl,
            error=None if ok else (result.get("stderr") or "unknown failure"),
            wall_time=float(result.get("wall_time", 0.0)),
        )


class CallableSandbox:
    """Adapter for tests: wraps any (script, timeout) -> ExecOutcome callable."""

    def __init__(self, fn):
        self._fn = fn

    def run(self, script: str, timeout: float = DEFAULT_TIMEOUT) -> ExecOutcome:
        return self._fn(script, timeout)


def strip_code_fences(text: str) -> str:
    """Drop a single ```...``` wrapper if the model added one."""
    stripped = text.strip()
    if not stripped.startswith("```"):
        return stripped
    lines = stripped.splitlines()
    if len(lines) < 2:
        return stripped
    body = lines[1:]
    if body and body[-1].strip().startswith("```"):
        body = body[:-1]
    return "\n".join(body).strip()


def annotate_with_feedback(
    task: AnnotationTask,
    llm: LlmClient,
    sandbox: Sandbox,
    max_retries: int = DEFAULT_MAX_RETRIES,
    judge: Optional[ShapeJudgeClient] = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> AnnotationTask:
    """Generate, lint, execute; feed failures back verbatim for correction.

    Terminal status: accepted, execution_failed, or (when a ground-truth
    STL and judge are supplied) shape_mismatch.
    """
    messages = [{"role": "user", "content": assemble_prompt(task.minimal_json)}]
    for round_index in range(max_retries + 1):
        prompt_text = "\n\n".join(
            m["content"] for m in messages if isinstance(m["content"], str)
        )
        llm_output = llm.complete(messages)
        script = strip_code_fences(llm_output)
        findings = static_check(script)
        if findings:
            summary = "; ".join(f"{f.code}: {f.message}" for f in findings)
            execution = ExecOutcome(
                ok=False, stl=None, error=f"static check failed: {summary}", wall_time=0.0
            )
        else:
            execution = sandbox.run(script, timeout=timeout)
        attempt = Attempt(
            prompt=prompt_text,
            llm_output=llm_output,
            execution=execution,
            token_estimate=approx_token_count(prompt_text),
        )
        task.attempts.append(attempt)

        if execution.ok:
            task.status = STATUS_ACCEPTED
            if judge is not None and task.ground_truth_stl is not None and execution.stl:
                verdict = _judge_against_ground_truth(execution.stl, task.ground_truth_stl, judge)
                attempt.judge = verdict
                if not verdict.match:
                    task.status = STATUS_SHAPE_MISMATCH
            return task

        if round_index < max_retries:
            messages.append({"role": "assistant", "content": llm_output})
            messages.append(
                {"role": "user", "content": CORRECTION_TEMPLATE.format(error=execution.error)}
            )
    task.status = STATUS_EXECUTION_FAILED
    return task


def _judge_against_ground_truth(
    predicted_stl: bytes, ground_truth_stl: bytes, judge: ShapeJudgeClient
) -> JudgeVerdict:
    image_a = image_to_png(render_silhouette(load_stl(predicted_stl)))
    image_b = image_to_png(render_silhouette(load_stl(ground_truth_stl)))
    return judge_shapes(image_a, image_b, judge)


# ---------------------------------------------------------------------------
# checkpointed batch processing


def checkpoint_path(out_dir: Path, sample_id: str) -> Path:
    return Path(out_dir) / f"{sample_id}.json"


def write_checkpoint(out_dir: Path, task: AnnotationTask) -> Path:
    """Atomic per-sample checkpoint: write to a temp file, then rename."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    final = checkpoint_path(out_dir, task.sample_id)
    tmp = final.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(task.to_dict(), indent=2))
    os.replace(tmp, final)
    return final


def annotate_corpus(
    samples: dict[str, str],
    llm: LlmClient,
    sandbox: Sandbox,
    out_dir,
    max_retries: int = DEFAULT_MAX_RETRIES,
    resume: bool = True,
    workers: int = 4,
    judge: Optional[ShapeJudgeClient] = None,
    ground_truths: Optional[dict[str, bytes]] = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> dict:
    """Annotate a {sample_id: minimal_json} corpus with per-sample checkpoints.

    Completed ids are skipped when resuming, so interrupted runs restart
    idempotently. Returns a summary with first-try and after-feedback rates.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pending = []
    for sample_id in sorted(samples):
        if resume and checkpoint_path(out_dir, sample_id).exists():
            continue
        pending.append(sample_id)

    def process(sample_id: str) -> None:
        task = AnnotationTask(
            sample_id=sample_id,
            minimal_json=samples[sample_id],
            ground_truth_stl=(ground_truths or {}).get(sample_id),
        )
        annotate_with_feedback(
            task, llm, sandbox, max_retries=max_retries, judge=judge, timeout=timeout
        )
        write_checkpoint(out_dir, task)

    if workers <= 1:
        for sample_id in pending:
            process(sample_id)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(process, pending))
    return summarize_checkpoints(out_dir)


def summarize_checkpoints(out_dir) -> dict:
    """Success-rate summary counted from checkpoint files."""
    out_dir = Path(out_dir)
    total = accepted = mismatch = failed = 0
    first_try = fixed_by_feedback = 0
    for path in sorted(out_dir.glob("*.json")):
        if path.name == "summary.json":  # the batch summary, not a checkpoint
            continue
        doc = json.loads(path.read_text())
        total += 1
        status = doc["status"]
        executed = status in (STATUS_ACCEPTED, STATUS_SHAPE_MISMATCH)
        if status == STATUS_ACCEPTED:
            accepted += 1
        elif status == STATUS_SHAPE_MISMATCH:
            mismatch += 1
        else:
            failed += 1
        if executed:
            if len(doc["attempts"]) == 1:
                first_try += 1
            else:
                fixed_by_feedback += 1
    return {
        "total": total,
        "accepted": accepted,
        "shape_mismatch": mismatch,
        "execution_failed": failed,
        "first_try_successes": first_try,
        "fixed_by_feedback": fixed_by_feedback,
        "first_try_rate": first_try / total if total else 0.0,
        "executed_rate": (first_try + fixed_by_feedback) / total if total else 0.0,
    }
