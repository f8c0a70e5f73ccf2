"""Command-line entry point.

Exit codes are a stable scripting contract: 0 success, 2 input or
validation error, 3 external-service (LLM endpoint / sandbox runner)
error. Every run writes its resolved configuration and tool version into
the output artifact (JSON outputs embed them; binary outputs get a
`<name>.run.json` sidecar). Values from --config override flags.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .codec import CommandVector, decode_sequence, encode_sequence
from .errors import (
    CadKitError,
    LlmTransportError,
    RateLimitedError,
    SandboxUnavailableError,
)
from .kernel import build_solid, extract_mesh
from .metrics import (
    SampleMetrics,
    aggregate,
    chamfer,
    f1_score,
    load_stl,
    normalize_for_cd,
    sample_mesh_surface,
    save_stl,
    voxel_iou,
)
from .model import parse_cad_json, serialize_cad_json
from .pipeline import (
    DirectoryMockTransport,
    HttpLlmClient,
    HttpShapeJudgeClient,
    RateLimiter,
    SubprocessSandbox,
    annotate_corpus,
    approx_token_count,
    split_dataset,
    token_stats,
)

EXIT_INPUT_ERROR = 2
EXIT_SERVICE_ERROR = 3


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (RateLimitedError, SandboxUnavailableError, LlmTransportError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_SERVICE_ERROR)
        except (CadKitError, json.JSONDecodeError, OSError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT_ERROR)

    return wrapper


def _load_config(config_path) -> dict:
    if not config_path:
        return {}
    return json.loads(Path(config_path).read_text())


def _resolve(config: dict, key: str, flag_value):
    """Config-file values override command-line flags."""
    return config.get(key, flag_value)


def _artifact_header(config: dict) -> dict:
    return {"tool": "cadkit", "version": __version__, "config": config}


def _write_sidecar(out_path: Path, config: dict) -> None:
    sidecar = out_path.with_name(out_path.name + ".run.json")
    sidecar.write_text(json.dumps(_artifact_header(config), indent=2) + "\n")


@click.group()
@click.version_option(version=__version__)
def main():
    """Sketch-extrude CAD toolkit: transpile, build, eval, annotate."""


# ---------------------------------------------------------------------------
# transpile


@main.command("transpile")
@click.argument("json_path", type=click.Path(exists=True, path_type=Path))
@click.option("--compat", is_flag=True, help="Centered-circle reference style.")
@click.option("--out", type=click.Path(path_type=Path), help="Output .py file or directory.")
@click.option("--stl-path", default="result.stl", show_default=True,
              help="STL path baked into the emitted script.")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@handle_errors
def cmd_transpile(json_path: Path, compat: bool, out, stl_path: str, config_path):
    """Emit a CadQuery script for one model JSON (or one per file for a directory)."""
    from .transpiler import transpile

    config = _load_config(config_path)
    compat = _resolve(config, "compat", compat)
    stl_path = _resolve(config, "stl_path", stl_path)
    resolved = {"compat": compat, "stl_path": stl_path}

    def one(src: Path, dst: Path):
        emission = transpile(parse_cad_json(src.read_text()), compat=compat, stl_path=stl_path)
        dst.parent.mkdir(parents=True, exist_ok=True)
        dst.write_text(emission.source)
        _write_sidecar(dst, resolved)
        click.echo(f"{src} -> {dst}")

    if json_path.is_dir():
        out_dir = Path(out) if out else json_path
        for src in sorted(json_path.glob("*.json")):
            one(src, out_dir / (src.stem + ".py"))
    else:
        dst = Path(out) if out else json_path.with_suffix(".py")
        one(json_path, dst)


# ---------------------------------------------------------------------------
# build


@main.command("build")
@click.argument("json_path", type=click.Path(exists=True, path_type=Path))
@click.option("--mode", type=click.Choice(["per-primitive", "voxel-surface"]),
              default="per-primitive", show_default=True)
@click.option("--resolution", type=float, default=0.02, show_default=True,
              help="Voxel size for voxel-surface mode.")
@click.option("--tol", type=float, default=1e-3, show_default=True,
              help="Tessellation tolerance (fraction of loop bbox diagonal).")
@click.option("--compat", is_flag=True, help="Centered-circle reference style.")
@click.option("--out", type=click.Path(path_type=Path), help="Output .stl path.")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@handle_errors
def cmd_build(json_path: Path, mode: str, resolution: float, tol: float,
              compat: bool, out, config_path):
    """Build the model's geometry and write a binary STL."""
    config = _load_config(config_path)
    mode = _resolve(config, "mode", mode)
    resolution = _resolve(config, "resolution", resolution)
    tol = _resolve(config, "tessellation_tol", tol)
    compat = _resolve(config, "compat", compat)

    seq = parse_cad_json(json_path.read_text())
    solid = build_solid(seq, tol=tol, center_circles=compat)
    mesh = extract_mesh(solid, mode=mode, resolution=resolution)
    dst = Path(out) if out else json_path.with_suffix(".stl")
    dst.parent.mkdir(parents=True, exist_ok=True)
    dst.write_bytes(save_stl(mesh, format="binary"))
    _write_sidecar(dst, {"mode": mode, "resolution": resolution,
                         "tessellation_tol": tol, "compat": compat})
    click.echo(f"{json_path} -> {dst} ({mesh.triangle_count} triangles)")


# ---------------------------------------------------------------------------
# eval


@main.command("eval")
@click.argument("pred", type=click.Path(exists=True, path_type=Path))
@click.argument("gt", type=click.Path(exists=True, path_type=Path))
@click.option("--tau", type=float, default=0.02, show_default=True)
@click.option("--resolution", type=float, default=0.02, show_default=True)
@click.option("--n", "n_points", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--report", "report_path", type=click.Path(path_type=Path))
@click.option("--csv", "csv_path", type=click.Path(path_type=Path))
@click.option("--workers", type=int, default=0, help="Worker threads (0 = logical cores).")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@handle_errors
def cmd_eval(pred: Path, gt: Path, tau: float, resolution: float, n_points: int,
             seed: int, report_path, csv_path, workers: int, config_path):
    """Score predicted vs ground-truth STLs (files, or directories paired by stem)."""
    config = _load_config(config_path)
    tau = _resolve(config, "tau", tau)
    resolution = _resolve(config, "resolution", resolution)
    n_points = _resolve(config, "n_points", n_points)
    seed = _resolve(config, "seed", seed)
    workers = _resolve(config, "workers", workers) or (os.cpu_count() or 1)

    if pred.is_dir() != gt.is_dir():
        raise ValueError("pred and gt must both be files or both be directories")
    if pred.is_dir():
        pairs = [(p.stem, pred / (p.stem + ".stl"), p) for p in sorted(gt.glob("*.stl"))]
        if not pairs:
            raise ValueError(f"no .stl files under {gt}")
    else:
        pairs = [(pred.stem, pred, gt)]

    def score(item) -> SampleMetrics:
        sample_id, pred_path, gt_path = item
        try:
            pred_mesh = normalize_for_cd(load_stl(pred_path.read_bytes()))
        except (CadKitError, OSError):
            return SampleMetrics(sample_id=sample_id, valid=False)
        gt_mesh = normalize_for_cd(load_stl(gt_path.read_bytes()))
        p = sample_mesh_surface(pred_mesh, n_points, seed)
        q = sample_mesh_surface(gt_mesh, n_points, seed)
        return SampleMetrics(
            sample_id=sample_id,
            valid=True,
            cd=chamfer(p, q),
            f1=f1_score(p, q, tau=tau),
            iou=voxel_iou(pred_mesh, gt_mesh, resolution=resolution),
        )

    if workers > 1 and len(pairs) > 1:
        import concurrent.futures

        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            per_sample = list(pool.map(score, pairs))
    else:
        per_sample = [score(item) for item in pairs]

    resolved = {
        "tau": tau,
        "resolution": resolution,
        "n_points": n_points,
        "seed": seed,
        "normalization": "bbox-center-longest-edge-to-1",
    }
    report = aggregate(per_sample, config=resolved)
    for line in report.aggregate.format_lines():
        click.echo(line)
    if report_path:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        doc = report.to_dict()
        doc.update(_artifact_header(resolved))
        Path(report_path).write_text(json.dumps(doc, indent=2) + "\n")
    if csv_path:
        Path(csv_path).write_text(report.to_csv())


# ---------------------------------------------------------------------------
# annotate


@main.command("annotate")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--resume/--no-resume", default=True, show_default=True)
@click.option("--workers", type=int, default=0, help="Worker threads (0 = logical cores).")
@handle_errors
def cmd_annotate(corpus_dir: Path, config_path: Path, out_dir: Path, resume: bool, workers: int):
    """Annotate every *.json sample in CORPUS_DIR with checkpointed feedback loops."""
    config = _load_config(config_path)
    llm_cfg = config.get("llm", {})
    llm = _make_llm(llm_cfg)
    judge_cfg = config.get("judge")
    judge = _make_judge(judge_cfg) if judge_cfg else None
    sandbox = SubprocessSandbox(command=config.get("runner_command", "cadkit-runner"))
    workers = _resolve(config, "workers", workers) or (os.cpu_count() or 1)

    samples = {p.stem: p.read_text() for p in sorted(corpus_dir.glob("*.json"))}
    if not samples:
        raise ValueError(f"no .json samples under {corpus_dir}")
    ground_truths = {}
    gt_dir = config.get("ground_truth_dir")
    if gt_dir:
        for p in Path(gt_dir).glob("*.stl"):
            ground_truths[p.stem] = p.read_bytes()

    summary = annotate_corpus(
        samples,
        llm,
        sandbox,
        out_dir,
        max_retries=int(config.get("max_retries", 2)),
        resume=resume,
        workers=workers,
        judge=judge,
        ground_truths=ground_truths,
        timeout=float(config.get("timeout", 60.0)),
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.json").write_text(
        json.dumps({**summary, **_artifact_header(config)}, indent=2) + "\n"
    )
    click.echo(
        f"annotated {summary['total']}: "
        f"{summary['first_try_successes']} first-try, "
        f"{summary['fixed_by_feedback']} fixed by feedback, "
        f"{summary['execution_failed']} failed "
        f"(executed rate {100 * summary['executed_rate']:.1f}%)"
    )


def _make_llm(cfg: dict) -> HttpLlmClient:
    limiter = None
    if cfg.get("requests_per_minute"):
        limiter = RateLimiter(
            int(cfg["requests_per_minute"]),
            tokens_per_minute=cfg.get("tokens_per_minute"),
        )
    transport_kwargs = {}
    if cfg.get("mock_dir"):
        transport_kwargs["transport"] = DirectoryMockTransport(cfg["mock_dir"])
    return HttpLlmClient(
        endpoint=cfg.get("endpoint", "http://localhost:8000/v1/complete"),
        model_name=cfg.get("model", "annotation-model"),
        api_key_env=cfg.get("api_key_env", "CADKIT_API_KEY"),
        rate_limiter=limiter,
        timeout=float(cfg.get("timeout", 60.0)),
        token_estimator=approx_token_count,
        **transport_kwargs,
    )


def _make_judge(cfg: dict) -> HttpShapeJudgeClient:
    transport_kwargs = {}
    if cfg.get("mock_dir"):
        transport_kwargs["transport"] = DirectoryMockTransport(cfg["mock_dir"])
    return HttpShapeJudgeClient(
        endpoint=cfg.get("endpoint", "http://localhost:8000/v1/judge"),
        model_name=cfg.get("model", "judge-model"),
        api_key_env=cfg.get("api_key_env", "CADKIT_API_KEY"),
        timeout=float(cfg.get("timeout", 60.0)),
        **transport_kwargs,
    )


# ---------------------------------------------------------------------------
# split / stats / encode / decode


@main.command("split")
@click.argument("manifest", type=click.Path(exists=True, path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@handle_errors
def cmd_split(manifest: Path, seed: int, out: Path, config_path):
    """Split a manifest (one id per line, or a JSON list) into 90/5/5 sets."""
    config = _load_config(config_path)
    seed = _resolve(config, "seed", seed)
    text = manifest.read_text()
    if manifest.suffix == ".json":
        ids = json.loads(text)
    else:
        ids = [line.strip() for line in text.splitlines() if line.strip()]
    split = split_dataset(ids, seed=seed)
    doc = {
        **_artifact_header({"seed": seed, "fractions": [0.90, 0.05, 0.05]}),
        "train": list(split.train),
        "val": list(split.val),
        "test": list(split.test),
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    click.echo(f"{len(split.train)}/{len(split.val)}/{len(split.test)} -> {out}")


@main.command("stats")
@click.argument("corpus", type=click.Path(exists=True, path_type=Path))
@click.option("--limit", type=int, default=1024, show_default=True,
              help="Context-length threshold for fraction_below.")
@click.option("--out", type=click.Path(path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@handle_errors
def cmd_stats(corpus: Path, limit: int, out, config_path):
    """Approximate token statistics over a corpus directory (or one file)."""
    config = _load_config(config_path)
    limit = _resolve(config, "limit", limit)
    if corpus.is_dir():
        texts = [p.read_text() for p in sorted(corpus.iterdir()) if p.is_file()]
    else:
        texts = [corpus.read_text()]
    stats = token_stats(texts)
    doc = {
        **_artifact_header({"limit": limit, "tokenizer": "approximate-word-symbol"}),
        "samples": len(stats.counts),
        "min": stats.min,
        "max": stats.max,
        "mean": stats.mean,
        "median": stats.median,
        f"fraction_below_{limit}": stats.fraction_below(limit),
    }
    payload = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(payload + "\n")
    click.echo(payload)


@main.command("encode")
@click.argument("json_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path))
@click.option("--allow-truncation", is_flag=True)
@handle_errors
def cmd_encode(json_path: Path, out, allow_truncation: bool):
    """Encode model JSON into the fixed-length quantized vector file."""
    seq = parse_cad_json(json_path.read_text())
    vec = encode_sequence(seq, allow_truncation=allow_truncation)
    dst = Path(out) if out else json_path.with_suffix(".csq")
    dst.write_bytes(vec.to_bytes())
    _write_sidecar(dst, {"allow_truncation": allow_truncation})
    click.echo(f"{json_path} -> {dst} ({vec.command_count} commands)")


@main.command("decode")
@click.argument("vec_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path))
@handle_errors
def cmd_decode(vec_path: Path, out):
    """Decode a quantized vector file back into model JSON."""
    vec = CommandVector.from_bytes(vec_path.read_bytes())
    seq = decode_sequence(vec)
    dst = Path(out) if out else vec_path.with_suffix(".json")
    dst.write_text(serialize_cad_json(seq) + "\n")
    _write_sidecar(dst, {})
    click.echo(f"{vec_path} -> {dst}")


if __name__ == "__main__":
    main()
