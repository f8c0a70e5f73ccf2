"""Run one generated CAD script in an isolated subprocess.

Invocation: `cadkit-runner --timeout N` with the script on stdin. The
result is exactly one JSON object on stdout, whatever the script does:

    {"ok": bool, "stl_b64": str|null, "stderr": str,
     "wall_time": float, "exit_code": int}

ok is true iff the script exits 0 AND leaves exactly one *.stl file in
its (fresh, temporary) working directory. Script failures are data, never
runner errors. Timeouts kill the whole process tree and report
stderr="timeout".

Isolation level: fresh temp dir as cwd, its own process group, and a
network namespace when unprivileged `unshare -n` is available on the
host; anything stronger (containers, seccomp) is out of scope and must be
provided by the caller's environment.
"""

from __future__ import annotations

import argparse
import base64
import functools
import json
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import time

DEFAULT_TIMEOUT = 60.0
_STDERR_LIMIT = 100_000  # keep result objects bounded


@functools.lru_cache(maxsize=1)
def _unshare_prefix() -> tuple[str, ...]:
    """Opportunistic network isolation via `unshare --net` when usable.

    A candidate prefix is accepted only if the wrapped interpreter can
    still read this very file: user-namespace remapping can silently drop
    access to the caller's directories, which would break every script.
    """
    unshare = shutil.which("unshare")
    if not unshare:
        return ()
    marker = os.path.abspath(__file__)
    for flags in (("--net",), ("--map-root-user", "--net")):
        probe = subprocess.run(
            [unshare, *flags, sys.executable, "-c", f"open({marker!r}, 'rb').read(1)"],
            capture_output=True,
            timeout=10,
        )
        if probe.returncode == 0:
            return (unshare, *flags)
    return ()


def run_script(script: str, timeout: float = DEFAULT_TIMEOUT) -> dict:
    workdir = tempfile.mkdtemp(prefix="cadkit-run-")
    try:
        return _run_in_workdir(script, timeout, workdir)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def _run_in_workdir(script: str, timeout: float, workdir: str) -> dict:
    script_path = os.path.join(workdir, "script.py")
    with open(script_path, "w") as fh:
        fh.write(script)

    argv = [*_unshare_prefix(), sys.executable, script_path]
    start = time.monotonic()
    proc = subprocess.Popen(
        argv,
        cwd=workdir,
        stdout=subprocess.DEVNULL,
        stderr=subprocess.PIPE,
        stdin=subprocess.DEVNULL,
        start_new_session=True,
    )
    timed_out = False
    try:
        _, stderr_bytes = proc.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_tree(proc)
        _, stderr_bytes = proc.communicate()
    wall_time = time.monotonic() - start

    stderr = (stderr_bytes or b"").decode(errors="replace")[:_STDERR_LIMIT]
    exit_code = proc.returncode if proc.returncode is not None else -9
    if timed_out:
        return {
            "ok": False,
            "stl_b64": None,
            "stderr": "timeout",
            "wall_time": wall_time,
            "exit_code": exit_code,
        }

    stl_files = sorted(
        os.path.join(root, name)
        for root, _, names in os.walk(workdir)
        for name in names
        if name.lower().endswith(".stl")
    )
    ok = exit_code == 0 and len(stl_files) == 1
    stl_b64 = None
    if ok:
        with open(stl_files[0], "rb") as fh:
            stl_b64 = base64.b64encode(fh.read()).decode()
    elif exit_code == 0 and len(stl_files) != 1:
        note = f"expected exactly one STL in the working directory, found {len(stl_files)}"
        stderr = f"{stderr}\n{note}".strip() if stderr else note
    return {
        "ok": ok,
        "stl_b64": stl_b64,
        "stderr": stderr,
        "wall_time": wall_time,
        "exit_code": exit_code,
    }


def _kill_tree(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cadkit-runner",
        description="Execute a CAD script from stdin; emit one result JSON on stdout.",
    )
    parser.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                        help="seconds before the script is killed (default 60)")
    args = parser.parse_args(argv)
    script = sys.stdin.read()
    result = run_script(script, timeout=args.timeout)
    json.dump(result, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
