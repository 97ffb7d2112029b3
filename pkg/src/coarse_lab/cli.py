"""Command-line front end: ``coarse-lab run`` and ``coarse-lab verify``."""
from __future__ import annotations

import argparse
import difflib
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, kernels
from .config import Built, as_plain, build, load_config
from .errors import CoarseLabError, budgets
from .io import (FORMAT_VERSION, combing_from_dict, combing_to_dict, dumps, read_json, space_from_dict,
                 space_to_dict, write_json)
from .pipeline import expectation_failed, recheck_witnesses, run_task

EXIT_OK, EXIT_ERROR, EXIT_EXPECTATION = 0, 1, 2
SPACE_FILE, COMBING_FILE, METADATA_FILE = "space.json", "combing.json", "metadata.json"


def _config_echo(cfg):
    return {"space": as_plain(cfg.space), "combing": as_plain(cfg.combing), "budgets": as_plain(cfg.budgets)}


def run(config_path, out=None, threads=None) -> int:
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    cfg = load_config(config_path)
    formats = set(cfg.output.get("formats", ["json", "csv", "dot"]))
    out_dir = Path(out or cfg.output.get("dir") or Path("out") / cfg.name)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    written = []
    with budgets(**cfg.budgets):
        built = build(cfg)
        space_ref = combing_ref = None
        if built.space is not None:
            space_ref = SPACE_FILE
            write_json(out_dir / SPACE_FILE, space_to_dict(built.space))
        if built.combing is not None:
            combing_ref = COMBING_FILE
            write_json(out_dir / COMBING_FILE, combing_to_dict(built.combing, SPACE_FILE))
        echo = _config_echo(cfg)
        for i, task in enumerate(cfg.tasks):
            task = as_plain(task)
            for res in run_task(task, built, echo):
                stem = f"{i:02d}_{res.stem}"
                report = {
                    "format_version": FORMAT_VERSION,
                    "name": cfg.name,
                    "task_index": i,
                    "stem": res.stem,
                    "task": task,
                    "config": echo,
                    "space_ref": space_ref,
                    "combing_ref": combing_ref,
                    "result": res.result,
                }
                write_json(out_dir / f"{stem}.json", report)
                written.append(f"{stem}.json")
                for suffix, payload in res.extra.items():
                    if suffix.split(".")[-1] in formats or suffix == "complex.json":
                        target = out_dir / f"{stem}.{suffix}"
                        if isinstance(payload, str):
                            target.write_text(payload, encoding="utf-8")
                        else:
                            write_json(target, {"format_version": FORMAT_VERSION, **payload})
                line = f"{stem}: {res.verdict}" if res.verdict else f"{stem}: done"
                if expectation_failed(task, res.verdict):
                    status = EXIT_EXPECTATION
                    line += f" (expected {task['expect']})"
                print(line)
    meta = {
        "format_version": FORMAT_VERSION,
        "config": str(config_path),
        "started": started.isoformat(),
        "elapsed_seconds": round(time.perf_counter() - t0, 3),
        "threads": threads,
        "kernel_backend": kernels.BACKEND,
        "python": platform.python_version(),
        "coarse_lab": __version__,
        "reports": written,
    }
    write_json(out_dir / METADATA_FILE, meta)
    return status


def verify(report_path) -> int:
    report_path = Path(report_path)
    report = read_json(report_path)
    if report.get("format_version") != FORMAT_VERSION:
        raise CoarseLabError(f"unsupported report format_version {report.get('format_version')!r}")
    base = report_path.parent
    space = combing = None
    for key in ("space_ref", "combing_ref"):
        ref = report.get(key)
        if ref is not None and not (base / ref).exists():
            raise CoarseLabError(f"{report_path}: referenced file {base / ref} is missing")
    config = report["config"]
    with budgets(**config.get("budgets", {})):
        if report.get("space_ref"):
            space = space_from_dict(read_json(base / report["space_ref"]))
        if report.get("combing_ref"):
            combing = combing_from_dict(read_json(base / report["combing_ref"]), space)
        diffs = recheck_witnesses(report["result"], combing) if combing is not None else []
        task = dict(report["task"])
        if task["kind"] == "audit":
            task["property"] = report["stem"]
        outputs = [o for o in run_task(task, Built(space, combing), config) if o.stem == report["stem"]]
    if not outputs:
        diffs.append(f"task produced no output named {report['stem']!r}")
    else:
        stored = dumps(report["result"]).splitlines()
        fresh = dumps(outputs[0].result).splitlines()
        if stored != fresh:
            diffs.extend(difflib.unified_diff(stored, fresh, "stored", "recomputed", lineterm="", n=1))
    if diffs:
        print(f"{report_path}: MISMATCH")
        for line in diffs:
            print(f"  {line}")
        return EXIT_ERROR
    print(f"{report_path}: OK")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="coarse-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a TOML config and write reports")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (default: output.dir or out/<name>)")
    p_run.add_argument("--threads", type=int, default=None, help="worker cap (recorded; runs are sequential)")
    p_ver = sub.add_parser("verify", help="re-evaluate a report against its serialized space and combing")
    p_ver.add_argument("report")
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            if args.threads is not None and args.threads < 1:
                parser.error("--threads must be positive")
            return run(args.config, args.out, args.threads)
        return verify(args.report)
    except (CoarseLabError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
