"""Command-line front-end: check, classify, dynamics.

Reports are JSON by default and byte-identical across runs on identical
inputs; the timing field therefore carries a deterministic work counter,
never wall-clock time (`--format text` shows elapsed time for humans).
Exit status: 0 success, 1 refutation or contradiction, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import __version__
from .core import ModelError
from .dsl import BuiltModel, Diagnostic, parse_model, validate_model, build_model
from .dynamics import AdvanceCheckFailed, estimate_derivative
from .tasks import (
    Declared,
    Derived,
    LawStatement,
    NullTask,
    Possibility,
    Task,
    check_consistency,
    deductive_closure,
)
from .timers import (
    check_simultaneous_halt,
    check_staggered_halt,
    check_synchrony,
    classify_timers,
    recurrence_horizon,
    validate_null_constructor,
)
from .witnesses import MAX_DEVICE_BUDGET, MAX_SEARCH_STATES, search_impossibility

SCHEMA = "ctm-report/1"
ENV_MODEL_ROOT = "CTM_MODEL_ROOT"

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INPUT = 2


def _resolve(path: str) -> str:
    if os.path.exists(path):
        return path
    root = os.environ.get(ENV_MODEL_ROOT)
    if root:
        candidate = os.path.join(root, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _diag_dict(d: Diagnostic) -> dict:
    return {
        "severity": d.severity,
        "line": d.line,
        "column": d.column,
        "message": d.message,
        "suggestion": d.suggestion,
    }


def _attr_label(attr) -> str:
    return attr.name or "{" + ",".join(sorted(map(str, attr.members))) + "}"


def _task_label(task) -> str:
    if isinstance(task, NullTask):
        return "null"
    return f"{_attr_label(task.input)} -> {_attr_label(task.output)} on {task.substrate.id}"


def _stmt_dict(st: LawStatement) -> dict:
    out = {"task": _task_label(st.task), "status": st.status.value}
    if isinstance(st.provenance, Declared):
        out["provenance"] = {"kind": "declared"}
    else:
        prov: Derived = st.provenance
        out["provenance"] = {
            "kind": "derived",
            "rule": prov.rule,
            "premises": [_stmt_dict(p) for p in prov.premises],
        }
    return out


def _load_file(path: str) -> tuple[BuiltModel | None, list[Diagnostic]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        return None, [Diagnostic("error", 0, 0, f"cannot read {path!r}: {e.strerror}")]
    parsed = parse_model(text)
    if parsed.model is None:
        return None, parsed.diagnostics
    diags = validate_model(parsed.model)
    if any(d.severity == "error" for d in diags):
        return None, diags
    return build_model(parsed.model), diags


def _check_laws(model: BuiltModel, budget: int) -> tuple[list[dict], bool]:
    """Confirm declared laws by exhaustive witness search where feasible."""
    results = []
    refuted = False
    for st in model.laws.statements:
        task = st.task
        entry = {"task": _task_label(task), "declared": st.status.value}
        if isinstance(task, Task) and len(task.substrate.states) <= MAX_SEARCH_STATES:
            res = search_impossibility(task, device_budget=budget)
            entry["candidates"] = res.candidates
            found = res.found
            expected = st.status is Possibility.POSSIBLE
            if found == expected:
                entry["verdict"] = "confirmed"
                entry["detail"] = (
                    "witness found" if found else "no witness over all substrate permutations"
                )
            else:
                entry["verdict"] = "refuted"
                entry["detail"] = (
                    "witness exists for a declared-impossible task"
                    if found
                    else "no witness exists for a declared-possible task"
                )
                refuted = True
        else:
            entry["verdict"] = "skipped"
            entry["detail"] = f"substrate exceeds the {MAX_SEARCH_STATES}-state search cap"
        results.append(entry)
    return results, refuted


def _check_timers(model: BuiltModel, horizon: int | None) -> tuple[list[dict], list[dict], bool]:
    names = sorted(model.timers)
    pair_checks = []
    synchrony = []
    failed = False
    for name in names:
        spec = model.timers[name]
        report = validate_null_constructor(spec, horizon=horizon)
        ok = check_synchrony(spec)
        synchrony.append(
            {
                "timer": name,
                "synchrony_ok": ok,
                "validation_ok": report.passed,
                "recurrence_horizon": recurrence_horizon(spec),
            }
        )
        if not ok or not report.passed:
            failed = True
    for i, n1 in enumerate(names):
        for n2 in names[i + 1 :]:
            a, b = model.timers[n1], model.timers[n2]
            if a.duration == b.duration:
                actual = check_simultaneous_halt(a, b)
                pair_checks.append(
                    {
                        "kind": "co-halt",
                        "pair": [n1, n2],
                        "expected": True,
                        "actual": actual,
                        "ok": actual is True,
                    }
                )
                failed |= actual is not True
            else:
                fast, slow = (a, b) if a.duration < b.duration else (b, a)
                fast_n, slow_n = (n1, n2) if fast is a else (n2, n1)
                staggered = check_staggered_halt(fast, slow)
                cohalt = check_simultaneous_halt(fast, slow)
                pair_checks.append(
                    {
                        "kind": "staggered-halt",
                        "pair": [fast_n, slow_n],
                        "expected": True,
                        "actual": staggered,
                        "ok": staggered is True,
                    }
                )
                pair_checks.append(
                    {
                        "kind": "co-halt",
                        "pair": [fast_n, slow_n],
                        "expected": False,
                        "actual": cohalt,
                        "ok": cohalt is False,
                    }
                )
                failed |= staggered is not True or cohalt is not False
    return pair_checks, synchrony, failed


def cmd_check(args) -> tuple[dict, int]:
    files = []
    status = EXIT_OK
    checks_run = 0
    for path in args.models:
        resolved = _resolve(path)
        model, diags = _load_file(resolved)
        entry: dict = {"path": path, "diagnostics": [_diag_dict(d) for d in diags]}
        if model is None:
            entry["status"] = "input-error"
            files.append(entry)
            status = EXIT_INPUT
            continue
        closed = deductive_closure(model.laws)
        consistency = check_consistency(closed)
        entry["closure_size"] = len(closed.statements)
        entry["contradictions"] = [
            {
                "task": _task_label(c.task),
                "possible": _stmt_dict(c.possible),
                "impossible": _stmt_dict(c.impossible),
            }
            for c in consistency.contradictions
        ]
        null_stmt = next(
            (
                st
                for st in closed.statements
                if isinstance(st.task, NullTask) and st.status is Possibility.POSSIBLE
            ),
            None,
        )
        entry["null_task"] = _stmt_dict(null_stmt) if null_stmt else None
        law_checks, law_refuted = _check_laws(model, args.budget)
        pair_checks, synchrony, timer_failed = _check_timers(model, args.horizon)
        entry["law_checks"] = law_checks
        entry["timer_checks"] = pair_checks
        entry["synchrony"] = synchrony
        checks_run += len(law_checks) + len(pair_checks) + len(synchrony) + 1
        file_bad = bool(consistency.contradictions) or law_refuted or timer_failed
        entry["status"] = "refuted" if file_bad else "ok"
        if file_bad and status != EXIT_INPUT:
            status = EXIT_REFUTED
        files.append(entry)
    report = {"files": files, "timing": {"checks_run": checks_run}}
    return report, status


def cmd_classify(args) -> tuple[dict, int]:
    pool = {}
    diagnostics = []
    status = EXIT_OK
    for path in args.models:
        model, diags = _load_file(_resolve(path))
        diagnostics += [_diag_dict(d) | {"path": path} for d in diags]
        if model is None:
            status = EXIT_INPUT
            continue
        for name, spec in model.timers.items():
            if name in pool:
                diagnostics.append(
                    {
                        "severity": "error",
                        "line": 0,
                        "column": 0,
                        "message": f"timer {name!r} declared in more than one file",
                        "suggestion": None,
                        "path": path,
                    }
                )
                status = EXIT_INPUT
            else:
                pool[name] = spec
        if not model.timers:
            diagnostics.append(
                {
                    "severity": "error",
                    "line": 0,
                    "column": 0,
                    "message": "no timers declared",
                    "suggestion": None,
                    "path": path,
                }
            )
            status = EXIT_INPUT
    report: dict = {"diagnostics": diagnostics}
    if status == EXIT_OK and pool:
        try:
            classes = classify_timers([pool[name] for name in sorted(pool)])
        except ModelError as e:
            report["classes"] = []
            report["timing"] = {"checks_run": 0}
            diagnostics.append(
                {
                    "severity": "error",
                    "line": 0,
                    "column": 0,
                    "message": str(e),
                    "suggestion": None,
                    "path": args.models[0],
                }
            )
            return report, EXIT_INPUT
        report["classes"] = [
            {
                "duration": cls.duration,
                "members": [m.name for m in cls.members],
            }
            for cls in classes
        ]
        report["timing"] = {"checks_run": len(pool) * (len(pool) - 1) // 2}
    else:
        report["classes"] = []
        report["timing"] = {"checks_run": 0}
    return report, status


def cmd_dynamics(args) -> tuple[dict, int]:
    path = args.models[0]
    model, diags = _load_file(_resolve(path))
    report: dict = {"diagnostics": [_diag_dict(d) for d in diags]}
    if model is None:
        return report, EXIT_INPUT
    if args.variable not in model.trajectories:
        report["diagnostics"].append(
            {
                "severity": "error",
                "line": 0,
                "column": 0,
                "message": f"no variable named {args.variable!r} in {path!r}",
                "suggestion": f"declared variables: {sorted(model.trajectories) or 'none'}",
            }
        )
        return report, EXIT_INPUT
    try:
        schedule = [int(s) for s in args.schedule.split(",") if s.strip()]
        at = Fraction(args.at)
    except ValueError as e:
        report["diagnostics"].append(
            {
                "severity": "error",
                "line": 0,
                "column": 0,
                "message": f"bad argument: {e}",
                "suggestion": "schedule is a comma-separated decreasing list, e.g. 8,4,2,1; "
                "--at is a rational like 0 or 3/2",
            }
        )
        return report, EXIT_INPUT
    trajectory = model.trajectories[args.variable]
    by_duration = {}
    for name in sorted(model.timers):
        spec = model.timers[name]
        by_duration.setdefault(spec.duration, spec)
    timers = {d: by_duration[d] for d in schedule if d in by_duration}
    try:
        est = estimate_derivative(
            trajectory,
            at,
            schedule,
            timers=timers if len(timers) == len(schedule) else None,
        )
    except AdvanceCheckFailed as e:
        report["advance_failure"] = {"lam": str(e.lam), "dlam": str(e.dlam)}
        return report, EXIT_REFUTED
    except ModelError as e:
        report["diagnostics"].append(
            {"severity": "error", "line": 0, "column": 0, "message": str(e), "suggestion": None}
        )
        return report, EXIT_INPUT
    residual_max = max(abs(r) for r in est.residuals)
    report.update(
        {
            "variable": args.variable,
            "at": str(est.lam),
            "schedule": list(est.schedule),
            "ratios": list(est.ratios),
            "extrapolated": est.extrapolated,
            "order": est.order,
            "residual_max": residual_max,
            "fit_ok": residual_max <= args.tol,
            "timers_from_model": len(timers) == len(schedule),
            "timing": {"checks_run": len(est.schedule)},
        }
    )
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dlam", "ratio"])
            for d, r in zip(est.schedule, est.ratios):
                writer.writerow([d, repr(r)])
        report["csv"] = args.csv
    return report, EXIT_OK


def _render_text(report: dict, elapsed_ms: float) -> str:
    lines = [f"ctm {report['command']} (engine {report['engine']['version']})"]
    body = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
    lines.append(body)
    lines.append(f"elapsed: {elapsed_ms:.1f} ms")
    lines.append(f"exit: {report['exit_status']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctm", description="Verify task-possibility models, classify timers, recover dynamics."
    )
    parser.add_argument("--version", action="version", version=f"ctm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--budget", type=int, default=1, help="witness-search device budget")
        p.add_argument("--horizon", type=int, default=None, help="static-horizon override")
        p.add_argument("--tol", type=float, default=0.05, help="tolerance for fit checks")

    p_check = sub.add_parser("check", help="closure, consistency, and operational confirmation")
    p_check.add_argument("models", nargs="+")
    common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_classify = sub.add_parser("classify", help="partition declared timers by duration")
    p_classify.add_argument("models", nargs="+")
    common(p_classify)
    p_classify.set_defaults(func=cmd_classify)

    p_dyn = sub.add_parser("dynamics", help="estimate a derivative over a timer schedule")
    p_dyn.add_argument("models", nargs=1)
    p_dyn.add_argument("--variable", required=True)
    p_dyn.add_argument("--at", default="0", help="parameter value λ (default 0)")
    p_dyn.add_argument("--schedule", required=True, help="comma-separated decreasing Δλ list")
    p_dyn.add_argument("--csv", default=None, help="write (Δλ, ratio) rows to this file")
    common(p_dyn)
    p_dyn.set_defaults(func=cmd_dynamics)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    started = time.perf_counter()
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 1 <= args.budget <= MAX_DEVICE_BUDGET:
        parser.error(f"--budget must be in 1..{MAX_DEVICE_BUDGET}")
    report, status = args.func(args)
    report["schema"] = SCHEMA
    report["engine"] = {"name": "ctm", "version": __version__}
    report["command"] = args.command
    report["inputs"] = list(args.models)
    report["options"] = {
        "budget": args.budget,
        "horizon": args.horizon,
        "tol": args.tol,
    }
    report["exit_status"] = status
    if args.format == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        sys.stdout.write(_render_text(report, elapsed_ms))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
