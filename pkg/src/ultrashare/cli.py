"""Command-line front end: run, validate, and sweep scenario files."""

import argparse
import copy
import dataclasses
import json
import re
import sys

from .engine import SimulationError
from .metrics import emit_report, report_rows
from .scenario import ScenarioError, scenario_from_dict
from .workloads import build_system


def _json_default(obj):
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_duration(text: str) -> int:
    """Duration in ns; accepts plain ticks or an s/ms/us/ns suffix."""
    m = re.fullmatch(r"(\d+)\s*(s|ms|us|ns)?", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse duration {text!r}")
    value = int(m.group(1))
    scale = {"s": 10**9, "ms": 10**6, "us": 10**3, "ns": 1, None: 1}[m.group(2)]
    return value * scale


def parse_param_range(text: str) -> tuple[str, list]:
    """Parse 'path=lo..hi[..step]' or 'path=a,b,c' sweep specs."""
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected <path>=<range>")
    path, _, rng = text.partition("=")
    rng = rng.strip()
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)(?:\.\.(-?\d+))?", rng)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        step = int(m.group(3)) if m.group(3) else 1
        if step == 0:
            raise argparse.ArgumentTypeError("step cannot be 0")
        return path.strip(), list(range(lo, hi + (1 if step > 0 else -1), step))
    values = []
    for token in rng.split(","):
        token = token.strip()
        try:
            values.append(json.loads(token))
        except json.JSONDecodeError:
            values.append(token)
    if not values:
        raise argparse.ArgumentTypeError(f"empty sweep range in {text!r}")
    return path.strip(), values


_PATH_PART = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)|\[(\d+)\]")


def set_by_path(doc: dict, path: str, value) -> None:
    """Assign into a nested JSON document by a 'a.b[2].c' style path."""
    parts = []
    for m in _PATH_PART.finditer(path):
        parts.append(m.group(1) if m.group(1) is not None else int(m.group(2)))
    if not parts:
        raise ValueError(f"bad parameter path {path!r}")
    target = doc
    for part in parts[:-1]:
        target = target[part]
    target[parts[-1]] = value


def _load_raw(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _apply_overrides(raw: dict, args) -> dict:
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        raw["mode"] = args.mode
    if getattr(args, "duration", None) is not None:
        raw["duration_ns"] = args.duration
    return raw


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def cmd_run(args) -> int:
    raw = _apply_overrides(_load_raw(args.scenario), args)
    config = scenario_from_dict(raw)
    system = build_system(config, keep_trace=args.trace is not None)
    system.run()
    report = system.report()
    _write(emit_report(report, args.format), args.out)
    if args.trace is not None:
        with open(args.trace, "w") as fh:
            for time, kind, fields in system.collector.trace:
                fh.write(
                    json.dumps({"time": time, "kind": kind, **fields}, default=_json_default)
                    + "\n"
                )
    return 0


def cmd_validate(args) -> int:
    try:
        config = scenario_from_dict(_load_raw(args.scenario))
    except ScenarioError as exc:
        for path, msg in exc.issues:
            print(f"{path or '<root>'}: {msg}", file=sys.stderr)
        return 2
    print(
        f"ok: {config.mode} mode, {config.n_accs} accelerators, "
        f"{len(config.apps)} apps, {config.duration_ns} ns"
    )
    return 0


def cmd_sweep(args) -> int:
    base = _apply_overrides(_load_raw(args.scenario), args)
    path, values = args.param
    rows = [("param", "value", "scope", "id", "metric", "metric_value")]
    structured = []
    for value in values:
        raw = copy.deepcopy(base)
        try:
            set_by_path(raw, path, value)
        except (KeyError, IndexError, TypeError):
            print(f"parameter path {path!r} not found in scenario", file=sys.stderr)
            return 2
        config = scenario_from_dict(raw)
        system = build_system(config)
        system.run()
        report = system.report()
        if args.format == "structured":
            structured.append({"param": path, "value": value, "report": report.to_dict()})
        else:
            for scope, ident, metric, metric_value in report_rows(report)[1:]:
                rows.append((path, value, scope, ident, metric, metric_value))
    if args.format == "structured":
        _write(json.dumps(structured, indent=2, sort_keys=True), args.out)
    else:
        _write("\n".join(",".join(str(c) for c in row) for row in rows), args.out)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultrashare",
        description="Deterministic simulator for FPGA accelerator-sharing controllers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and emit its metrics report")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--seed", type=int, default=None, help="override config seed")
    run.add_argument(
        "--mode",
        choices=("ultrashare", "single-queue", "static"),
        default=None,
        help="override the config's controller mode",
    )
    run.add_argument(
        "--duration", type=parse_duration, default=None, help="override duration (e.g. 50ms)"
    )
    run.add_argument("--out", default=None, help="write the report here instead of stdout")
    run.add_argument(
        "--format",
        choices=("summary-text", "structured", "table-rows"),
        default="summary-text",
    )
    run.add_argument("--trace", default=None, help="dump the full event trace (JSON lines)")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a scenario file and report every problem")
    val.add_argument("--scenario", required=True)
    val.set_defaults(func=cmd_validate)

    sweep = sub.add_parser("sweep", help="run a scenario across a parameter range")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument(
        "--mode", choices=("ultrashare", "single-queue", "static"), default=None
    )
    sweep.add_argument("--duration", type=parse_duration, default=None)
    sweep.add_argument(
        "--param",
        required=True,
        type=parse_param_range,
        help="e.g. apps[0].max_outstanding=1..9 or link.rx_bandwidth=2,4,8",
    )
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--format", choices=("structured", "table-rows"), default="table-rows")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        for path, msg in exc.issues:
            print(f"{path or '<root>'}: {msg}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cannot access {exc.filename or 'file'}: {exc.strerror or exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
