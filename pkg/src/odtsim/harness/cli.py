"""``odt-sim`` command line.

Exit status: 0 on success, 1 for configuration errors (unreadable file,
schema violation, unknown preset), 2 when a run ends in a boundary fault.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..engine import ScenarioConfig, compute_metrics, run
from ..kinematics import RigConfig
from .configio import ConfigError, load_config
from .export import export_metrics, export_trace, table_csv
from .presets import PRESETS, PresetError, envelope_table, run_preset

EXIT_OK, EXIT_CONFIG, EXIT_FAULT = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="odt-sim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_positional: bool):
        if config_positional:
            sp.add_argument("config_path", nargs="?", metavar="CONFIG")
        sp.add_argument("--config", help="scenario JSON file")
        sp.add_argument("--out", default=".", help="output directory (default: .)")
        sp.add_argument("--seed", type=int, help="override the scenario seed")

    common(sub.add_parser("run", help="simulate one scenario"), True)
    sp = sub.add_parser("experiment", help="run a canned experiment")
    sp.add_argument("preset", metavar="PRESET", help=", ".join(PRESETS))
    common(sp, False)
    common(sub.add_parser("check", help="validate a scenario file"), True)
    common(sub.add_parser("envelope", help="print the speed and acceleration envelope"), False)
    return p


def _config_path(args) -> str | None:
    return getattr(args, "config_path", None) or args.config


def _load(args) -> ScenarioConfig:
    path = _config_path(args)
    if path is None:
        raise ConfigError("no config given")
    sc = load_config(path)
    if args.seed is not None:
        sc = sc.replace(seed=args.seed)
    return sc


def _write(trace, out: Path, stem: str) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    export_trace(trace, out / f"{stem}.csv")
    export_metrics(trace, out / f"{stem}.metrics.json")
    return compute_metrics(trace)


def _summary(stem: str, m: dict) -> str:
    def f(v, unit):
        return "n/a" if v is None else f"{v:.4g} {unit}"
    wd = "unbounded" if m["working_delay_unbounded"] else f(m["working_delay"], "s")
    line = (f"{stem}: {m['n_records']} ticks, scene latency {f(m['scene_latency'], 's')}, "
            f"working delay {wd}, VE drift {f(m['ve_drift'], 'm')}")
    if m["fault"]:
        line += f", FAULT at t={m['fault']['t']:.3f} s"
    return line


def _print_table(rows: list[dict]) -> None:
    cells = [[f"{v:.4f}" if isinstance(v, float) else str(v) for v in r.values()] for r in rows]
    keys = list(rows[0])
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    for line in [keys, *cells]:
        print("  ".join(c.rjust(w) for c, w in zip(line, widths)))


def cmd_run(args) -> int:
    sc = _load(args)
    tr = run(sc)
    m = _write(tr, Path(args.out), sc.name)
    print(_summary(sc.name, m))
    return EXIT_FAULT if tr.fault else EXIT_OK


def cmd_experiment(args) -> int:
    res = run_preset(args.preset, args.seed)
    out = Path(args.out)
    status = EXIT_OK
    for key, tr in res.runs.items():
        m = _write(tr, out, key)
        print(_summary(key, m))
        if tr.fault:
            status = EXIT_FAULT
    for tname, rows in res.tables.items():
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.preset}__{tname}.csv").write_text(table_csv(rows))
        _print_table(rows)
    return status


def cmd_check(args) -> int:
    sc = _load(args)
    print(f"{sc.name}: ok")
    return EXIT_OK


def cmd_envelope(args) -> int:
    rig = _load(args).rig if _config_path(args) else RigConfig()
    _print_table(envelope_table(rig))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "experiment": cmd_experiment, "check": cmd_check,
            "envelope": cmd_envelope}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, PresetError) as e:
        msg = e.args[0] if isinstance(e, PresetError) else str(e)
        print(f"odt-sim: error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
