"""Golden-trace regression: stored CSVs for every preset, compared byte for byte."""

from __future__ import annotations

import difflib
import os
from pathlib import Path

from .export import table_csv, trace_csv
from .presets import PRESETS, run_preset

GOLDEN_ENV = "ODT_SIM_GOLDEN_DIR"


def golden_dir(default=None) -> Path:
    d = os.environ.get(GOLDEN_ENV) or default
    if d is None:
        raise RuntimeError(f"set {GOLDEN_ENV} to the golden trace directory")
    return Path(d)


def preset_csvs(name: str, seed: int | None = None) -> dict[str, str]:
    """CSV text for each run and table of a preset, keyed by file name."""
    res = run_preset(name, seed)
    out = {f"{name}__{key}.csv": trace_csv(tr) for key, tr in res.runs.items()}
    out.update({f"{name}__{key}.csv": table_csv(rows) for key, rows in res.tables.items()})
    return out


def write_goldens(directory, presets=PRESETS) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in presets:
        for fname, text in preset_csvs(name).items():
            p = directory / fname
            p.write_text(text, encoding="utf-8")
            written.append(p)
    return written


def compare_goldens(directory, presets=PRESETS) -> list[str]:
    """Differences against stored goldens; empty when everything matches."""
    directory = Path(directory)
    problems = []
    for name in presets:
        for fname, text in preset_csvs(name).items():
            p = directory / fname
            if not p.exists():
                problems.append(f"{fname}: missing golden")
                continue
            stored = p.read_text(encoding="utf-8")
            if stored != text:
                diff = difflib.unified_diff(stored.splitlines(), text.splitlines(),
                                            "golden", "current", n=0, lineterm="")
                head = "\n".join(list(diff)[:8])
                problems.append(f"{fname}: differs\n{head}")
    return problems


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else golden_dir()
    for p in write_goldens(target):
        print(p)
