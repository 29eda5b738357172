"""Write experiment results to disk: CSV tables, a JSON verdict and PNG figures."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .experiments import ExperimentResult, Figure

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.marker": "o",
    "lines.markersize": 4,
    "font.size": 9,
}


def sanitize(obj):
    """Convert numpy scalars/arrays and complex numbers to JSON-compatible values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": sanitize(float(obj.real)), "im": sanitize(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def render_csv(columns: list, rows: list) -> str:
    """CSV text with ``%.17g`` floats; complex cells must be split beforehand."""
    lines = [",".join(columns)]
    for row in rows:
        if any(isinstance(c, (complex, np.complexfloating)) for c in row):
            raise TypeError("complex cell in CSV row; split into re/im columns")
        lines.append(",".join(_cell(c) for c in row))
    return "\n".join(lines) + "\n"


def verdict(result: ExperimentResult) -> dict:
    return sanitize({"experiment": result.experiment, "pass": result.passed,
                     "metrics": result.metrics, "guards": result.guards,
                     "anchor": result.anchor})


def render_figure(fig: Figure, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context(STYLE):
        f, ax = plt.subplots()
        for s in fig.series:
            y = np.asarray(s.y, dtype=float)
            if fig.logy:
                y = np.where(y > 0, y, np.nan)
            ax.plot(s.x, y, label=s.label)
        for h in fig.hlines:
            ax.axhline(h, color="grey", linestyle="--", linewidth=0.8, marker="")
        if fig.logx:
            ax.set_xscale("log")
        if fig.logy:
            ax.set_yscale("log")
        ax.set_title(fig.title)
        ax.set_xlabel(fig.xlabel)
        ax.set_ylabel(fig.ylabel)
        ax.legend()
        f.tight_layout()
        f.savefig(path, metadata={"Software": None})
        plt.close(f)


def write_report(result: ExperimentResult, out_dir, figures: bool = True) -> list[Path]:
    """Write every output of ``result`` under ``out_dir``; return the paths written.

    Files: ``<table>.csv`` per table, ``verdict.json`` and ``<figure>.png``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in result.tables.items():
        p = out / f"{name}.csv"
        p.write_text(render_csv(table.columns, table.rows))
        written.append(p)
    p = out / "verdict.json"
    p.write_text(json.dumps(verdict(result), indent=2, sort_keys=True) + "\n")
    written.append(p)
    if figures:
        for fig in result.figures:
            p = out / f"{fig.name}.png"
            render_figure(fig, p)
            written.append(p)
    return written


__all__ = ["sanitize", "render_csv", "verdict", "render_figure", "write_report"]
