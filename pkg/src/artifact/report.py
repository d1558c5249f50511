"""CSV and SVG output for survival curves."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sampling import SurvivalCurve, SurvivalPoint  # noqa: E402

CSV_HEADER = "m,p_hat,stderr,n_sequences,seed"

STYLE = {
    "font.size": 9,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.0,
    "lines.markersize": 4,
    "figure.figsize": (4.8, 3.2),
    "svg.hashsalt": "artifact",
    "svg.fonttype": "path",
}


def fmt(x: float) -> str:
    """Positional decimal with 12 significant digits."""
    x = float(x)
    lead = math.floor(math.log10(abs(x))) + 1 if x else 1
    return f"{x:.{max(0, 12 - lead)}f}"


def _rows(curve: SurvivalCurve, prefix: str = "") -> list[str]:
    seed = curve.metadata.get("seed", "")
    return [
        f"{prefix}{pt.m},{fmt(pt.p_hat)},{fmt(pt.stderr)},{pt.n},{seed}" for pt in curve.points
    ]


def emit_csv(curve: SurvivalCurve, path) -> Path:
    if len(curve) == 0:
        raise ValueError("cannot write an empty curve")
    path = Path(path)
    path.write_text("\n".join([CSV_HEADER] + _rows(curve)) + "\n")
    return path


def emit_sweep_csv(curves: dict, param: str, path) -> Path:
    """One block of rows per swept value, with a leading ``param`` column."""
    if not curves or any(len(c) == 0 for c in curves.values()):
        raise ValueError("cannot write an empty sweep")
    lines = [f"{param},{CSV_HEADER}"]
    for value, curve in curves.items():
        lines += _rows(curve, prefix=f"{fmt(value) if isinstance(value, float) else value},")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> SurvivalCurve:
    """Inverse of :func:`emit_csv`."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"{path}: expected header {CSV_HEADER!r}")
    pts, seed = [], ""
    for line in lines[1:]:
        m, p, se, n, seed = line.split(",")
        pts.append(SurvivalPoint(int(m), float(p), float(se), int(n)))
    if not pts:
        raise ValueError(f"{path}: no data rows")
    return SurvivalCurve(pts, {"seed": seed})


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def emit_plot(curve: SurvivalCurve, path, title: str = "", overlays: dict | None = None) -> Path:
    """Survival against sequence length with binomial error bars.

    ``overlays`` maps a legend label to ``(m, values)`` drawn as lines.
    """
    if len(curve) == 0:
        raise ValueError("cannot plot an empty curve")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.errorbar(curve.m, curve.p_hat, yerr=curve.stderr, fmt="o-", capsize=2, label="estimate")
        for label, (m, vals) in (overlays or {}).items():
            ax.plot(m, vals, "--", label=label)
        ax.set_xlabel("sequence length m")
        ax.set_ylabel("survival probability")
        ax.set_ylim(-0.05, 1.05)
        if title:
            ax.set_title(title)
        if overlays:
            ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def emit_sweep_plot(curves: dict, param: str, m: int, path, title: str = "") -> Path:
    """Survival at fixed sequence length ``m`` against the swept parameter."""
    xs = list(curves)
    pts = [curves[x].at(m) for x in xs]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.errorbar(
            [float(x) for x in xs], [p.p_hat for p in pts], yerr=[p.stderr for p in pts],
            fmt="o-", capsize=2,
        )
        ax.set_xlabel(param)
        ax.set_ylabel("survival probability")
        ax.set_ylim(-0.05, 1.05)
        ax.set_title(title or f"sequence length m = {m}")
        fig.tight_layout()
        return _save(fig, path)
