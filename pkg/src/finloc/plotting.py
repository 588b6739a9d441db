"""PNG figures for suite reports (matplotlib, non-interactive backend)."""

from __future__ import annotations

import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .randomname import tail_bound  # noqa: E402


def _save(fig: Any, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_property_cases(lines: Sequence[dict[str, Any]], path: Path) -> Path:
    """One bar per property: number of cases, green when it passed."""
    rows = [r for r in lines if not r.get("summary")]
    fig, ax = plt.subplots(figsize=(7, 0.4 * len(rows) + 1.5))
    names = [f"{r['suite']}:{r['property']}" for r in rows]
    cases = [max(r["cases"], 1) for r in rows]
    colors = ["tab:green" if r["pass"] else "tab:red" for r in rows]
    ax.barh(range(len(rows)), cases, color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("cases checked")
    ax.invert_yaxis()
    return _save(fig, path)


def plot_tail(m_max: int, R_max: int, path: Path) -> Path:
    """How far the exact partial sums stay below the closed-form tail bound."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for m in range(0, m_max + 1, max(1, m_max // 4)):
        bound = tail_bound(m)
        s = Fraction(0)
        xs, ys = [], []
        for R in range(m, R_max + 1):
            s += Fraction(2 ** (R * R), 2 ** ((R + 1) ** 2))
            xs.append(R)
            ys.append(math.log2(bound - s))
        ax.plot(xs, ys, lw=1.2, marker=".", ms=3, label=f"m={m}")
    ax.set_xlabel("R")
    ax.set_ylabel("log2(bound - partial sum)")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_monte_carlo(detail: dict[str, Any], path: Path) -> Path:
    """Empirical failure rate with a 3 sigma band around the exact value."""
    names = sorted(detail)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for i, name in enumerate(names):
        d = detail[name]
        exact = d["exact"]["num"] / d["exact"]["den"]
        ax.errorbar(i, exact, yerr=3 * d["sigma"], fmt="o", color="tab:blue", capsize=6)
        ax.plot(i, d["rate"], "x", color="tab:red", ms=9)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names)
    ax.set_xlim(-0.5, len(names) - 0.5)
    ax.set_ylabel("failure probability (o exact, x sampled)")
    return _save(fig, path)


def render_figures(lines: Sequence[dict[str, Any]], directory: str | Path, tail_range: tuple[int, int] = (16, 40)) -> list[Path]:
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [plot_property_cases(lines, out_dir / "properties.png")]
    for r in lines:
        if r.get("property") == "partial_sums_below_bound":
            paths.append(plot_tail(tail_range[0], tail_range[1], out_dir / "tail_bound.png"))
        if r.get("property") == "monte_carlo_vs_exact" and r.get("detail"):
            paths.append(plot_monte_carlo(r["detail"], out_dir / "monte_carlo.png"))
    return paths
