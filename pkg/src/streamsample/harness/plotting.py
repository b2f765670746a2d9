"""Figures for verification checks and bench series (matplotlib, Agg backend)."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", text).strip("-").lower()[:80]


def plot_check(check, path: Path) -> bool:
    """Render a check that carries plottable data; returns False if it has none."""
    data = check.data
    if not data:
        return False
    fig, ax = plt.subplots(figsize=(7, 3.5))
    if "observed" in data:
        idx = range(len(data["observed"]))
        ax.bar(idx, data["observed"], color="tab:blue", alpha=0.7, label="observed")
        ax.plot(idx, data["expected"], "k_", markersize=12, label="expected")
        if len(data["labels"]) <= 24:
            ax.set_xticks(list(idx), data["labels"], rotation=60, fontsize=7)
        ax.set_ylabel("count")
    else:
        ax.plot(data["x"], data["empirical"], "o", markersize=3, label="empirical")
        ax.plot(data["x"], data["exact"], "-", label="exact")
    verdict = "pass" if check.passed else "FAIL"
    ax.set_title(f"{check.suite}: {check.name} [{verdict}]", fontsize=9)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return True


def plot_checks(checks: Sequence, directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for k, check in enumerate(checks):
        path = directory / f"{k:03d}-{_slug(check.suite)}-{_slug(check.name)}.png"
        if plot_check(check, path):
            written.append(path)
    return written


def plot_bench(rows: Sequence, path: Path, title: str = "") -> Path:
    """Cumulative work and span proxy on the left axis, store size on the right."""
    fig, ax = plt.subplots(figsize=(7, 3.5))
    t = [r.t for r in rows]
    ax.plot(t, [r.work for r in rows], label="work")
    ax.plot(t, [r.span_proxy for r in rows], label="span_proxy")
    ax.set_xlabel("minibatch t")
    ax.set_ylabel("operations (cumulative)")
    ax2 = ax.twinx()
    ax2.plot(t, [r.store_size for r in rows], color="tab:green", alpha=0.6, label="store_size")
    ax2.set_ylabel("store size")
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], fontsize=8, loc="upper left")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
