"""Render the standard figure set from splinefx CSV outputs.

Read-only consumers: per-step logs (t,loss,cum_regret,pred,correct,run_acc),
sweep summaries (run_id,model,N,G,s,W,I,lr,seed,final_regret,final_acc,...),
and dense prediction grids (i,q,pred). Aggregation is limited to grouping
and medians over seeds; all model math happens upstream.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "read_step_csv",
    "read_summary_csv",
    "plot_regret",
    "plot_bitwidth_sweep",
    "plot_capacity_sweep",
    "plot_decision_boundary",
    "plot_running_accuracy",
]


def read_step_csv(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"step log not found: {path}")
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty step log")
    return {key: np.array([float(r[key]) for r in rows]) for key in rows[0]}


def read_summary_csv(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"summary not found: {path}")
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty summary")
    return rows


def _label_for(path: Path) -> str:
    return path.parent.name if path.name == "steps.csv" else path.stem


def _save(fig, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_regret(csv_paths: list, out_path: str | Path,
                markers: tuple = (500, 1000), labels: list | None = None):
    """Cumulative regret vs time, one curve per run, with regime markers."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, p in enumerate(csv_paths):
        log = read_step_csv(p)
        label = labels[k] if labels else _label_for(Path(p))
        ax.plot(log["t"], log["cum_regret"], label=label)
    for m in markers:
        ax.axvline(m, color="gray", linestyle="--", linewidth=1)
    ax.set_xlabel("step")
    ax.set_ylabel("cumulative regret")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path), fig


def _grouped_medians(rows: list[dict], x_key: str, y_key: str):
    """model -> sorted (x, median y over seeds) pairs."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r[x_key] == "" or r[y_key] == "":
            continue
        acc[r["model"]][float(r[x_key])].append(float(r[y_key]))
    out = {}
    for model, by_x in acc.items():
        xs = sorted(by_x)
        out[model] = (xs, [float(np.median(by_x[x])) for x in xs])
    return out


def plot_bitwidth_sweep(summary_csv: str | Path, out_path: str | Path):
    """Final regret vs total bitwidth W, median over seeds, per model."""
    rows = read_summary_csv(summary_csv)
    fig, ax = plt.subplots(figsize=(5, 4))
    for model, (xs, ys) in sorted(_grouped_medians(rows, "W", "final_regret").items()):
        ax.plot(xs, ys, marker="o", label=model)
    ax.set_xlabel("total bitwidth W")
    ax.set_ylabel("final cumulative regret")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path), fig


def plot_capacity_sweep(summary_csv: str | Path, out_path: str | Path, axis: str = "G"):
    """Final accuracy vs capacity (grid size G or parameter count N)."""
    if axis not in ("G", "N"):
        raise ValueError(f"axis must be 'G' or 'N', got {axis!r}")
    rows = read_summary_csv(summary_csv)
    fig, ax = plt.subplots(figsize=(5, 4))
    for model, (xs, ys) in sorted(_grouped_medians(rows, axis, "final_acc").items()):
        ax.plot(xs, ys, marker="o", label=model)
    ax.set_xlabel("grid size G" if axis == "G" else "parameter count N")
    ax.set_ylabel("final accuracy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path), fig


def plot_decision_boundary(grid_csv: str | Path, out_path: str | Path):
    """Predicted label over a dense 2-D input grid, boundary at zero."""
    grid_csv = Path(grid_csv)
    if not grid_csv.exists():
        raise FileNotFoundError(f"grid export not found: {grid_csv}")
    with open(grid_csv) as fh:
        rows = list(csv.DictReader(fh))
    iv = np.array([float(r["i"]) for r in rows])
    qv = np.array([float(r["q"]) for r in rows])
    pv = np.array([float(r["pred"]) for r in rows])
    n = int(round(np.sqrt(len(rows))))
    if n * n != len(rows):
        raise ValueError(f"{grid_csv}: expected a square grid, got {len(rows)} points")
    ii = iv.reshape(n, n)
    qq = qv.reshape(n, n)
    pp = pv.reshape(n, n)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.pcolormesh(ii, qq, np.sign(pp), cmap="coolwarm", shading="auto", alpha=0.6)
    ax.contour(ii, qq, pp, levels=[0.0], colors="k", linewidths=1.5)
    ax.set_xlabel("I")
    ax.set_ylabel("Q")
    ax.set_aspect("equal")
    fig.tight_layout()
    return _save(fig, out_path), fig


def plot_running_accuracy(csv_paths: list, out_path: str | Path,
                          labels: list | None = None):
    """Windowed running accuracy vs time, one curve per run."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, p in enumerate(csv_paths):
        log = read_step_csv(p)
        label = labels[k] if labels else _label_for(Path(p))
        ax.plot(log["t"], log["run_acc"], label=label)
    ax.set_xlabel("step")
    ax.set_ylabel("running accuracy")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path), fig
