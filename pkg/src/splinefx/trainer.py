"""Fully-online training loop, metrics, and the operation-count model.

The protocol is strictly prequential: at each step the model predicts on
x_t, the prediction is recorded, the target is revealed, and exactly one
in-place update runs. No batching, no replay. Cumulative regret is the
running sum of instantaneous losses.

OpCounter tallies parameter-gradient multiplies: d_in*d_out per dense
layer and d_in*d_out*s per spline layer and sample, which makes the
update-cost ratio s/(G+s) an exact rational under equal parameter budgets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .streams import StreamSample

__all__ = [
    "OpCounter",
    "RunLog",
    "run_online",
    "running_accuracy",
    "update_cost_ratio",
    "sweep",
    "STEP_CSV_HEADER",
    "SUMMARY_CSV_HEADER",
]

STEP_CSV_HEADER = ["t", "loss", "cum_regret", "pred", "correct", "run_acc"]
SUMMARY_CSV_HEADER = ["run_id", "model", "N", "G", "s", "W", "I", "lr", "seed",
                      "final_regret", "final_acc", "fwd_ops", "upd_ops"]


@dataclass
class OpCounter:
    """Monotone tallies of scalar multiplies, per model."""

    forward_mults: int = 0
    update_mults: int = 0
    backward_mults: int = 0

    def reset(self) -> None:
        self.forward_mults = 0
        self.update_mults = 0
        self.backward_mults = 0


@dataclass
class RunLog:
    meta: dict
    t: np.ndarray
    loss: np.ndarray
    cum_regret: np.ndarray
    pred: np.ndarray
    correct: np.ndarray
    run_acc: np.ndarray

    @property
    def final_regret(self) -> float:
        return float(self.cum_regret[-1])

    @property
    def final_acc(self) -> float:
        return float(self.run_acc[-1])

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(STEP_CSV_HEADER)
            for i in range(len(self.t)):
                w.writerow([int(self.t[i]), repr(float(self.loss[i])),
                            repr(float(self.cum_regret[i])), repr(float(self.pred[i])),
                            int(self.correct[i]), repr(float(self.run_acc[i]))])

    def summary_row(self) -> list:
        m = self.meta
        return [m.get("run_id", ""), m.get("model", ""), m.get("N", ""),
                m.get("G", ""), m.get("s", ""), m.get("W", ""), m.get("I", ""),
                m.get("lr", ""), m.get("seed", ""),
                repr(self.final_regret), repr(self.final_acc),
                m.get("fwd_ops", ""), m.get("upd_ops", "")]


def running_accuracy(correct: np.ndarray, window: int | None = None) -> np.ndarray:
    """Running mean of the correctness flags.

    window=None gives the cumulative mean; a finite window gives a sliding
    mean once the window has filled (cumulative during warmup).
    """
    c = np.asarray(correct, dtype=np.float64)
    csum = np.cumsum(c)
    counts = np.arange(1, len(c) + 1, dtype=np.float64)
    out = csum / counts
    if window is not None and window < len(c):
        shifted = np.concatenate([np.zeros(window), csum[:-window]])
        tail = (csum - shifted) / window
        out[window:] = tail[window:]
    return out


def run_online(model, stream: Iterable[StreamSample] | Iterator[StreamSample],
               lr: float, T: int, window: int | None = None,
               meta: dict | None = None, log_sink: str | Path | None = None,
               freeze_after: int | None = None) -> RunLog:
    """Drive T prequential steps of `model` over `stream`.

    `freeze_after=k` stops parameter updates from step k on (the
    frozen-baseline protocol); predictions and metrics are still recorded.
    """
    from .model import loss_and_grad  # local: trainer stays import-light

    lrs = model.prepare_lr(lr)
    loss_a = np.zeros(T)
    pred_a = np.zeros(T)
    correct_a = np.zeros(T, dtype=np.int64)
    it = iter(stream)
    for step in range(T):
        try:
            sample = next(it)
        except StopIteration:
            raise ValueError(f"stream exhausted at step {step} (< T={T})") from None
        if freeze_after is not None and step >= freeze_after:
            y_hat = model.predict(sample.x)
            pred, correct = model.summarize(y_hat, sample.target)
            loss, _ = loss_and_grad(model.loss_kind, y_hat, sample.target)
        else:
            loss, pred, correct = model.train_step(sample.x, sample.target, lrs)
        loss_a[step] = loss
        pred_a[step] = pred
        correct_a[step] = 0 if correct is None else int(correct)
    regret = np.cumsum(loss_a)
    if model.task == "regression":
        acc = np.zeros(T)
    else:
        acc = running_accuracy(correct_a, window)
    meta = dict(meta or {})
    meta.setdefault("model", model.descriptor)
    meta.setdefault("N", model.param_count())
    meta.setdefault("lr", lr)
    meta["fwd_ops"] = model.counter.forward_mults
    meta["upd_ops"] = model.counter.update_mults
    log = RunLog(meta=meta, t=np.arange(T), loss=loss_a, cum_regret=regret,
                 pred=pred_a, correct=correct_a, run_acc=acc)
    if log_sink is not None:
        log.write_csv(log_sink)
    return log


def update_cost_ratio(kan_model, mlp_model, probe_samples: int = 8) -> Fraction:
    """Measured per-sample update-multiply ratio between budget-matched models.

    Feeds `probe_samples` random in-range points through each model
    (forward + update at lr=0 so parameters stay put) and returns the exact
    rational update_mults_KAN / update_mults_MLP.
    """
    if probe_samples < 1:
        raise ValueError("need at least one probe sample")
    if kan_model.param_count() != mlp_model.param_count():
        raise ValueError(
            f"models are not budget-matched: {kan_model.param_count()} vs "
            f"{mlp_model.param_count()} parameters")
    rng = np.random.default_rng(12345)
    counts = []
    for m in (kan_model, mlp_model):
        m.counter.reset()
        lrs = m.prepare_lr(0.0)
        for _ in range(probe_samples):
            x = rng.uniform(-1.0, 1.0, size=m.d_in)
            target = 0 if m.task == "multiclass" else np.zeros(m.d_out)
            m.train_step(x, target, lrs)
        counts.append(m.counter.update_mults)
    return Fraction(counts[0], counts[1])


def write_summary_csv(path: str | Path, logs: list[RunLog]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_CSV_HEADER)
        for log in logs:
            w.writerow(log.summary_row())


def sweep(config, jobs: int = 1) -> list[RunLog]:
    """Expand a config's sweep axes and run every cell.

    Cells are independent; jobs > 1 fans them out over processes. Returns
    the logs in cell order regardless of scheduling.
    """
    from .config import expand_sweep, run_experiment  # lazy: config builds on model/trainer

    cells = expand_sweep(config)
    if jobs <= 1:
        return [run_experiment(c) for c in cells]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_experiment, cells))
