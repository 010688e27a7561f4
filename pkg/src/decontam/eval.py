"""Overlap metrics and report (de)serialization.

CSV layout (a directory):

* ``report.csv``  -- frame, x, y, w, h, gt_x, gt_y, gt_w, gt_h, iou, lost, corrupted, ms
* ``weights.csv`` -- update_index, frame_index, alpha, rho, loss
* ``metrics.csv`` -- one row: op_50, auc, mean_ms_per_frame, frames
* ``config.json`` -- configuration echo

JSON layout: a single document with the same tables as lists.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rect import Rect

THRESHOLDS = np.round(np.linspace(0.0, 1.0, 21), 2)

TRAJECTORY_COLUMNS = ["frame", "x", "y", "w", "h", "gt_x", "gt_y", "gt_w", "gt_h",
                      "iou", "lost", "corrupted", "ms"]
WEIGHT_COLUMNS = ["update_index", "frame_index", "alpha", "rho", "loss"]
METRIC_KEYS = ["op_50", "auc", "mean_ms_per_frame", "frames"]


class ReportError(OSError):
    pass


def iou(a: Rect, b: Rect) -> float:
    iw = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    ih = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    # Edges recomputed from x + w can round past the true extent; clamp.
    return float(min(1.0, inter / (a.area + b.area - inter)))


def _ious(report_or_ious):
    if isinstance(report_or_ious, TrackReport):
        return report_or_ious.ious()
    return np.asarray(report_or_ious, dtype=float)


def overlap_precision(report, threshold: float = 0.5) -> float:
    """Percentage of frames whose IoU strictly exceeds ``threshold``."""
    ious = _ious(report)
    if ious.size == 0:
        raise ValueError("empty report")
    return float(100.0 * np.count_nonzero(ious > threshold) / ious.size)


def success_curve(report, thresholds=THRESHOLDS):
    return [(float(th), overlap_precision(report, th)) for th in thresholds]


def auc(curve) -> float:
    """Trapezoid mean of OP over a uniform threshold grid (endpoints weighted half)."""
    ops = np.array([op for _, op in curve], dtype=float)
    if ops.size < 2:
        raise ValueError("success curve needs at least two points")
    return float((ops.sum() - 0.5 * (ops[0] + ops[-1])) / (ops.size - 1))


@dataclass
class TrackReport:
    trajectory: list
    ground_truth: list
    weight_log: list = field(default_factory=list)
    timing_ms: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    lost: list | None = None
    corruption_labels: list | None = None

    def __post_init__(self):
        if len(self.trajectory) != len(self.ground_truth):
            raise ValueError("trajectory and ground truth differ in length")
        n = len(self.trajectory)
        if self.lost is None:
            self.lost = [False] * n
        if not self.timing_ms:
            self.timing_ms = [0.0] * n

    def __len__(self):
        return len(self.trajectory)

    def ious(self) -> np.ndarray:
        return np.array([iou(a, b) for a, b in zip(self.trajectory, self.ground_truth)])

    def metrics(self) -> dict:
        return {
            "op_50": overlap_precision(self, 0.5),
            "auc": auc(success_curve(self)),
            "mean_ms_per_frame": float(np.mean(self.timing_ms)) if self.timing_ms else 0.0,
            "frames": len(self),
        }

    def weights_at(self, update_index: int):
        """``(frame_index, alpha, rho, loss)`` rows logged at one update."""
        return [r[1:] for r in self.weight_log if r[0] == update_index]

    def final_alpha(self) -> dict:
        """Frame index -> alpha after the last logged update."""
        if not self.weight_log:
            return {}
        last = max(r[0] for r in self.weight_log)
        return {int(f): a for f, a, _, _ in self.weights_at(last)}

    def __eq__(self, other):
        if not isinstance(other, TrackReport):
            return NotImplemented
        return (self.trajectory == other.trajectory and self.ground_truth == other.ground_truth
                and _rows_equal(self.weight_log, other.weight_log)
                and list(self.timing_ms) == list(other.timing_ms)
                and self.config == other.config and list(self.lost) == list(other.lost)
                and self.corruption_labels == other.corruption_labels)


def _rows_equal(a, b):
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if not (x == y or (isinstance(x, float) and np.isnan(x) and np.isnan(y))):
                return False
    return True


def _sorted_weights(rows):
    return sorted((tuple(r) for r in rows), key=lambda r: (r[0], r[1]))


def _trajectory_rows(report):
    ious = report.ious()
    labels = report.corruption_labels
    for i, (r, g) in enumerate(zip(report.trajectory, report.ground_truth)):
        yield [i + 1, r.x, r.y, r.w, r.h, g.x, g.y, g.w, g.h, float(ious[i]),
               int(bool(report.lost[i])), "" if labels is None else int(bool(labels[i])),
               float(report.timing_ms[i])]


def export_report(report: TrackReport, fmt: str, path):
    """Write ``report`` as a CSV directory or a JSON file; returns the written paths."""
    path = Path(path)
    try:
        if fmt == "json":
            path.parent.mkdir(parents=True, exist_ok=True)
            doc = {
                "trajectory": [list(r.as_tuple()) for r in report.trajectory],
                "ground_truth": [list(r.as_tuple()) for r in report.ground_truth],
                "weight_log": [list(r) for r in _sorted_weights(report.weight_log)],
                "timing_ms": list(map(float, report.timing_ms)),
                "lost": [bool(b) for b in report.lost],
                "corruption_labels": (None if report.corruption_labels is None
                                      else [bool(b) for b in report.corruption_labels]),
                "config": report.config,
                "metrics": report.metrics(),
            }
            path.write_text(json.dumps(doc, indent=1))
            return [path]
        if fmt != "csv":
            raise ValueError(f"unknown report format {fmt!r}")
        path.mkdir(parents=True, exist_ok=True)
        with open(path / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRAJECTORY_COLUMNS)
            w.writerows(_trajectory_rows(report))
        with open(path / "weights.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(WEIGHT_COLUMNS)
            w.writerows(_sorted_weights(report.weight_log))
        metrics = report.metrics()
        with open(path / "metrics.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(METRIC_KEYS)
            w.writerow([metrics[k] for k in METRIC_KEYS])
        (path / "config.json").write_text(json.dumps(report.config, indent=1, sort_keys=True))
        return [path / n for n in ("report.csv", "weights.csv", "metrics.csv", "config.json")]
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}: {exc}") from exc


def _num(s: str):
    v = float(s)
    return int(v) if s.lstrip("-").isdigit() else v


def load_report(path) -> TrackReport:
    """Inverse of :func:`export_report` (format picked from the path)."""
    path = Path(path)
    try:
        if path.is_file():
            doc = json.loads(path.read_text())
            return TrackReport(
                [Rect(*r) for r in doc["trajectory"]],
                [Rect(*r) for r in doc["ground_truth"]],
                [(int(r[0]), int(r[1]), float(r[2]), float(r[3]), float(r[4]))
                 for r in doc["weight_log"]],
                [float(v) for v in doc["timing_ms"]],
                doc["config"], [bool(b) for b in doc["lost"]], doc["corruption_labels"])
        with open(path / "report.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        with open(path / "weights.csv", newline="") as fh:
            wrows = list(csv.DictReader(fh))
        config = json.loads((path / "config.json").read_text())
    except OSError as exc:
        raise ReportError(f"cannot read report from {path}: {exc}") from exc
    traj = [Rect(*(_num(r[k]) for k in ("x", "y", "w", "h"))) for r in rows]
    gt = [Rect(*(_num(r[k]) for k in ("gt_x", "gt_y", "gt_w", "gt_h"))) for r in rows]
    labels = None if not rows or rows[0]["corrupted"] == "" else [r["corrupted"] == "1" for r in rows]
    weights = [(int(r["update_index"]), int(r["frame_index"]), float(r["alpha"]),
                float(r["rho"]), float(r["loss"])) for r in wrows]
    return TrackReport(traj, gt, weights, [float(r["ms"]) for r in rows], config,
                       [r["lost"] == "1" for r in rows], labels)
