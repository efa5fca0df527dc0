"""Keypoint trajectories and their preprocessing.

A recording is a list of timestamped frames, each mapping keypoint ids to
image-space positions (x right, y down). Preprocessing removes the body's
own translation (per-frame torso subtraction), recentres every keypoint
track on its mean and rescales the whole gesture so the widest track spans
two units. Polylines are plain ``(n, 2)`` float arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateExtent, EmptyPath, MissingTorso

TORSO_IDS = ("left_shoulder", "right_shoulder", "left_hip", "right_hip")

DEFAULT_RDP_EPSILON = 0.02
_MIN_EXTENT = 1e-9


@dataclass(frozen=True)
class KeypointFrame:
    t: float
    keypoints: Mapping[str, tuple[float, float]]
    confidence: Mapping[str, float] | None = None

    def __post_init__(self):
        if not self.t >= 0:
            raise ValueError(f"frame time must be non-negative, got {self.t}")
        for kid, (x, y) in self.keypoints.items():
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"non-finite position for keypoint {kid!r}")


@dataclass(frozen=True)
class GestureTrajectory:
    frames: tuple[KeypointFrame, ...]
    keypoint_ids: frozenset = field(init=False)

    def __init__(self, frames: Iterable[KeypointFrame]):
        frames = tuple(frames)
        if not frames:
            raise ValueError("a trajectory needs at least one frame")
        times = [f.t for f in frames]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("frame timestamps must be sorted ascending")
        object.__setattr__(self, "frames", frames)
        ids = set()
        for f in frames:
            ids.update(f.keypoints)
        object.__setattr__(self, "keypoint_ids", frozenset(ids))

    @property
    def duration(self) -> float:
        return self.frames[-1].t - self.frames[0].t

    def __len__(self):
        return len(self.frames)

    def track(self, kid: str) -> np.ndarray:
        """Positions of one keypoint in frame order, skipping frames without it."""
        pts = [f.keypoints[kid] for f in self.frames if kid in f.keypoints]
        return np.asarray(pts, dtype=float).reshape(-1, 2)


def torso_center(frame: KeypointFrame) -> np.ndarray:
    """Mean of whichever shoulder/hip keypoints are present in ``frame``."""
    pts = [frame.keypoints[k] for k in TORSO_IDS if k in frame.keypoints]
    if not pts:
        raise MissingTorso(f"no torso keypoint in frame at t={frame.t}")
    return np.mean(np.asarray(pts, dtype=float), axis=0)


def normalize(traj: GestureTrajectory) -> GestureTrajectory:
    """Torso-relative, per-keypoint centred, globally rescaled trajectory.

    Every keypoint track ends up with zero mean, and the largest per-axis
    peak-to-peak extent over all tracks becomes 2 so coordinates fall
    roughly in [-1, 1]. Timestamps are untouched.
    """
    centers = np.array([torso_center(f) for f in traj.frames])
    ids = sorted(traj.keypoint_ids)
    col = {kid: j for j, kid in enumerate(ids)}
    raw = np.full((len(traj), len(ids), 2), np.nan)
    for i, frame in enumerate(traj.frames):
        for kid, xy in frame.keypoints.items():
            raw[i, col[kid]] = xy
    rel = raw - centers[:, None, :]
    seen = ~np.isnan(rel[:, :, 0])

    extent = 0.0
    for j in range(len(ids)):
        xy = rel[seen[:, j], j]
        xy -= xy.mean(axis=0)
        rel[seen[:, j], j] = xy
        extent = max(extent, float(np.ptp(xy, axis=0).max()))
    if extent < _MIN_EXTENT:
        raise DegenerateExtent("gesture has no measurable motion")
    out = (rel / (extent / 2.0)).tolist()

    frames = []
    for i, f in enumerate(traj.frames):
        row = out[i]
        kp = {kid: tuple(row[col[kid]]) for kid in f.keypoints}
        frames.append(KeypointFrame(f.t, kp, f.confidence))
    return GestureTrajectory(frames)


def extract_path(traj: GestureTrajectory, ids: Iterable[str]) -> list[np.ndarray]:
    """One polyline per keypoint id, in sorted id order."""
    ids = sorted(set(ids))
    if not ids:
        raise ValueError("at least one keypoint id is required")
    polys = []
    for kid in ids:
        pts = traj.track(kid)
        if len(pts) < 2:
            raise EmptyPath(f"keypoint {kid!r} observed in {len(pts)} frame(s)")
        polys.append(pts)
    return polys


def _segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(*(pts - a).T)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(pts - proj).T)


def rdp_simplify(poly, epsilon: float = DEFAULT_RDP_EPSILON) -> np.ndarray:
    """Ramer-Douglas-Peucker simplification.

    Distances are measured to the chord *segment*, so a closed stroke
    (first point == last point) is handled without a special case and
    every dropped point lies within ``epsilon`` of the simplified chain.
    """
    pts = np.asarray(poly, dtype=float)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if len(pts) < 2:
        raise ValueError("rdp_simplify needs at least 2 points")
    keep = np.zeros(len(pts), dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, len(pts) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        d = _segment_distances(pts[lo + 1:hi], pts[lo], pts[hi])
        j = int(np.argmax(d))
        if d[j] > epsilon:
            mid = lo + 1 + j
            keep[mid] = True
            stack.append((lo, mid))
            stack.append((mid, hi))
    return pts[keep]
