"""Scripted demonstrations: a synthetic upper body drawing each vocabulary shape.

These stand in for recorded pose-estimator output: 3 s at 15 FPS by
default, with per-keypoint Gaussian jitter like a real detector's. The body
sways slowly (torso normalization must cancel it), the drawing wrist
follows the shape with minimum-jerk timing, the elbow follows the wrist at
reduced amplitude and the idle wrist barely moves.
"""
from __future__ import annotations

import numpy as np

from .trajectory import GestureTrajectory, KeypointFrame

SMALL_VOCABULARY = ("circle", "wedge", "three")
LARGE_VOCABULARY = ("circle", "wedge", "three", "infinity", "sweep",
                    "triangle", "square", "line")

FPS = 15.0
DEFAULT_FRAMES = 45
# pose-estimator jitter, as a fraction of the drawing extent
DEFAULT_JITTER = 0.02
IMAGE_SIZE = (640, 480)

_BODY = {
    "nose": (320.0, 110.0),
    "right_shoulder": (280.0, 170.0),
    "left_shoulder": (360.0, 170.0),
    "right_hip": (290.0, 300.0),
    "left_hip": (350.0, 300.0),
    "right_elbow": (255.0, 235.0),
    "left_elbow": (385.0, 235.0),
    "right_wrist": (250.0, 300.0),
    "left_wrist": (390.0, 300.0),
}
_DRAW_CENTER = np.array([190.0, 150.0])
_DRAW_HALF = 70.0
_ELBOW_GAIN = 0.45
_SWEEP_RADIUS = 110.0


def _polyline(*vertices) -> np.ndarray:
    return np.asarray(vertices, dtype=float)


def _arc(center, radius, a0, a1, n=64) -> np.ndarray:
    a = np.linspace(a0, a1, n)
    return np.column_stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)])


def unit_path(name: str) -> np.ndarray:
    """Dense drawing path in unit coordinates (y down, roughly [-1, 1])."""
    if name == "circle":
        a = np.linspace(-np.pi / 2, 3 * np.pi / 2, 181)
        return np.column_stack([np.cos(a), np.sin(a)])
    if name == "wedge":
        return _polyline((-0.8, -1.0), (0.0, 1.0), (0.8, -1.0))
    if name == "three":
        upper = _arc((0.0, -0.5), 0.5, -np.pi / 2, np.pi / 2)
        lower = _arc((0.0, 0.5), 0.5, -np.pi / 2, np.pi / 2)
        return np.vstack([[(-0.45, -1.0)], upper, [(-0.2, 0.0)], lower, [(-0.45, 1.0)]])
    if name == "infinity":
        t = np.linspace(0.0, 2 * np.pi, 181)
        return np.column_stack([np.sin(t), 0.55 * np.sin(2 * t)])
    if name == "triangle":
        return _polyline((0.0, -1.0), (0.9, 0.7), (-0.9, 0.7), (0.0, -1.0))
    if name == "square":
        return _polyline((-1, -1), (1, -1), (1, 1), (-1, 1), (-1, -1))
    if name == "line":
        x = np.linspace(-1.0, 1.0, 41)
        return np.column_stack([x, 0.04 * np.sin(np.pi * (x + 1) / 2)])
    raise KeyError(f"no scripted path for {name!r}")


def _along(path: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Points at arc-length fractions ``s`` in [0, 1] along ``path``."""
    seg = np.hypot(*np.diff(path, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)]) / seg.sum()
    return np.column_stack([np.interp(s, cum, path[:, 0]), np.interp(s, cum, path[:, 1])])


def _progress(n_frames: int, hold: int) -> np.ndarray:
    """Minimum-jerk progress in [0, 1] with ``hold`` still frames at each end."""
    active = n_frames - 2 * hold
    tau = np.linspace(0.0, 1.0, active)
    s = 10 * tau ** 3 - 15 * tau ** 4 + 6 * tau ** 5
    return np.concatenate([np.zeros(hold), s, np.ones(hold)])


def demonstration(name: str, n_frames: int = DEFAULT_FRAMES, fps: float = FPS,
                  t0: float = 0.0, jitter: float = DEFAULT_JITTER) -> GestureTrajectory:
    """A scripted recording of gesture ``name``.

    The jitter is drawn from a generator seeded by the gesture name, so a
    given (name, n_frames, jitter) always produces the same recording.
    """
    if n_frames < 12:
        raise ValueError("need at least 12 frames")
    s = _progress(n_frames, hold=max(2, n_frames // 25))
    t = t0 + np.arange(n_frames) / fps
    sway = np.column_stack([6.0 * np.sin(2 * np.pi * t / 3.1),
                            3.0 * np.sin(2 * np.pi * t / 2.3)])

    wrists = {}
    if name == "sweep":
        # both arms swing up and back down around the shoulders
        phase = np.sin(np.pi * s) * (np.pi / 4)
        rs, ls = np.array(_BODY["right_shoulder"]), np.array(_BODY["left_shoulder"])
        wrists["right_wrist"] = rs + _SWEEP_RADIUS * np.column_stack(
            [np.cos(3 * np.pi / 4 + phase), np.sin(3 * np.pi / 4 + phase)])
        wrists["left_wrist"] = ls + _SWEEP_RADIUS * np.column_stack(
            [np.cos(np.pi / 4 - phase), np.sin(np.pi / 4 - phase)])
    else:
        wrists["right_wrist"] = _DRAW_CENTER + _DRAW_HALF * _along(unit_path(name), s)
        idle = np.array(_BODY["left_wrist"])
        wrists["left_wrist"] = idle + np.column_stack(
            [1.5 * np.sin(2 * np.pi * t / 1.7), 1.0 * np.cos(2 * np.pi * t / 2.9)])

    rng = np.random.Generator(np.random.Philox(sum(map(ord, name))))
    noise = rng.normal(0.0, jitter * 2 * _DRAW_HALF, size=(n_frames, len(_BODY), 2))
    frames = []
    for i in range(n_frames):
        kp = {}
        for kid, base in _BODY.items():
            kp[kid] = np.array(base)
        for side in ("right", "left"):
            wrist = wrists[f"{side}_wrist"][i]
            shoulder = kp[f"{side}_shoulder"]
            kp[f"{side}_wrist"] = wrist
            kp[f"{side}_elbow"] = shoulder + _ELBOW_GAIN * (wrist - shoulder)
        frames.append(KeypointFrame(
            float(t[i]), {k: (float(v[0] + sway[i, 0] + noise[i, j, 0]),
                              float(v[1] + sway[i, 1] + noise[i, j, 1]))
                          for j, (k, v) in enumerate(kp.items())}))
    return GestureTrajectory(frames)


def demonstrations(names=SMALL_VOCABULARY, n_frames: int = DEFAULT_FRAMES,
                   **kw) -> dict[str, GestureTrajectory]:
    return {name: demonstration(name, n_frames, **kw) for name in names}
