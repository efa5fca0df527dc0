"""Seeded synthetic variations of a demonstration.

Randomness comes from NumPy's Philox4x64 counter-based generator keyed by
``SeedSequence([seed, k])`` so sample ``k`` can be regenerated on its own,
in any order, on any platform. Draw order inside :func:`augment` is fixed:
rotation, scale, frame-count factor, warp amplitude, positional noise,
idle-keypoint jitter.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .language import DEFAULT_SALIENCE_ALPHA, select_salient
from .trajectory import GestureTrajectory, KeypointFrame, normalize, torso_center

_SNAP = 1e-9


@dataclass(frozen=True)
class AugmentConfig:
    seed: int = 0
    rotation_deg: float = 10.0
    scale_range: tuple[float, float] = (0.85, 1.15)
    noise_sigma: float = 0.02
    time_warp: float = 0.15
    jitter_sigma: float = 0.01

    def __post_init__(self):
        lo, hi = self.scale_range
        if not 0 < lo <= hi:
            raise ValueError("scale_range must satisfy 0 < lo <= hi")
        if self.rotation_deg < 0 or self.noise_sigma < 0 or self.jitter_sigma < 0:
            raise ValueError("rotation and sigmas must be non-negative")
        # a*sin(pi*s) stays monotone only while a*pi < 1
        if not 0 <= self.time_warp < 0.3:
            raise ValueError("time_warp must be in [0, 0.3)")

    @classmethod
    def identity(cls, seed: int = 0) -> "AugmentConfig":
        return cls(seed=seed, rotation_deg=0.0, scale_range=(1.0, 1.0),
                   noise_sigma=0.0, time_warp=0.0, jitter_sigma=0.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scale_range"] = list(self.scale_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentConfig":
        d = dict(d)
        if "scale_range" in d:
            d["scale_range"] = tuple(d["scale_range"])
        return cls(**d)


def rng_for(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, k])))


def _as_array(traj: GestureTrajectory, ids) -> np.ndarray:
    arr = np.full((len(traj), len(ids), 2), np.nan)
    for i, f in enumerate(traj.frames):
        for j, kid in enumerate(ids):
            if kid in f.keypoints:
                arr[i, j] = f.keypoints[kid]
    return arr


def augment(traj: GestureTrajectory, cfg: AugmentConfig, k: int) -> GestureTrajectory:
    """Sample ``k`` of the augmentation family of ``traj`` (deterministic)."""
    if k < 0:
        raise ValueError("sample index must be non-negative")
    rng = rng_for(cfg.seed, k)
    ids = sorted(traj.keypoint_ids)
    salient = set(select_salient(normalize(traj), DEFAULT_SALIENCE_ALPHA))

    angle = math.radians(rng.uniform(-cfg.rotation_deg, cfg.rotation_deg))
    scale = rng.uniform(*cfg.scale_range)
    count_factor = rng.uniform(1.0 - cfg.time_warp, 1.0 + cfg.time_warp)
    warp = rng.uniform(-cfg.time_warp, cfg.time_warp)

    src = _as_array(traj, ids)
    n = len(traj)
    n_out = max(2, int(round(n * count_factor)))
    identity_time = n_out == n and warp == 0.0
    if identity_time:
        out = src.copy()
        times = [f.t for f in traj.frames]
    else:
        s = np.linspace(0.0, 1.0, n_out)
        pos = (s + warp * np.sin(np.pi * s)) * (n - 1)
        snapped = np.rint(pos)
        pos = np.where(np.abs(pos - snapped) < _SNAP, snapped, pos)
        lo = np.floor(pos).astype(int)
        hi = np.minimum(lo + 1, n - 1)
        w = (pos - lo)[:, None, None]
        out = src[lo] * (1.0 - w) + src[hi] * w
        # a keypoint missing from either neighbour stays missing (nan)
        t0, t1 = traj.frames[0].t, traj.frames[-1].t
        times = list(np.linspace(t0, t1, n_out))

    # similarity about the mean torso position: p' = A p + (c - A c)
    pivot = np.mean([torso_center(f) for f in traj.frames], axis=0)
    c, sn = math.cos(angle), math.sin(angle)
    a = scale * np.array([[c, -sn], [sn, c]])
    offset = pivot - a @ pivot
    out = out @ a.T + offset

    sal_tracks = [traj.track(kid) for kid in ids if kid in salient]
    extent = max(float(np.ptp(t, axis=0).max()) for t in sal_tracks)
    out = out + rng.normal(0.0, cfg.noise_sigma * extent, size=out.shape)
    idle = np.array([kid not in salient for kid in ids])
    jitter = rng.normal(0.0, cfg.jitter_sigma * extent, size=out.shape)
    out = out + jitter * idle[None, :, None]

    frames = []
    for i in range(len(out)):
        kp = {kid: (float(out[i, j, 0]), float(out[i, j, 1]))
              for j, kid in enumerate(ids) if not np.isnan(out[i, j, 0])}
        frames.append(KeypointFrame(float(times[i]), kp))
    return GestureTrajectory(frames)


def make_dataset(demos: dict, n_per_label: int, cfg: AugmentConfig) -> list:
    """``n_per_label`` augmented samples per label as ``(trajectory, label)`` pairs.

    Sample indices run consecutively over labels in dict order, so the
    dataset is a pure function of (seed, labels, n).
    """
    if n_per_label < 1:
        raise ValueError("n_per_label must be >= 1")
    out = []
    k = 0
    for label, traj in demos.items():
        for _ in range(n_per_label):
            out.append((augment(traj, cfg, k), label))
            k += 1
    return out
