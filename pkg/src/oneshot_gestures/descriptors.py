"""Primary-voter shape encodings: Hu moments, Zernike moments, Fourier descriptors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (DegenerateContour, EmptyImage, InvalidOrder,
                     LengthMismatch)
from .metrics import SecondaryMetrics, secondary_metrics
from .shape import (DEFAULT_CONTOUR_POINTS, DEFAULT_SIZE, DEFAULT_STROKE,
                    ShapeImage, rasterize, resample_contour, trace_contour)

DEFAULT_ZERNIKE_ORDER = 8
DEFAULT_FOURIER_COEFFS = 16
_LOG_FLOOR = 1e-30


def _coords(img) -> np.ndarray:
    pts = img.coords() if isinstance(img, ShapeImage) else np.asarray(img, dtype=float)
    if len(pts) == 0:
        raise EmptyImage("image has no stroke pixels")
    return pts


def central_moments(img, p: int, q: int) -> float:
    """mu_pq of a binary image (or of an ``(n, 2)`` array of stroke pixels)."""
    pts = _coords(img)
    dx = pts[:, 0] - pts[:, 0].mean()
    dy = pts[:, 1] - pts[:, 1].mean()
    return float(np.sum(dx ** p * dy ** q))


def hu_invariants(img) -> np.ndarray:
    """The seven raw Hu invariants."""
    pts = _coords(img)
    dx = pts[:, 0] - pts[:, 0].mean()
    dy = pts[:, 1] - pts[:, 1].mean()
    m00 = float(len(pts))

    def eta(p, q):
        return float(np.sum(dx ** p * dy ** q)) / m00 ** (1 + (p + q) / 2)

    n20, n02, n11 = eta(2, 0), eta(0, 2), eta(1, 1)
    n30, n03, n21, n12 = eta(3, 0), eta(0, 3), eta(2, 1), eta(1, 2)
    a, b = n30 + n12, n21 + n03
    h1 = n20 + n02
    h2 = (n20 - n02) ** 2 + 4 * n11 ** 2
    h3 = (n30 - 3 * n12) ** 2 + (3 * n21 - n03) ** 2
    h4 = a ** 2 + b ** 2
    h5 = (n30 - 3 * n12) * a * (a ** 2 - 3 * b ** 2) + (3 * n21 - n03) * b * (3 * a ** 2 - b ** 2)
    h6 = (n20 - n02) * (a ** 2 - b ** 2) + 4 * n11 * a * b
    h7 = (3 * n21 - n03) * a * (a ** 2 - 3 * b ** 2) - (n30 - 3 * n12) * b * (3 * a ** 2 - b ** 2)
    return np.array([h1, h2, h3, h4, h5, h6, h7])


def signed_log(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    return np.sign(h) * np.log10(np.abs(h) + _LOG_FLOOR)


def hu_moments(img) -> np.ndarray:
    """Hu invariants in signed-log10 space (7 values)."""
    return signed_log(hu_invariants(img))


@lru_cache(maxsize=None)
def _radial_coefficients(n: int, m: int) -> tuple[tuple[int, int], ...]:
    """(coefficient, power) terms of R_n^m as exact integers."""
    m = abs(m)
    f = math.factorial
    return tuple(
        ((-1) ** s * f(n - s) // (f(s) * f((n + m) // 2 - s) * f((n - m) // 2 - s)), n - 2 * s)
        for s in range((n - m) // 2 + 1)
    )


def _check_order(n: int, m: int):
    if n < 0 or abs(m) > n or (n - abs(m)) % 2:
        raise InvalidOrder(f"invalid Zernike order n={n}, m={m}")


def zernike_radial(n: int, m: int, rho):
    _check_order(n, m)
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    for c, k in _radial_coefficients(n, m):
        out = out + c * rho ** k
    return out if out.ndim else float(out)


def zernike_orders(n_max: int) -> list[tuple[int, int]]:
    return [(n, m) for n in range(n_max + 1) for m in range(n % 2, n + 1, 2)]


def zernike_complex(img, n_max: int = DEFAULT_ZERNIKE_ORDER) -> np.ndarray:
    """Complex Z_n^m for m >= 0, ordered as :func:`zernike_orders`.

    The unit disk is centred on the stroke centroid with radius equal to
    the farthest stroke pixel, so every pixel has rho <= 1.
    """
    if n_max < 0:
        raise InvalidOrder("n_max must be non-negative")
    pts = _coords(img)
    d = pts - pts.mean(axis=0)
    r = np.hypot(d[:, 0], d[:, 1])
    radius = float(r.max())
    if radius == 0.0:
        radius = 1.0  # single pixel sits at the origin
    rho = r / radius
    theta = np.arctan2(d[:, 1], d[:, 0])
    area = 1.0 / radius ** 2
    powers = {k: rho ** k for k in range(n_max + 1)}
    out = []
    for n, m in zernike_orders(n_max):
        radial = sum(c * powers[k] for c, k in _radial_coefficients(n, m))
        z = np.sum(radial * np.exp(-1j * m * theta)) * area * (n + 1) / math.pi
        out.append(z)
    return np.asarray(out, dtype=complex)


def zernike_moments(img, n_max: int = DEFAULT_ZERNIKE_ORDER) -> np.ndarray:
    return np.abs(zernike_complex(img, n_max))


def fourier_descriptors(contour, k: int = DEFAULT_FOURIER_COEFFS) -> np.ndarray:
    """|Z_1..Z_k| / |Z_1| of the DFT of ``x + jy`` along the contour."""
    pts = np.asarray(contour, dtype=float)
    n = len(pts)
    if not 1 <= k <= n // 2:
        raise ValueError(f"need 1 <= k <= {n // 2}, got k={k}")
    spectrum = np.fft.fft(pts[:, 0] + 1j * pts[:, 1])
    mags = np.abs(spectrum[1:k + 1])
    if mags[0] < 1e-12:
        raise DegenerateContour("first harmonic vanishes")
    return mags / mags[0]


def descriptor_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    hu: np.ndarray
    zernike: np.ndarray
    fourier: np.ndarray
    metrics: SecondaryMetrics

    def allclose(self, other: "DescriptorSet", atol: float = 1e-9) -> bool:
        return (np.allclose(self.hu, other.hu, rtol=0, atol=atol)
                and self.zernike.shape == other.zernike.shape
                and np.allclose(self.zernike, other.zernike, rtol=0, atol=atol)
                and self.fourier.shape == other.fourier.shape
                and np.allclose(self.fourier, other.fourier, rtol=0, atol=atol)
                and np.allclose(self.metrics.astuple(), other.metrics.astuple(),
                                rtol=0, atol=atol))

    def __eq__(self, other):
        if not isinstance(other, DescriptorSet):
            return NotImplemented
        return (np.array_equal(self.hu, other.hu)
                and np.array_equal(self.zernike, other.zernike)
                and np.array_equal(self.fourier, other.fourier)
                and self.metrics == other.metrics)

    def to_dict(self) -> dict:
        m = self.metrics
        return {
            "hu": [float(v) for v in self.hu],
            "zernike": [float(v) for v in self.zernike],
            "fourier": [float(v) for v in self.fourier],
            "metrics": {
                "aspect_ratio": m.aspect_ratio,
                "solidity": m.solidity,
                "circularity": m.circularity,
                "path_complexity": m.path_complexity,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DescriptorSet":
        m = d["metrics"]
        return cls(
            hu=np.asarray(d["hu"], dtype=float),
            zernike=np.asarray(d["zernike"], dtype=float),
            fourier=np.asarray(d["fourier"], dtype=float),
            metrics=SecondaryMetrics(
                aspect_ratio=float(m["aspect_ratio"]),
                solidity=float(m["solidity"]),
                circularity=float(m["circularity"]),
                path_complexity=float(m["path_complexity"]),
            ),
        )


def describe(polys, size: int = DEFAULT_SIZE, stroke_width: int = DEFAULT_STROKE,
             n_max: int = DEFAULT_ZERNIKE_ORDER, k: int = DEFAULT_FOURIER_COEFFS,
             contour_points: int = DEFAULT_CONTOUR_POINTS) -> DescriptorSet:
    """Rasterize normalized polylines and compute every voter's feature."""
    img = rasterize(polys, size, stroke_width)
    contour = resample_contour(trace_contour(img), contour_points)
    return DescriptorSet(
        hu=hu_moments(img),
        zernike=zernike_moments(img, n_max),
        fourier=fourier_descriptors(contour, k),
        metrics=secondary_metrics(polys, contour),
    )
