"""The four scalar shape metrics used as secondary voters.

Aspect ratio and path complexity are measured on the (simplified)
normalized polylines, solidity and circularity on the traced outer contour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, astuple

import numpy as np

from .errors import DegenerateShape
from .shape import convex_hull, polygon_area_perimeter

_CLAMP = 1e-6
CIRCULARITY_CAP = 1.1


@dataclass(frozen=True)
class SecondaryMetrics:
    aspect_ratio: float
    solidity: float
    circularity: float
    path_complexity: float

    def astuple(self):
        return astuple(self)


def _box(polys) -> tuple[float, float]:
    pts = np.concatenate([np.asarray(p, dtype=float).reshape(-1, 2) for p in polys])
    w, h = np.ptp(pts, axis=0)
    if w == 0.0 and h == 0.0:
        raise DegenerateShape("all points coincide")
    # near-flat strokes (e.g. a horizontal line) get a floored side
    return max(w, _CLAMP * h), max(h, _CLAMP * w)


def aspect_ratio(polys) -> float:
    w, h = _box(polys)
    return float(w / h)


def path_complexity(polys) -> float:
    """Total stroke length over bounding-box perimeter."""
    w, h = _box(polys)
    length = sum(float(np.hypot(*np.diff(np.asarray(p, dtype=float), axis=0).T).sum())
                 for p in polys)
    return float(length / (2.0 * (w + h)))


def convex_solidity(contour) -> float:
    area, _ = polygon_area_perimeter(contour)
    hull_area, _ = polygon_area_perimeter(convex_hull(contour))
    return area / hull_area


def circularity(contour) -> float:
    area, perimeter = polygon_area_perimeter(contour)
    if area <= 0.0 or perimeter <= 0.0:
        raise DegenerateShape("contour encloses no area")
    return min(max(4.0 * math.pi * area / perimeter ** 2, 0.0), CIRCULARITY_CAP)


def secondary_metrics(polys, contour) -> SecondaryMetrics:
    return SecondaryMetrics(
        aspect_ratio=aspect_ratio(polys),
        solidity=convex_solidity(contour),
        circularity=circularity(contour),
        path_complexity=path_complexity(polys),
    )
