"""Raster image of a gesture and the planar geometry built on top of it.

Pixel coordinates are ``(x, y)`` = ``(column, row)`` with y pointing down.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateHull, DegenerateShape, EmptyImage

DEFAULT_SIZE = 256
DEFAULT_STROKE = 3
DEFAULT_CONTOUR_POINTS = 128
MARGIN = 0.10

# Moore neighbourhood, clockwise on screen starting west.
_MOORE = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_MOORE_INDEX = {d: i for i, d in enumerate(_MOORE)}


@dataclass(frozen=True, eq=False)
class ShapeImage:
    pixels: np.ndarray  # (size, size) bool, indexed [row, col]
    stroke_width: int = DEFAULT_STROKE

    @property
    def size(self) -> int:
        return self.pixels.shape[0]

    def coords(self) -> np.ndarray:
        """``(n, 2)`` float array of stroke pixel ``(x, y)`` positions."""
        rows, cols = np.nonzero(self.pixels)
        return np.column_stack([cols, rows]).astype(float)

    def __eq__(self, other):
        if not isinstance(other, ShapeImage):
            return NotImplemented
        return (self.stroke_width == other.stroke_width
                and np.array_equal(self.pixels, other.pixels))


def _footprint(width: int) -> list[tuple[int, int]]:
    r = (width - 1) / 2.0
    offs = []
    for i in range(width):
        for j in range(width):
            fx, fy = i - r, j - r
            if fx * fx + fy * fy <= r * r + r:
                offs.append((i - width // 2, j - width // 2))
    return offs


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Integer pixels on the segment from (x0, y0) to (x1, y1), inclusive."""
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    while True:
        out.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return out
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def draw_polylines(polys, size: int, stroke_width: int = DEFAULT_STROKE) -> ShapeImage:
    """Draw polylines already expressed in pixel coordinates."""
    grid = np.zeros((size, size), dtype=bool)
    line = []
    for poly in polys:
        ipts = np.rint(np.asarray(poly, dtype=float)).astype(int)
        if len(ipts) == 1:
            line.append(tuple(ipts[0]))
        for (x0, y0), (x1, y1) in zip(ipts[:-1], ipts[1:]):
            line.extend(bresenham(int(x0), int(y0), int(x1), int(y1)))
    if not line:
        return ShapeImage(grid, stroke_width)
    core = np.unique(np.asarray(line, dtype=int), axis=0)
    for dx, dy in _footprint(stroke_width):
        x = core[:, 0] + dx
        y = core[:, 1] + dy
        ok = (x >= 0) & (x < size) & (y >= 0) & (y < size)
        grid[y[ok], x[ok]] = True
    return ShapeImage(grid, stroke_width)


def fit_to_raster(polys, size: int) -> list[np.ndarray]:
    """Map normalized polylines so their bounding square fills the central 80%."""
    polys = [np.asarray(p, dtype=float).reshape(-1, 2) for p in polys]
    allpts = np.concatenate(polys)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    side = float((hi - lo).max())
    if side <= 0.0:
        raise DegenerateShape("fewer than 2 distinct points to rasterize")
    scale = (1.0 - 2 * MARGIN) * (size - 1) / side
    mid = (lo + hi) / 2.0
    half = (size - 1) / 2.0
    return [(p - mid) * scale + half for p in polys]


def rasterize(polys, size: int = DEFAULT_SIZE, stroke_width: int = DEFAULT_STROKE) -> ShapeImage:
    if size < 32:
        raise ValueError("raster size must be at least 32")
    if stroke_width < 1:
        raise ValueError("stroke width must be at least 1")
    return draw_polylines(fit_to_raster(polys, size), size, stroke_width)


def largest_component(img: ShapeImage) -> np.ndarray:
    """Boolean mask of the largest 8-connected stroke component."""
    labels, n = ndimage.label(img.pixels, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        raise EmptyImage("image has no stroke pixels")
    counts = np.bincount(labels.ravel())
    counts[0] = 0
    return labels == int(np.argmax(counts))


def trace_contour(img: ShapeImage) -> np.ndarray:
    """Outer boundary of the largest component by Moore-neighbour tracing.

    Uses Jacob's stopping criterion: tracing ends when the start pixel is
    re-entered from the same side it was first entered. The traversal is
    clockwise on screen, which is a positive signed area for ``x + jy``.
    Returns an ``(n, 2)`` int array of ``(x, y)`` pixels.
    """
    mask = np.pad(largest_component(img), 1)
    rows, cols = np.nonzero(mask)
    # raster-scan first pixel: its west neighbour is guaranteed background
    start = (int(cols[0]), int(rows[0]))
    start_dir = 0
    p, d = start, start_dir
    contour = [start]
    limit = 4 * int(mask.sum()) + 8
    for _ in range(limit):
        for k in range(1, 9):
            idx = (d + k) % 8
            ox, oy = _MOORE[idx]
            q = (p[0] + ox, p[1] + oy)
            if mask[q[1], q[0]]:
                break
        else:
            break  # isolated pixel
        bx, by = _MOORE[(idx - 1) % 8]
        back = (p[0] + bx - q[0], p[1] + by - q[1])
        p, d = q, _MOORE_INDEX[back]
        if p == start and d == start_dir:
            break
        contour.append(p)
    return np.asarray(contour, dtype=int) - 1


def signed_area(poly) -> float:
    pts = np.asarray(poly, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def resample_contour(contour, n: int = DEFAULT_CONTOUR_POINTS) -> np.ndarray:
    """Arc-length uniform resampling of a closed contour to ``n`` points.

    Sampling starts at the contour point nearest the image origin.
    """
    if n < 8:
        raise ValueError("resample needs n >= 8")
    pts = np.asarray(contour, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyImage("empty contour")
    first = int(np.argmin((pts ** 2).sum(axis=1)))
    pts = np.roll(pts, -first, axis=0)
    closed = np.vstack([pts, pts[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        return np.repeat(pts[:1], n, axis=0)
    s = np.arange(n) * (total / n)
    x = np.interp(s, cum, closed[:, 0])
    y = np.interp(s, cum, closed[:, 1])
    return np.column_stack([x, y])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain; strictly convex vertices, positive orientation."""
    pts = sorted({(float(x), float(y)) for x, y in np.asarray(points, dtype=float).reshape(-1, 2)})
    if len(pts) < 3:
        raise DegenerateHull("need at least 3 distinct points")
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHull("points are collinear")
    return np.asarray(hull)


def polygon_area_perimeter(poly) -> tuple[float, float]:
    pts = np.asarray(poly, dtype=float)
    if len(pts) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    closed = np.vstack([pts, pts[:1]])
    perimeter = float(np.hypot(*np.diff(closed, axis=0).T).sum())
    return abs(signed_area(pts)), perimeter


def to_pbm(img: ShapeImage) -> bytes:
    """Binary PBM (P4); stroke pixels are 1."""
    h, w = img.pixels.shape
    return b"P4\n%d %d\n" % (w, h) + np.packbits(img.pixels, axis=1).tobytes()


def to_pgm(img: ShapeImage) -> bytes:
    """Plain PGM (P2); stroke 255 on background 0."""
    h, w = img.pixels.shape
    rows = [" ".join("255" if v else "0" for v in row) for row in img.pixels]
    return ("P2\n%d %d\n255\n" % (w, h) + "\n".join(rows) + "\n").encode("ascii")


def from_pbm(data: bytes) -> ShapeImage:
    tokens = data.split(maxsplit=3)
    if len(tokens) < 4 or tokens[0] != b"P4":
        raise ValueError("not a binary PBM")
    w, h = int(tokens[1]), int(tokens[2])
    body = data[len(data) - h * ((w + 7) // 8):]
    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8).reshape(h, -1), axis=1)
    return ShapeImage(bits[:, :w].astype(bool))
