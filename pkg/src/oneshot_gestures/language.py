"""The gesture language: labelled one-shot references and their file format."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .descriptors import DescriptorSet, describe
from .errors import (DegenerateExtent, DuplicateLabel, ParseError,
                     VersionMismatch)
from .shape import DEFAULT_SIZE, DEFAULT_STROKE
from .trajectory import (DEFAULT_RDP_EPSILON, GestureTrajectory, extract_path,
                         normalize, rdp_simplify)

FORMAT_VERSION = 1
DEFAULT_SALIENCE_ALPHA = 0.6
SIG_DIGITS = 9


def quantize(values) -> np.ndarray:
    """Round to the precision used on disk so stored and live values agree."""
    arr = np.asarray(values, dtype=float)
    flat = [float(f"{v:.{SIG_DIGITS}g}") for v in arr.ravel()]
    return np.asarray(flat, dtype=float).reshape(arr.shape)


@dataclass(frozen=True, eq=False)
class ReferenceGesture:
    label: str
    salient_keypoints: tuple[str, ...]
    polylines: dict  # keypoint id -> (n, 2) array
    descriptors: DescriptorSet | None = None

    def polyline_list(self) -> list[np.ndarray]:
        return [self.polylines[k] for k in sorted(self.polylines)]

    def __eq__(self, other):
        if not isinstance(other, ReferenceGesture):
            return NotImplemented
        return (self.label == other.label
                and self.salient_keypoints == other.salient_keypoints
                and self.polylines.keys() == other.polylines.keys()
                and all(np.array_equal(self.polylines[k], other.polylines[k])
                        for k in self.polylines)
                and self.descriptors == other.descriptors)


@dataclass(frozen=True)
class GestureLanguage:
    raster_size: int = DEFAULT_SIZE
    stroke_width: int = DEFAULT_STROKE
    rdp_epsilon: float = DEFAULT_RDP_EPSILON
    salience_alpha: float = DEFAULT_SALIENCE_ALPHA
    gestures: tuple[ReferenceGesture, ...] = field(default_factory=tuple)
    version: int = FORMAT_VERSION

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.gestures]

    def __len__(self):
        return len(self.gestures)

    def __getitem__(self, label: str) -> ReferenceGesture:
        for g in self.gestures:
            if g.label == label:
                return g
        raise KeyError(label)


def select_salient(traj: GestureTrajectory, alpha: float = DEFAULT_SALIENCE_ALPHA) -> list[str]:
    """Keypoints whose peak-to-peak displacement is within ``alpha`` of the largest.

    Expects a normalized trajectory. Sorted by displacement, largest first,
    ties broken by id.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    disp = {}
    for kid in traj.keypoint_ids:
        ptp = np.ptp(traj.track(kid), axis=0)
        disp[kid] = float(np.hypot(ptp[0], ptp[1]))
    top = max(disp.values())
    if top <= 0.0:
        raise DegenerateExtent("no keypoint moves")
    chosen = [k for k, d in disp.items() if d >= alpha * top]
    return sorted(chosen, key=lambda k: (-disp[k], k))


def simplified_paths(traj: GestureTrajectory, ids, epsilon: float) -> list[np.ndarray]:
    """Per-id RDP-simplified, quantized polylines (sorted id order) of a normalized trajectory."""
    return [quantize(rdp_simplify(p, epsilon)) for p in extract_path(traj, ids)]


def define_gesture(traj: GestureTrajectory, label: str, lang: GestureLanguage) -> GestureLanguage:
    """Return ``lang`` extended with a reference built from one demonstration."""
    if not label:
        raise ValueError("label must be non-empty")
    if label in lang.labels:
        raise DuplicateLabel(f"label {label!r} already defined")
    norm = normalize(traj)
    salient = select_salient(norm, lang.salience_alpha)
    polys = simplified_paths(norm, salient, lang.rdp_epsilon)
    ref = ReferenceGesture(
        label=label,
        salient_keypoints=tuple(salient),
        polylines=dict(zip(sorted(salient), polys)),
        descriptors=describe(polys, lang.raster_size, lang.stroke_width),
    )
    return replace(lang, gestures=lang.gestures + (ref,))


def build_language(demos: dict, **config) -> GestureLanguage:
    """Language from ``{label: trajectory}`` demonstrations, in dict order."""
    lang = GestureLanguage(**config)
    for label, traj in demos.items():
        lang = define_gesture(traj, label, lang)
    return lang


def _sig(v: float) -> float:
    return float(f"{v:.{SIG_DIGITS}g}")


def _to_obj(lang: GestureLanguage) -> dict:
    gestures = []
    for g in lang.gestures:
        entry = {
            "label": g.label,
            "salient_keypoints": list(g.salient_keypoints),
            "polylines": {k: [[_sig(x), _sig(y)] for x, y in g.polylines[k]]
                          for k in sorted(g.polylines)},
        }
        if g.descriptors is not None:
            entry["descriptors"] = g.descriptors.to_dict()
        gestures.append(entry)
    return {
        "version": lang.version,
        "raster": {"size": lang.raster_size, "stroke": lang.stroke_width},
        "rdp_epsilon": _sig(lang.rdp_epsilon),
        "salience_alpha": _sig(lang.salience_alpha),
        "gestures": gestures,
    }


# only lists json.dumps spread over several lines; labels never contain raw newlines
_NUMERIC_LIST = re.compile(r"\[\n\s*([-+0-9.eE,\s]*?)\s*\]")


def save(lang: GestureLanguage) -> bytes:
    text = json.dumps(_to_obj(lang), indent=2, ensure_ascii=False)
    text = _NUMERIC_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text)
    return (text + "\n").encode("utf-8")


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError("missing field", field=f"{where}{key}")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ParseError(f"expected {kind.__name__}", field=f"{where}{key}")
    return value


def load(data: bytes | str, check_cache: bool = True) -> GestureLanguage:
    """Parse a language file; cached descriptors are verified against recomputation."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    version = _require(obj, "version", int, "")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported language version {version}")
    raster = _require(obj, "raster", dict, "")
    lang = GestureLanguage(
        raster_size=_require(raster, "size", int, "raster."),
        stroke_width=_require(raster, "stroke", int, "raster."),
        rdp_epsilon=_require(obj, "rdp_epsilon", float, ""),
        salience_alpha=_require(obj, "salience_alpha", float, ""),
    )
    refs = []
    seen = set()
    for i, g in enumerate(_require(obj, "gestures", list, "")):
        where = f"gestures[{i}]."
        label = _require(g, "label", str, where)
        if not label or label in seen:
            raise ParseError("empty or duplicate label", field=f"{where}label")
        seen.add(label)
        salient = _require(g, "salient_keypoints", list, where)
        raw = _require(g, "polylines", dict, where)
        polylines = {}
        for kid, pts in raw.items():
            try:
                arr = np.asarray(pts, dtype=float)
            except (TypeError, ValueError):
                raise ParseError("bad coordinates", field=f"{where}polylines.{kid}") from None
            if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 2 or not np.isfinite(arr).all():
                raise ParseError("polyline must be >= 2 finite [x, y] pairs",
                                 field=f"{where}polylines.{kid}")
            polylines[kid] = arr
        if sorted(polylines) != sorted(salient):
            raise ParseError("polylines must match salient keypoints", field=f"{where}polylines")
        polys = [polylines[k] for k in sorted(polylines)]
        cached = None
        if "descriptors" in g:
            try:
                cached = DescriptorSet.from_dict(g["descriptors"])
            except (KeyError, TypeError, ValueError):
                raise ParseError("malformed descriptors", field=f"{where}descriptors") from None
        if cached is None or check_cache:
            fresh = describe(polys, lang.raster_size, lang.stroke_width)
            if cached is None:
                cached = fresh
            elif not cached.allclose(fresh):
                raise ParseError("cached descriptors disagree with polylines",
                                 field=f"{where}descriptors")
        refs.append(ReferenceGesture(label, tuple(salient), polylines, cached))
    return replace(lang, gestures=tuple(refs))
