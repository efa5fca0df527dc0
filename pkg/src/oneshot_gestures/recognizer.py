"""Seven-voter nearest-reference classification and the evaluation harness."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .descriptors import DescriptorSet, describe, descriptor_distance
from .errors import (AllReferencesMissing, DegenerateContour, DegenerateHull,
                     DegenerateShape, EmptyDataset, EmptyImage, EmptyLanguage,
                     MissingSalient, UnknownLabel)
from .language import GestureLanguage, ReferenceGesture, simplified_paths
from .trajectory import GestureTrajectory, normalize

PRIMARY_VOTERS = ("hu", "zernike", "fourier")
SECONDARY_VOTERS = ("aspect_ratio", "solidity", "circularity", "path_complexity")
VOTERS = PRIMARY_VOTERS + SECONDARY_VOTERS

# a recording whose filtered path cannot be turned into a shape loses to every reference
_UNSHAPEABLE = (DegenerateShape, DegenerateHull, DegenerateContour, EmptyImage)


@dataclass(frozen=True)
class Vote:
    voter: str
    chosen_label: str
    distances: dict


@dataclass(frozen=True)
class RecognitionResult:
    predicted: str
    votes: tuple
    tally: dict
    tie_broken: bool

    def to_dict(self) -> dict:
        return {
            "predicted": self.predicted,
            "tie_broken": self.tie_broken,
            "tally": dict(self.tally),
            "votes": [{"voter": v.voter, "chosen_label": v.chosen_label,
                       "distances": dict(v.distances)} for v in self.votes],
        }


def descriptor_distances(a: DescriptorSet, b: DescriptorSet) -> dict:
    """Per-voter distance between two descriptor sets."""
    out = {
        "hu": descriptor_distance(a.hu, b.hu),
        "zernike": descriptor_distance(a.zernike, b.zernike),
        "fourier": descriptor_distance(a.fourier, b.fourier),
    }
    for name in SECONDARY_VOTERS:
        out[name] = abs(getattr(a.metrics, name) - getattr(b.metrics, name))
    return out


def _observed(traj: GestureTrajectory, ids) -> tuple[str, ...]:
    return tuple(sorted(k for k in ids if len(traj.track(k)) >= 2))


def recorded_descriptors(traj: GestureTrajectory, ids, lang: GestureLanguage,
                         _paths: dict | None = None) -> DescriptorSet:
    """Descriptors of a normalized recording filtered to ``ids``.

    ``_paths`` memoizes the simplified polyline of each keypoint across
    references sharing it.
    """
    seen = _observed(traj, ids)
    if not seen:
        raise MissingSalient(f"none of {sorted(ids)} observed")
    if _paths is None:
        _paths = {}
    for kid in seen:
        if kid not in _paths:
            (_paths[kid],) = simplified_paths(traj, [kid], lang.rdp_epsilon)
    polys = [_paths[kid] for kid in seen]
    return describe(polys, lang.raster_size, lang.stroke_width)


def _reference_descriptors(ref: ReferenceGesture, lang: GestureLanguage) -> DescriptorSet:
    if ref.descriptors is not None:
        return ref.descriptors
    return describe(ref.polyline_list(), lang.raster_size, lang.stroke_width)


def score_against(traj: GestureTrajectory, ref: ReferenceGesture, lang: GestureLanguage,
                  _cache: dict | None = None) -> dict:
    """Per-voter distances from a normalized recording to one reference.

    All distances are +inf when none of the reference's salient keypoints
    were observed (or the filtered path degenerates to no shape).
    """
    key = _observed(traj, ref.salient_keypoints)
    if _cache is not None and key in _cache:
        rec = _cache[key]
    else:
        try:
            paths = None if _cache is None else _cache.setdefault("paths", {})
            rec = recorded_descriptors(traj, ref.salient_keypoints, lang, paths)
        except (MissingSalient,) + _UNSHAPEABLE:
            rec = None
        if _cache is not None:
            _cache[key] = rec
    if rec is None:
        return {v: math.inf for v in VOTERS}
    return descriptor_distances(rec, _reference_descriptors(ref, lang))


def _decide(labels, votes, weights):
    scores = {label: 0.0 for label in labels}
    tally = {label: 0 for label in labels}
    for v in votes:
        tally[v.chosen_label] += 1
        scores[v.chosen_label] += weights.get(v.voter, 1.0)
    best = max(scores.values())
    leaders = [label for label in labels if scores[label] == best]
    if len(leaders) == 1:
        return leaders[0], tally, False
    rank_sum = dict.fromkeys(labels, 0.0)
    for v in votes:
        ranks = rankdata([v.distances[label] for label in labels], method="min")
        for label, r in zip(labels, ranks):
            rank_sum[label] += r
    return min(leaders, key=lambda label: (rank_sum[label], label)), tally, True


def recognize(traj: GestureTrajectory, lang: GestureLanguage,
              weights: dict | None = None) -> RecognitionResult:
    """Classify a raw (un-normalized) recording against ``lang``.

    Each voter picks the reference at the smallest distance (ties go to the
    lexicographically first label). The label with most votes wins; tied
    counts are broken by the lowest summed per-voter distance rank, then by
    label.
    """
    if len(lang) == 0:
        raise EmptyLanguage("language has no gestures")
    norm = normalize(traj)
    cache: dict = {}
    table = {ref.label: score_against(norm, ref, lang, cache) for ref in lang.gestures}
    if all(math.isinf(d) for dists in table.values() for d in dists.values()):
        raise AllReferencesMissing("no reference's salient keypoints were observed")
    labels = lang.labels
    votes = []
    for voter in VOTERS:
        dists = {label: table[label][voter] for label in labels}
        chosen = min(labels, key=lambda label: (dists[label], label))
        votes.append(Vote(voter, chosen, dists))
    predicted, tally, tie_broken = _decide(labels, votes, weights or {})
    return RecognitionResult(predicted, tuple(votes), tally, tie_broken)


@dataclass(frozen=True, eq=False)
class Evaluation:
    labels: list
    confusion: np.ndarray  # rows true, columns predicted
    predictions: list

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion) / self.confusion.sum())

    def worst_confusion(self) -> tuple[str, str, int]:
        """(true, predicted, count) of the largest off-diagonal cell."""
        off = self.confusion.copy()
        np.fill_diagonal(off, -1)
        i, j = np.unravel_index(int(np.argmax(off)), off.shape)
        return self.labels[i], self.labels[j], int(self.confusion[i, j])

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "total": int(self.confusion.sum()),
        }

    def format_table(self) -> str:
        width = max(8, max(len(label) for label in self.labels) + 1)
        head = "true\\pred".ljust(width) + "".join(label.rjust(width) for label in self.labels)
        rows = [head]
        for label, row in zip(self.labels, self.confusion):
            rows.append(label.ljust(width) + "".join(str(int(c)).rjust(width) for c in row))
        rows.append(f"accuracy {self.accuracy:.4f} ({int(np.trace(self.confusion))}"
                    f"/{int(self.confusion.sum())})")
        return "\n".join(rows)


def evaluate(samples, lang: GestureLanguage, workers: int = 1) -> Evaluation:
    """Recognize every ``(trajectory, true_label)`` pair and tabulate."""
    samples = list(samples)
    if not samples:
        raise EmptyDataset("accuracy is undefined for an empty sample list")
    labels = lang.labels
    index = {label: i for i, label in enumerate(labels)}
    for _, label in samples:
        if label not in index:
            raise UnknownLabel(f"label {label!r} not in language")

    def run(sample):
        return recognize(sample[0], lang).predicted

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            predicted = list(pool.map(run, samples))
    else:
        predicted = [run(s) for s in samples]
    matrix = np.zeros((len(labels), len(labels)), dtype=int)
    for (_, truth), pred in zip(samples, predicted):
        matrix[index[truth], index[pred]] += 1
    return Evaluation(labels, matrix, predicted)
