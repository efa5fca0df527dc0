"""One-shot, training-free gesture recognition from pose keypoint trajectories."""

from .augment import AugmentConfig, augment, make_dataset
from .descriptors import DescriptorSet, describe
from .language import (GestureLanguage, ReferenceGesture, build_language,
                       define_gesture, load, save, select_salient)
from .metrics import SecondaryMetrics, secondary_metrics
from .recognizer import RecognitionResult, evaluate, recognize
from .session import parse_stream, segment_stream
from .shape import ShapeImage, rasterize
from .trajectory import GestureTrajectory, KeypointFrame, normalize, rdp_simplify

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig", "DescriptorSet", "GestureLanguage", "GestureTrajectory",
    "KeypointFrame", "RecognitionResult", "ReferenceGesture", "SecondaryMetrics",
    "ShapeImage", "augment", "build_language", "define_gesture", "describe",
    "evaluate", "load", "make_dataset", "normalize", "parse_stream", "rasterize",
    "rdp_simplify", "recognize", "save", "secondary_metrics", "segment_stream",
    "select_salient",
]
