import numpy as np
import pytest

from oneshot_gestures.language import build_language
from oneshot_gestures.scripted import LARGE_VOCABULARY, SMALL_VOCABULARY, demonstrations
from oneshot_gestures.trajectory import GestureTrajectory, KeypointFrame

TORSO = {"left_shoulder": (1.0, -1.0), "right_shoulder": (-1.0, -1.0),
         "left_hip": (1.0, 1.0), "right_hip": (-1.0, 1.0)}


def make_trajectory(path, kid="right_wrist", dt=0.1, torso=TORSO, offset=(0.0, 0.0)):
    """Trajectory with a still torso and one keypoint following ``path``."""
    ox, oy = offset
    frames = []
    for i, (x, y) in enumerate(np.asarray(path, dtype=float)):
        kp = {k: (v[0] + ox, v[1] + oy) for k, v in torso.items()}
        kp[kid] = (float(x) + ox, float(y) + oy)
        frames.append(KeypointFrame(i * dt, kp))
    return GestureTrajectory(frames)


def circle_points(n=200, r=1.0, closed=True):
    a = np.linspace(0, 2 * np.pi, n, endpoint=closed)
    return np.column_stack([r * np.cos(a), r * np.sin(a)])


@pytest.fixture(scope="session")
def small_demos():
    return demonstrations(SMALL_VOCABULARY)


@pytest.fixture(scope="session")
def large_demos():
    return demonstrations(LARGE_VOCABULARY)


@pytest.fixture(scope="session")
def small_lang(small_demos):
    return build_language(small_demos)


@pytest.fixture(scope="session")
def large_lang(large_demos):
    return build_language(large_demos)


def random_polyline(rng, lo=3, hi=12):
    """A smooth-ish random stroke in roughly unit coordinates."""
    n = int(rng.integers(lo, hi))
    return np.cumsum(rng.normal(0.0, 1.0, (n, 2)), axis=0)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
