import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oneshot_gestures import language as L
from oneshot_gestures.errors import (DegenerateExtent, DuplicateLabel, ParseError,
                                     VersionMismatch)
from oneshot_gestures.recognizer import recognize
from oneshot_gestures.scripted import demonstration
from oneshot_gestures.trajectory import GestureTrajectory, KeypointFrame, normalize

from conftest import TORSO


def jitter_traj(seed=0, sweep_both=False, n=30):
    rng = np.random.default_rng(seed)
    frames = []
    for i in range(n):
        s = i / (n - 1)
        kp = {k: tuple(np.array(v) + rng.normal(0, 0.01, 2)) for k, v in TORSO.items()}
        kp["right_wrist"] = (1.6 * s - 0.8, 0.2 * np.sin(6 * s))
        kp["left_wrist"] = ((-1.6 * s + 0.8, 0.2 * np.sin(6 * s)) if sweep_both
                            else tuple(rng.normal(0, 0.02, 2)))
        frames.append(KeypointFrame(i / 15, kp))
    return GestureTrajectory(frames)


def test_select_salient_single():
    assert L.select_salient(normalize(jitter_traj())) == ["right_wrist"]


def test_select_salient_both_wrists():
    got = L.select_salient(normalize(jitter_traj(sweep_both=True)))
    assert sorted(got) == ["left_wrist", "right_wrist"]
    assert sorted(L.select_salient(normalize(demonstration("sweep")))) == [
        "left_wrist", "right_wrist"]


def test_select_salient_alpha_one():
    assert len(L.select_salient(normalize(jitter_traj()), alpha=1.0)) == 1


def test_select_salient_order_and_errors():
    frames = [KeypointFrame(i, {"a": (i, 0.0), "b": (2.0 * i, 0.0), "c": (2.0 * i, 0.0)})
              for i in range(3)]
    traj = GestureTrajectory(frames)
    assert L.select_salient(traj, 0.4) == ["b", "c", "a"]
    with pytest.raises(ValueError):
        L.select_salient(traj, 0.0)
    static = GestureTrajectory([KeypointFrame(i, {"a": (1.0, 1.0)}) for i in range(3)])
    with pytest.raises(DegenerateExtent):
        L.select_salient(static)


def _similar(traj, scale, shift, angle=0.0):
    c, s = np.cos(angle), np.sin(angle)
    a = scale * np.array([[c, -s], [s, c]])
    return GestureTrajectory(KeypointFrame(f.t, {k: tuple(a @ np.array(v) + shift)
                                                 for k, v in f.keypoints.items()})
                             for f in traj.frames)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["circle", "sweep", "three"]), st.floats(0.2, 5.0),
       st.floats(-300, 300), st.floats(-300, 300))
def test_salience_similarity_invariant(name, scale, dx, dy):
    traj = demonstration(name)
    base = L.select_salient(normalize(traj))
    assert L.select_salient(normalize(_similar(traj, scale, (dx, dy)))) == base


def test_define_gesture_pure_and_sized(small_demos):
    empty = L.GestureLanguage()
    one = L.define_gesture(small_demos["circle"], "circle", empty)
    assert len(empty) == 0 and len(one) == 1
    ref = one["circle"]
    assert ref.salient_keypoints == ("right_wrist",)
    assert all(len(p) >= 2 for p in ref.polylines.values())
    with pytest.raises(DuplicateLabel):
        L.define_gesture(small_demos["wedge"], "circle", one)
    with pytest.raises(ValueError):
        L.define_gesture(small_demos["wedge"], "", one)
    with pytest.raises(KeyError):
        one["nope"]


def test_define_then_recognize_unanimous(small_demos):
    lang = L.define_gesture(small_demos["three"], "three", L.GestureLanguage())
    res = recognize(small_demos["three"], lang)
    assert res.predicted == "three" and res.tally["three"] == 7


def test_define_deterministic(small_demos):
    a = L.build_language(small_demos)
    b = L.build_language(small_demos)
    assert L.save(a) == L.save(b)
    assert all(x == y for x, y in zip(a.gestures, b.gestures))


def test_quantize():
    assert L.quantize([1.23456789012, -0.000123456789012]).tolist() == [
        1.23456789, -0.000123456789]


def test_save_load_roundtrip(small_lang):
    data = L.save(small_lang)
    back = L.load(data)
    assert back == small_lang
    assert L.save(back) == data


def test_roundtrip_large(large_lang):
    assert L.load(L.save(large_lang)) == large_lang


def test_file_layout(small_lang):
    obj = json.loads(L.save(small_lang))
    assert list(obj) == ["version", "raster", "rdp_epsilon", "salience_alpha", "gestures"]
    g = obj["gestures"][0]
    assert list(g) == ["label", "salient_keypoints", "polylines", "descriptors"]
    assert list(g["descriptors"]) == ["hu", "zernike", "fourier", "metrics"]
    assert len(g["descriptors"]["hu"]) == 7 and len(g["descriptors"]["zernike"]) == 25
    for pts in g["polylines"].values():
        for x, y in pts:
            assert float(f"{x:.9g}") == x and float(f"{y:.9g}") == y


def test_load_without_cache_recomputes(small_lang):
    obj = json.loads(L.save(small_lang))
    for g in obj["gestures"]:
        del g["descriptors"]
    back = L.load(json.dumps(obj))
    for a, b in zip(back.gestures, small_lang.gestures):
        assert a.descriptors.allclose(b.descriptors, atol=1e-9)


def test_truncated_file(small_lang):
    data = L.save(small_lang)
    with pytest.raises(ParseError) as exc:
        L.load(data[: len(data) // 2])
    assert exc.value.line is not None


def test_version_mismatch(small_lang):
    obj = json.loads(L.save(small_lang))
    obj["version"] = 999
    with pytest.raises(VersionMismatch):
        L.load(json.dumps(obj))


@pytest.mark.parametrize("mutate,field", [
    (lambda o: o.pop("raster"), "raster"),
    (lambda o: o["gestures"][0].pop("label"), "gestures[0].label"),
    (lambda o: o["gestures"][1].__setitem__("label", "circle"), "gestures[1].label"),
    (lambda o: o["gestures"][0]["polylines"].__setitem__("right_wrist", [[0, 0]]),
     "gestures[0].polylines.right_wrist"),
    (lambda o: o["gestures"][0]["descriptors"]["hu"].__setitem__(0, 42.0),
     "gestures[0].descriptors"),
    (lambda o: o["gestures"][0].__setitem__("salient_keypoints", ["left_wrist"]),
     "gestures[0].polylines"),
    (lambda o: o.__setitem__("rdp_epsilon", "x"), "rdp_epsilon"),
])
def test_load_errors_name_field(small_lang, mutate, field):
    obj = json.loads(L.save(small_lang))
    mutate(obj)
    with pytest.raises(ParseError) as exc:
        L.load(json.dumps(obj))
    assert exc.value.field == field


def test_load_rejects_non_utf8():
    with pytest.raises(ParseError):
        L.load(b"\xff\xfe{}")
