"""Command-line interface.

Exit codes: 0 success, 1 recognition/evaluation failure, 2 usage error,
3 I/O or parse error. Set ``OSG_LOG`` to error|warn|info|debug for logging
on stderr. ``--in -`` reads the stream from stdin.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import statistics
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import language as langmod
from .augment import AugmentConfig, augment
from .errors import (AllReferencesMissing, DuplicateLabel, EmptyLanguage,
                     GestureError, ParseError, VersionMismatch)
from .language import GestureLanguage, define_gesture, select_salient
from .recognizer import evaluate, recognize, recorded_descriptors
from .scripted import (IMAGE_SIZE, LARGE_VOCABULARY, SMALL_VOCABULARY,
                       demonstrations)
from .session import bracket, format_stream, parse_stream, segment_stream
from .shape import rasterize, to_pbm, to_pgm
from .trajectory import normalize, rdp_simplify, extract_path

log = logging.getLogger("oneshot_gestures")

BUILTIN_SETS = {"small": SMALL_VOCABULARY, "large": LARGE_VOCABULARY}
_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _usage(msg):
    return CliError(msg, 2)


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", 3) from None


def _write_atomic(path: Path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _gestures(path: str):
    _, events = parse_stream(_read_text(path))
    return segment_stream(events)


def _one_gesture(path: str):
    found = _gestures(path)
    if len(found) != 1:
        raise _usage(f"expected exactly one gesture in {path}, found {len(found)}")
    return found[0]


def _load_language(path: str, require_gestures: bool = False) -> GestureLanguage:
    text = _read_text(path)
    if require_gestures and not text.strip():
        raise _usage(f"language file {path} is empty")
    lang = langmod.load(text.encode("utf-8"))
    if require_gestures and len(lang) == 0:
        raise _usage(f"language file {path} defines no gestures")
    return lang


def _dump(obj) -> str:
    return json.dumps(_finite(obj), indent=2)


def _finite(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def cmd_define(args):
    traj = _one_gesture(args.input)
    path = Path(args.lang)
    if path.exists():
        lang = _load_language(args.lang)
    else:
        lang = GestureLanguage(
            raster_size=args.raster_size or langmod.DEFAULT_SIZE,
            stroke_width=args.stroke or langmod.DEFAULT_STROKE,
            rdp_epsilon=args.epsilon if args.epsilon is not None else langmod.DEFAULT_RDP_EPSILON,
            salience_alpha=args.alpha if args.alpha is not None else langmod.DEFAULT_SALIENCE_ALPHA,
        )
    try:
        lang = define_gesture(traj, args.label, lang)
    except DuplicateLabel as exc:
        raise _usage(f"DuplicateLabel: {exc}") from None
    _write_atomic(path, langmod.save(lang))
    ref = lang[args.label]
    print(_dump({
        "label": ref.label,
        "salient_keypoints": list(ref.salient_keypoints),
        "polyline_points": {k: len(v) for k, v in sorted(ref.polylines.items())},
    }))
    return 0


def _format_result(i, result) -> str:
    lines = [f"gesture {i}: {result.predicted} "
             f"({result.tally[result.predicted]}/{len(result.votes)} votes"
             f"{', tie broken' if result.tie_broken else ''})"]
    for v in result.votes:
        d = v.distances[v.chosen_label]
        lines.append(f"  {v.voter:<16} -> {v.chosen_label:<12} distance {d:.6g}")
    return "\n".join(lines)


def cmd_recognize(args):
    lang = _load_language(args.lang, require_gestures=True)
    results = []
    for traj in _gestures(args.input):
        try:
            results.append(recognize(traj, lang))
        except AllReferencesMissing as exc:
            raise CliError(str(exc), 1) from None
    if args.json:
        print(_dump([r.to_dict() for r in results]))
    else:
        print("\n".join(_format_result(i, r) for i, r in enumerate(results, 1)))
    return 0


def cmd_evaluate(args):
    lang = _load_language(args.lang, require_gestures=True)
    manifest_path = Path(args.dataset)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.json"
    try:
        manifest = json.loads(_read_text(str(manifest_path)))
        files = manifest["files"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"bad manifest {args.dataset}: {exc}", 3) from None
    samples = []
    for entry in files:
        path = manifest_path.parent / entry["path"]
        found = _gestures(str(path))
        if len(found) != 1:
            raise CliError(f"{path}: expected one gesture, found {len(found)}", 3)
        samples.append((found[0], entry["label"]))
    try:
        ev = evaluate(samples, lang, workers=args.parallel)
    except GestureError as exc:
        raise CliError(str(exc), 1) from None
    if args.json:
        print(_dump(ev.to_dict()))
    else:
        print(ev.format_table())
    return 0


def _demos(source: str, n_frames: int | None = None):
    if source.startswith("builtin:"):
        key = source.split(":", 1)[1]
        if key not in BUILTIN_SETS:
            raise _usage(f"unknown builtin set {key!r}; choose from {sorted(BUILTIN_SETS)}")
        kw = {} if n_frames is None else {"n_frames": n_frames}
        return demonstrations(BUILTIN_SETS[key], **kw)
    root = Path(source)
    if not root.is_dir():
        raise CliError(f"{source} is not a directory of <label>.jsonl demonstrations", 3)
    demos = {}
    for path in sorted(root.glob("*.jsonl")):
        demos[path.stem] = _one_gesture(str(path))
    if not demos:
        raise _usage(f"no .jsonl demonstrations in {source}")
    return demos


def cmd_augment(args):
    demos = _demos(args.lang)
    defaults = AugmentConfig()
    cfg = AugmentConfig(
        seed=args.seed,
        rotation_deg=defaults.rotation_deg if args.rotation is None else args.rotation,
        noise_sigma=defaults.noise_sigma if args.noise is None else args.noise,
        time_warp=defaults.time_warp if args.warp is None else args.warp,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    k = 0
    for label, traj in demos.items():
        for j in range(args.n):
            sample = augment(traj, cfg, k)
            name = f"{label}_{j:04d}.jsonl"
            (out / name).write_text(format_stream(bracket(sample), *IMAGE_SIZE), encoding="utf-8")
            files.append({"path": name, "label": label})
            k += 1
    manifest = {"seed": args.seed, "config": cfg.to_dict(), "files": files}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(files)} samples to {out}")
    return 0


def cmd_scripted(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for label, traj in _demos(f"builtin:{args.set}", args.frames).items():
        (out / f"{label}.jsonl").write_text(format_stream(bracket(traj), *IMAGE_SIZE),
                                            encoding="utf-8")
        print(out / f"{label}.jsonl")
    return 0


def _image_polylines(traj, salient, epsilon, alpha):
    norm = normalize(traj)
    ids = salient or select_salient(norm, alpha)
    return [rdp_simplify(p, epsilon) for p in extract_path(norm, ids)]


def cmd_render(args):
    traj = _gestures(args.input)
    if not traj:
        raise _usage("no complete gesture in stream")
    salient = [s for item in (args.salient or []) for s in item.split(",") if s]
    polys = _image_polylines(traj[0], salient, args.epsilon, langmod.DEFAULT_SALIENCE_ALPHA)
    img = rasterize(polys, args.size, args.stroke)
    data = to_pgm(img) if args.out.lower().endswith(".pgm") else to_pbm(img)
    try:
        Path(args.out).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", 3) from None
    return 0


def cmd_describe(args):
    lang = _load_language(args.lang)
    out = []
    for i, traj in enumerate(_gestures(args.input)):
        norm = normalize(traj)
        refs = []
        for ref in lang.gestures:
            try:
                desc = recorded_descriptors(norm, ref.salient_keypoints, lang).to_dict()
            except GestureError:
                desc = None
            refs.append({"label": ref.label, "salient_keypoints": list(ref.salient_keypoints),
                         "descriptors": desc})
        out.append({"gesture": i, "references": refs})
    print(_dump(out))
    return 0


def cmd_bench(args):
    lang = _load_language(args.lang, require_gestures=True)
    traj = _gestures(args.input)
    if not traj:
        raise _usage("no complete gesture in stream")
    traj = traj[0]
    recognize(traj, lang)  # warm-up
    times = []
    for _ in range(args.iters):
        t0 = time.perf_counter()
        recognize(traj, lang)
        times.append((time.perf_counter() - t0) * 1e3)
    report = {
        "frames": len(traj),
        "references": len(lang),
        "iters": args.iters,
        "mean_ms": statistics.fmean(times),
        "median_ms": statistics.median(times),
        "p95_ms": float(np.percentile(times, 95)),
    }
    if args.json:
        print(_dump(report))
    else:
        print(" ".join(f"{k}={v:.3f}" if isinstance(v, float) else f"{k}={v}"
                       for k, v in report.items()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("define", help="add a gesture to a language from one demonstration")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--label", required=True)
    d.add_argument("--lang", required=True, help="language file (created if absent)")
    d.add_argument("--epsilon", type=float)
    d.add_argument("--alpha", type=float)
    d.add_argument("--raster-size", type=int)
    d.add_argument("--stroke", type=int)
    d.set_defaults(func=cmd_define)

    r = sub.add_parser("recognize", help="classify every gesture in a stream")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--lang", required=True)
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_recognize)

    e = sub.add_parser("evaluate", help="confusion matrix over an augmented dataset")
    e.add_argument("--dataset", required=True, help="manifest.json written by augment, or its directory")
    e.add_argument("--lang", required=True)
    e.add_argument("--parallel", type=int, default=1)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    a = sub.add_parser("augment", help="write a seeded augmented dataset")
    a.add_argument("--lang", required=True,
                   help="directory of <label>.jsonl demonstrations, or builtin:small|large")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", required=True)
    a.add_argument("--rotation", type=float)
    a.add_argument("--noise", type=float)
    a.add_argument("--warp", type=float)
    a.set_defaults(func=cmd_augment)

    s = sub.add_parser("scripted", help="write the scripted demonstration streams")
    s.add_argument("--set", choices=sorted(BUILTIN_SETS), default="small")
    s.add_argument("--frames", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scripted)

    rd = sub.add_parser("render", help="write the gesture's image as PBM (P4) or PGM (P2)")
    rd.add_argument("--in", dest="input", required=True)
    rd.add_argument("--out", required=True)
    rd.add_argument("--salient", action="append", help="keypoint ids (comma separated)")
    rd.add_argument("--size", type=int, default=langmod.DEFAULT_SIZE)
    rd.add_argument("--stroke", type=int, default=langmod.DEFAULT_STROKE)
    rd.add_argument("--epsilon", type=float, default=langmod.DEFAULT_RDP_EPSILON)
    rd.set_defaults(func=cmd_render)

    ds = sub.add_parser("describe", help="dump recorded descriptors per reference as JSON")
    ds.add_argument("--in", dest="input", required=True)
    ds.add_argument("--lang", required=True)
    ds.set_defaults(func=cmd_describe)

    b = sub.add_parser("bench", help="latency of recognition after keypoint extraction")
    b.add_argument("--lang", required=True)
    b.add_argument("--in", dest="input", required=True)
    b.add_argument("--iters", type=int, default=50)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("OSG_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, VersionMismatch) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except EmptyLanguage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GestureError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
