"""Rasterize each vocabulary shape and print its descriptors.

Writes <label>.pbm images into the directory given as the first argument
(default: the current directory) so they can be opened in an image viewer.
"""
import sys
from pathlib import Path

import numpy as np

import oneshot_gestures as osg
from oneshot_gestures import scripted
from oneshot_gestures.shape import to_pbm

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
out.mkdir(parents=True, exist_ok=True)
np.set_printoptions(precision=3, suppress=True)

lang = osg.build_language(scripted.demonstrations(scripted.LARGE_VOCABULARY, jitter=0.0))
for ref in lang.gestures:
    polys = ref.polyline_list()
    (out / f"{ref.label}.pbm").write_bytes(to_pbm(osg.rasterize(polys)))
    d = ref.descriptors
    m = d.metrics
    print(f"{ref.label}: solidity {m.solidity:.2f}  circularity {m.circularity:.2f}  "
          f"aspect {m.aspect_ratio:.2f}  complexity {m.path_complexity:.2f}")
    print("  hu     ", d.hu)
    print("  fourier", d.fourier[:6])
