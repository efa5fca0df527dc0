"""Score the eight-gesture language on a seeded augmented dataset."""
import sys

import oneshot_gestures as osg
from oneshot_gestures import scripted

n = int(sys.argv[1]) if len(sys.argv) > 1 else 20  # samples per label
demos = scripted.demonstrations(scripted.LARGE_VOCABULARY)
lang = osg.build_language(demos)
samples = osg.make_dataset(demos, n, osg.AugmentConfig(seed=7))

ev = osg.evaluate(samples, lang, workers=4)
print(ev.format_table())
true, pred, count = ev.worst_confusion()
print(f"most confused: {true} -> {pred} ({count})")
