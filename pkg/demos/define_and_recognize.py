"""Define a three-gesture language from single demonstrations, then recognize.

Each label gets exactly one recording. A perturbed copy of every recording
is then classified, and the seven voters' choices are printed.
"""
import oneshot_gestures as osg
from oneshot_gestures import scripted

demos = scripted.demonstrations(scripted.SMALL_VOCABULARY)
lang = osg.build_language(demos)
print("language:", ", ".join(g.label for g in lang.gestures))

cfg = osg.AugmentConfig(seed=11)
for label, traj in demos.items():
    query = osg.augment(traj, cfg, k=0)
    res = osg.recognize(query, lang)
    voters = " ".join(f"{v.voter}={v.chosen_label}" for v in res.votes)
    print(f"{label:>7} -> {res.predicted:<7} {voters}")
