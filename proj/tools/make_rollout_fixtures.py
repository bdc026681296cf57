#!/usr/bin/env python3
"""Regenerates the trajectory fixtures under data/fixtures/.

touching_pair.json   two unit disks whose clearance is exactly zero.
rollouts/spec.txt    F[0,3](closeTo(obj_1,obj_2;2))
rollouts/cand_*.json closest approaches 2.5, 1.8, 0.7 -> overall -0.5, 0.2, 1.3
rollouts/tie_*.json  closest approaches 0.7, 1.8, 0.7 -> overall 1.3, 0.2, 1.3
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"


def frame(t, objects):
    return {"t": t, "objects": objects}


def disk(oid, x, y, r):
    return {"id": oid, "kind": "object", "x": x, "y": y, "r": r}


def approach(distances):
    """obj_1 fixed at the origin, obj_2 on the x-axis at the given centre distances."""
    return {
        "step_seconds": 1.0,
        "frames": [frame(t, [disk("obj_1", 0.0, 0.0, 0.5), disk("obj_2", d, 0.0, 0.5)])
                   for t, d in enumerate(distances)],
    }


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


write(ROOT / "touching_pair.json",
      {"step_seconds": 1.0, "frames": [frame(0, [disk("obj_1", 0.0, 0.0, 1.0), disk("obj_2", 2.0, 0.0, 1.0)])]})

(ROOT / "rollouts").mkdir(parents=True, exist_ok=True)
(ROOT / "rollouts" / "spec.txt").write_text("F[0,3](closeTo(obj_1,obj_2;2))\n")
for i, closest in enumerate([2.5, 1.8, 0.7]):
    write(ROOT / "rollouts" / f"cand_{i}.json", approach([4.0, 3.0, closest, 3.5]))
for i, closest in enumerate([0.7, 1.8, 0.7]):
    write(ROOT / "rollouts" / f"tie_{i}.json", approach([3.0, closest, 3.0, 3.0]))
