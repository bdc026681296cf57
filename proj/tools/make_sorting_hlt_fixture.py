#!/usr/bin/env python3
"""Regenerates data/fixtures/sorting_hlt.json.

Span offsets are byte offsets into the instruction, computed from the quoted
phrases below so the fixture never drifts from its text.
"""
import json
import pathlib

S1 = "Within 20 seconds, put the red block inside the sorting zone and keep it above the blue block."
S2 = "Keep the red block far from the blue block until the red block touches the green block."
S3 = "After 10 seconds, make sure the red block is not close to the blue block."
INSTRUCTION = " ".join([S1, S2, S3])

INSIDE = "enclIn(obj_r,reg_s;0.05)"
ABOVE = "above(obj_r,obj_b;0.1)"
FAR = "farFrom(obj_r,obj_b;0.3)"
TOUCH = "touch(obj_r,obj_g;0.02)"
CLOSE = "closeTo(obj_r,obj_b;0.2)"

V1A = f"({INSIDE} & {ABOVE})"
V2A = f"({FAR} U[0,20] {TOUCH})"
V3A1 = f"!({CLOSE})"
V1 = f"F[0,20]({V1A})"
V2 = f"G[0,20]({V2A})"
V3 = f"F[10,20]({V3A1})"
ROOT = f"({V1} & {V2} & {V3})"


def span(phrase, within=None):
    """Byte span of the unique occurrence of phrase (optionally inside another span)."""
    data = INSTRUCTION.encode()
    lo, hi = within if within else (0, len(data))
    needle = phrase.encode()
    start = data.find(needle, lo, hi)
    assert start >= 0, phrase
    assert data.find(needle, start + 1, hi) < 0, f"ambiguous: {phrase}"
    return [start, start + len(needle)]


s1, s2, s3 = span(S1), span(S2), span(S3)
nodes = [
    ("root", ROOT, [[0, len(INSTRUCTION.encode())]], 0),
    ("v1", V1, [s1], 1),
    ("v2", V2, [s2], 1),
    ("v3", V3, [s3], 1),
    ("v1a", V1A, [span("put the red block inside the sorting zone and keep it above the blue block", s1)], 2),
    ("v2a", V2A, [span("Keep the red block far from the blue block until the red block touches the green block", s2)], 2),
    ("v3a1", V3A1, [span("the red block is not close to the blue block", s3)], 2),
    ("v1a1", INSIDE, [span("put the red block inside the sorting zone", s1)], 3),
    ("v1a2", ABOVE, [span("keep it above the blue block", s1)], 3),
    ("v2a1", FAR, [span("Keep the red block far from the blue block", s2)], 3),
    ("v2a2", TOUCH, [span("the red block touches the green block", s2)], 3),
]
edges = [("root", "v1"), ("root", "v2"), ("root", "v3"),
         ("v1", "v1a"), ("v2", "v2a"), ("v3", "v3a1"),
         ("v1a", "v1a1"), ("v1a", "v1a2"), ("v2a", "v2a1"), ("v2a", "v2a2")]
lateral = [("v1", "v2", "bool_and"), ("v2", "v3", "bool_and"),
           ("v1a1", "v1a2", "bool_and"), ("v2a1", "v2a2", "temporal_before")]

doc = {
    "edges": [{"child": c, "parent": p} for p, c in edges],
    "instruction": INSTRUCTION,
    "lateral": [{"from": a, "to": b, "type": t} for a, b, t in lateral],
    "nodes": [{"formula": f, "id": i, "level": lvl, "spans": sp} for i, f, sp, lvl in nodes],
    "root": "root",
}
out = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures" / "sorting_hlt.json"
out.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
print(out)
