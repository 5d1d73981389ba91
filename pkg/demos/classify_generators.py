"""Bring one-dimensional subalgebras to canonical form and replay the witness.

Run with ``python3 demos/classify_generators.py``.
"""

from vortsym.classify import adjoint_closed, normalize_1d, replay_witness
from vortsym.generators import distance, plane_basis, sphere_basis
from vortsym.timefn import TimeFunction

generators = [
    plane_basis("D").scale(2) + plane_basis("dt").scale(3),
    plane_basis("dt") + plane_basis("dy").scale(5),
    plane_basis("dy") + plane_basis("X", TimeFunction.parse("sin(t)")) + plane_basis("Z", TimeFunction.parse("t**2")),
    sphere_basis("J2") + sphere_basis("J3").scale(0.5),
    sphere_basis("dt") + sphere_basis("J1").scale(0.7) + sphere_basis("Z", TimeFunction.parse("cos(2*t)")),
]

for v in generators:
    r = normalize_1d(v)
    replayed = replay_witness(v, r.steps, r.scale)
    gap = max(distance(replayed, r.representative, r.domain))
    print(f"{r.class_id:6s} {v!r}")
    print(f"       -> {r.representative!r}  (scale {r.scale:.4g}, replay gap {gap:.1e})")
    for step in r.steps:
        print(f"          Ad(exp({step.param!r} * {step.element}))")

# The class does not change when the generator is moved by an adjoint action.
v = generators[2]
moved = adjoint_closed(plane_basis("D"), 0.7, adjoint_closed(plane_basis("dt"), -1.2, v))
print(normalize_1d(v).class_id, normalize_1d(moved).class_id)
