"""Make new exact solutions from old ones and check them.

Three routes: move a solution with a symmetry flow, carry it between the
rotating and the rest frame, and lift a Klein-Gordon wave through the
sheared-plane reduction.  Run with ``python3 demos/new_solutions.py``.
"""

import sympy as sp

from vortsym import solutions as S
from vortsym.generators import flow, frame_transform, plane_basis, sphere_basis
from vortsym.timefn import TimeFunction
from vortsym.verify import PT, QT, PlaneGrid, SphereGrid, kg_inverse, lift, residual_plane, residual_sphere

plane_grid = PlaneGrid(times=(0.0, 0.5, 1.0))

# A Rossby wave boosted by a time-dependent shift X(t^2) is still a solution.
wave = S.rossby_wave(A=1.0, k=1.0, l=2.0)
boosted = flow(plane_basis("X", TimeFunction.parse("t**2")), 0.8).pushforward(wave.field)
print(sp.simplify(boosted.expr))
print("boosted wave residual", residual_plane(boosted, plane_grid).max_norm)

# A Rossby-Haurwitz wave tilted by a rotation about a horizontal axis: only
# the rest-frame equation has this symmetry, so change frames first.
rh = S.rossby_haurwitz(A=0.6, n=2, m=1, omega=1.0)
rest = frame_transform(rh.field, 1.0, "toRest")
tilted = flow(sphere_basis("J2"), 0.4).pushforward(rest)
grid = SphereGrid(64, 32, delta=0.05, times=(0.0, 0.3, 0.6))
print("tilted wave residual (rest frame)", residual_sphere(tilted, grid, omega=0.0).max_norm)
back = frame_transform(tilted, 1.0, "toRotating")
print("tilted wave residual (rotating frame)", residual_sphere(back, grid, omega=1.0).max_norm)

# Klein-Gordon harmonic -> reduced solution -> full solution with shear f(t) = t.
k, beta = 1.5, 1.0
harmonic = sp.sin(k * PT + beta / k * QT)
v = kg_inverse(harmonic, "t", h="t", beta=beta)
psi = lift("P3", v, {"beta": beta, "f": "t"})
print(sp.simplify(psi.expr))
print("sheared wave residual", residual_plane(psi, plane_grid, beta=beta).max_norm)
