"""Doubly periodic beta-plane integrator.

    zeta_t = -J(psi, zeta) - beta psi_x,   laplacian_h psi = zeta

The Jacobian is Arakawa's energy- and enstrophy-conserving nine-point form,
``psi`` is recovered with an FFT solve that inverts the same five-point
Laplacian used to build ``zeta`` (so the Poisson relation holds to rounding),
and time stepping is classical fourth-order Runge–Kutta.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

CFL_LIMIT = 0.5
POISSON_TOL = 1e-10


class PoissonError(RuntimeError):
    """The periodic Poisson problem has no solution (nonzero mean vorticity)."""


class CFLWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PeriodicGrid:
    Lx: float
    Ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValueError("periodic grid needs at least 4 points per direction")
        if self.Lx <= 0 or self.Ly <= 0:
            raise ValueError("domain lengths must be positive")

    @property
    def hx(self) -> float:
        return self.Lx / self.nx

    @property
    def hy(self) -> float:
        return self.Ly / self.ny

    def mesh(self):
        """``(x, y)`` arrays of shape ``(nx, ny)``."""
        x = np.arange(self.nx) * self.hx
        y = np.arange(self.ny) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def laplacian_symbol(self) -> np.ndarray:
        """Eigenvalues of the five-point Laplacian on the rfft2 wavenumbers."""
        kx = 2 * np.pi * np.fft.fftfreq(self.nx)
        ky = 2 * np.pi * np.fft.rfftfreq(self.ny)
        sx = (2 * np.cos(kx) - 2) / self.hx**2
        sy = (2 * np.cos(ky) - 2) / self.hy**2
        return sx[:, None] + sy[None, :]


@dataclass(frozen=True)
class SimState:
    grid: PeriodicGrid
    zeta: np.ndarray
    psi: np.ndarray
    t: float
    beta: float
    dt: float


# ----------------------------------------------------------------------
# discrete operators
# ----------------------------------------------------------------------

def laplacian(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return (
        (np.roll(f, -1, 0) - 2 * f + np.roll(f, 1, 0)) / grid.hx**2
        + (np.roll(f, -1, 1) - 2 * f + np.roll(f, 1, 1)) / grid.hy**2
    )


def ddx(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return (np.roll(f, -1, 0) - np.roll(f, 1, 0)) / (2 * grid.hx)


def ddy(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return (np.roll(f, -1, 1) - np.roll(f, 1, 1)) / (2 * grid.hy)


def arakawa_jacobian(a: np.ndarray, b: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """``a_x b_y - a_y b_x`` as the mean of Arakawa's three second-order forms."""

    def s(f, i, j):
        # value at (x + i h, y + j h)
        return np.roll(np.roll(f, -i, 0), -j, 1)

    jpp = (s(a, 1, 0) - s(a, -1, 0)) * (s(b, 0, 1) - s(b, 0, -1)) - (s(a, 0, 1) - s(a, 0, -1)) * (
        s(b, 1, 0) - s(b, -1, 0)
    )
    jpx = (
        s(a, 1, 0) * (s(b, 1, 1) - s(b, 1, -1))
        - s(a, -1, 0) * (s(b, -1, 1) - s(b, -1, -1))
        - s(a, 0, 1) * (s(b, 1, 1) - s(b, -1, 1))
        + s(a, 0, -1) * (s(b, 1, -1) - s(b, -1, -1))
    )
    jxp = (
        s(b, 0, 1) * (s(a, 1, 1) - s(a, -1, 1))
        - s(b, 0, -1) * (s(a, 1, -1) - s(a, -1, -1))
        - s(b, 1, 0) * (s(a, 1, 1) - s(a, 1, -1))
        + s(b, -1, 0) * (s(a, -1, 1) - s(a, -1, -1))
    )
    return (jpp + jpx + jxp) / (12 * grid.hx * grid.hy)


def solve_poisson(zeta: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """Mean-free ``psi`` with ``laplacian(psi) = zeta``.

    Raises:
        PoissonError: if ``zeta`` has a nonzero mean or the relative residual
            exceeds ``POISSON_TOL``.
    """
    scale = max(float(np.max(np.abs(zeta))), 1e-300)
    if abs(float(np.mean(zeta))) > 1e-12 * scale:
        raise PoissonError("periodic Poisson problem needs mean-free vorticity")
    sym = grid.laplacian_symbol()
    sym[0, 0] = 1.0
    zh = np.fft.rfft2(zeta)
    zh[0, 0] = 0.0
    psi = np.fft.irfft2(zh / sym, s=zeta.shape)
    res = float(np.max(np.abs(laplacian(psi, grid) - zeta)))
    if res > POISSON_TOL * scale:
        raise PoissonError(f"Poisson residual {res:.3e} exceeds tolerance")
    return psi


def tendency(zeta: np.ndarray, grid: PeriodicGrid, beta: float):
    psi = solve_poisson(zeta, grid)
    return -arakawa_jacobian(psi, zeta, grid) - beta * ddx(psi, grid), psi


# ----------------------------------------------------------------------
# stepping
# ----------------------------------------------------------------------

def initial_state(psi: np.ndarray, grid: PeriodicGrid, beta: float, dt: float, t: float = 0.0) -> SimState:
    """State whose vorticity is the discrete Laplacian of ``psi``."""
    psi = np.asarray(psi, float)
    if psi.shape != (grid.nx, grid.ny):
        raise ValueError(f"psi has shape {psi.shape}, grid is {(grid.nx, grid.ny)}")
    zeta = laplacian(psi, grid)
    zeta -= zeta.mean()  # the discrete Laplacian is mean-free up to rounding
    return SimState(grid, zeta, solve_poisson(zeta, grid), float(t), float(beta), float(dt))


def cfl_number(state: SimState) -> float:
    g = state.grid
    speed = np.sqrt(ddx(state.psi, g) ** 2 + ddy(state.psi, g) ** 2)
    return state.dt * float(np.max(speed)) / min(g.hx, g.hy)


def step(state: SimState) -> SimState:
    """Advance one RK4 step."""
    cfl = cfl_number(state)
    if cfl > CFL_LIMIT:
        warnings.warn(f"CFL number {cfl:.3f} exceeds {CFL_LIMIT}", CFLWarning, stacklevel=2)
    g, b, dt = state.grid, state.beta, state.dt
    z = state.zeta
    k1, _ = tendency(z, g, b)
    k2, _ = tendency(z + 0.5 * dt * k1, g, b)
    k3, _ = tendency(z + 0.5 * dt * k2, g, b)
    k4, _ = tendency(z + dt * k3, g, b)
    z_new = z + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return replace(state, zeta=z_new, psi=solve_poisson(z_new, g), t=state.t + dt)


def energy(state: SimState) -> float:
    """``sum |grad psi|^2 hx hy`` with one-sided differences (equals ``-sum psi zeta``)."""
    g = state.grid
    gx = (np.roll(state.psi, -1, 0) - state.psi) / g.hx
    gy = (np.roll(state.psi, -1, 1) - state.psi) / g.hy
    return math.fsum((gx * gx + gy * gy).ravel()) * g.hx * g.hy


def enstrophy(state: SimState) -> float:
    g = state.grid
    return math.fsum((state.zeta * state.zeta).ravel()) * g.hx * g.hy


@dataclass
class Trajectory:
    """Snapshots of vorticity plus per-step diagnostics."""

    grid: PeriodicGrid
    times: np.ndarray
    zeta: np.ndarray  # (n_snapshots, nx, ny)
    diag_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    energy: np.ndarray = field(default_factory=lambda: np.empty(0))
    enstrophy: np.ndarray = field(default_factory=lambda: np.empty(0))
    mean_zeta: np.ndarray = field(default_factory=lambda: np.empty(0))

    def diagnostics_rows(self):
        return np.column_stack([self.diag_times, self.energy, self.enstrophy, self.mean_zeta])


def run(state: SimState, steps: int, sample_every: int = 1) -> tuple[SimState, Trajectory]:
    """Integrate ``steps`` steps, keeping a snapshot every ``sample_every`` steps."""
    if steps < 0 or sample_every < 1:
        raise ValueError("steps must be >= 0 and sample_every >= 1")
    snaps, snap_t = [state.zeta], [state.t]
    dts, en, ens, mz = [state.t], [energy(state)], [enstrophy(state)], [float(np.mean(state.zeta))]
    for n in range(1, steps + 1):
        state = step(state)
        dts.append(state.t)
        en.append(energy(state))
        ens.append(enstrophy(state))
        mz.append(float(np.mean(state.zeta)))
        if n % sample_every == 0:
            snaps.append(state.zeta)
            snap_t.append(state.t)
    traj = Trajectory(state.grid, np.array(snap_t), np.array(snaps), np.array(dts), np.array(en), np.array(ens),
                      np.array(mz))
    return state, traj


def sample_trajectory(zeta_fn, grid: PeriodicGrid, times) -> Trajectory:
    """Trajectory of an analytic vorticity ``zeta_fn(t, x, y)``."""
    x, y = grid.mesh()
    times = np.asarray(times, float)
    return Trajectory(grid, times, np.array([zeta_fn(t, x, y) * np.ones_like(x) for t in times]))


def measure_phase_speed(traj: Trajectory, wavevector) -> float:
    """Zonal phase speed ``omega / k`` of the ``(k, l)`` harmonic.

    The vorticity is projected onto ``exp(-i(kx + ly))``; for a travelling
    wave the projection's phase is ``-omega t + const``, so a least-squares
    fit of the unwrapped phase gives ``omega``.

    Raises:
        ValueError: for fewer than three snapshots, a zero ``k`` or a
            projection amplitude below 1e-8.
    """
    k, l = map(float, wavevector)
    if k == 0:
        raise ValueError("zonal phase speed needs k != 0")
    if len(traj.times) < 3:
        raise ValueError("need at least three snapshots")
    x, y = traj.grid.mesh()
    kernel = np.exp(-1j * (k * x + l * y))
    proj = np.einsum("nij,ij->n", traj.zeta, kernel) / x.size
    if np.min(np.abs(proj)) < 1e-8:
        raise ValueError("projection onto the wave harmonic is degenerate")
    phase = np.unwrap(np.angle(proj))
    slope = np.polyfit(traj.times - traj.times[0], phase - phase[0], 1)[0]
    span = traj.times[-1] - traj.times[0]
    if slope != 0 and span < 2 * np.pi / abs(slope):
        warnings.warn("trajectory spans less than one wave period", stacklevel=2)
    return float(-slope / k)


def rossby_phase_speed(k: float, l: float, beta: float) -> float:
    """Continuous dispersion relation ``-beta / (k^2 + l^2)``."""
    return -beta / (k * k + l * l)


__all__ = [
    "CFLWarning",
    "PeriodicGrid",
    "PoissonError",
    "SimState",
    "Trajectory",
    "arakawa_jacobian",
    "cfl_number",
    "energy",
    "enstrophy",
    "initial_state",
    "laplacian",
    "measure_phase_speed",
    "rossby_phase_speed",
    "run",
    "sample_trajectory",
    "solve_poisson",
    "step",
]
