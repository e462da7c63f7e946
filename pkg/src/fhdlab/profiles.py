"""Travelling-wave profile construction by two independent routes.

Route 1 (quadrature): integrate dxi/dv = 1/sqrt(-2 S(v)) from the turning
point v_turn = lambda/v0^2 toward the background v0, invert the monotone
table and mirror. The simple root at v_turn gives an integrable
1/sqrt(v - v_turn) singularity that disappears under the substitution
u = sqrt(v - v_turn); the double root at v0 makes xi(v) diverge
logarithmically, so the table stops at v0 - tail_cut and the remaining tail
is the linearized exponential v0 - C*exp(-kappa*xi) with
kappa = sqrt((v0^3 - lambda)/v0^3).

Route 2 (shooting): integrate v'' = (lambda/2)(1/v^2 - 1/v0^2) + (v - v0)
outward from the minimum (v(0) = v_turn, v'(0) = 0) with an adaptive
embedded Runge-Kutta pair. Shooting outward rides the unstable manifold of
the saddle at v0, so the integration is stopped once v comes within
TAIL_SWITCH_REL of the background and the same linearized tail takes over;
integrating further would let the accumulated error grow like
exp(+kappa*xi) and contaminate the tail.

The two constructions share no machinery beyond eval_S, which makes their
pointwise agreement a strong cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .core import Field, Grid1D, NumericalError, SolitonParams, Trajectory
from .pseudopotential import existence_check, turning_points

#: Default truncation of the quadrature table, relative to the orbit depth.
TAIL_CUT_REL = 1e-8

#: Fraction of the depth below v0 at which shooting hands over to the tail.
TAIL_SWITCH_REL = 1e-4

#: Shooting solver tolerances; the profile error budget must sit far below
#: the tolerances of the PDE runs it seeds.
SHOOT_RTOL = 1e-10
SHOOT_ATOL = 1e-12

#: Minimum half-width of a shooting grid, in units of the decay length 1/kappa.
MIN_DECAY_LENGTHS = 20.0


def decay_rate(params: SolitonParams) -> float:
    """Linearized tail decay rate sqrt((v0^3 - lambda)/v0^3) about v = v0."""
    lam, v0 = params.lambda_speed, params.v0
    arg = (v0**3 - lam) / v0**3
    if arg <= 0.0:
        raise ValueError("decay rate undefined outside the existence domain")
    return float(np.sqrt(arg))


def _require_admissible(params: SolitonParams) -> None:
    report = existence_check(params)
    if not report.admissible:
        raise ValueError(
            "no soliton for lambda={}, v0={}: requires 0 < lambda < v0^3 "
            "(S''(v0) = {:.3e})".format(
                params.lambda_speed, params.v0, report.s_second_at_v0
            )
        )


@dataclass(frozen=True)
class Profile:
    """A sampled travelling-wave profile v(xi), even about its minimum at xi=0."""

    xi: np.ndarray
    v: np.ndarray
    params: SolitonParams
    method: Literal["quadrature", "shooting"]

    def __post_init__(self) -> None:
        xi = np.asarray(self.xi, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if xi.shape != v.shape or xi.ndim != 1:
            raise ValueError("xi and v must be 1D arrays of equal length")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(v))):
            raise ValueError("profile samples must be finite")
        if np.any(np.diff(xi) <= 0.0):
            raise ValueError("xi samples must be strictly increasing")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class ProfileMetrics:
    depth: float
    fwhm: float


class QuadratureSolution:
    """Callable v(xi) built from the first-integral quadrature table.

    Inside the tabulated window the inverse map is a quintic Hermite
    interpolant with exact slopes dv/dxi = sqrt(-2 S(v)) and exact
    curvatures from the profile ODE; beyond it the linearized exponential
    tail is used. Even in xi by construction.
    """

    def __init__(self, params: SolitonParams, xi: np.ndarray, v: np.ndarray,
                 panel_defect: float):
        self.params = params
        self.xi = xi
        self.v = v
        self.kappa = decay_rate(params)
        self.panel_defect = panel_defect
        slopes = _orbit_slope(v, params)
        slopes[0] = 0.0
        lam, v0 = params.lambda_speed, params.v0
        curvatures = 0.5 * lam * (1.0 / v**2 - 1.0 / v0**2) + (v - v0)
        self._spline = BPoly.from_derivatives(
            xi, np.column_stack((v, slopes, curvatures))
        )
        self._xi_end = xi[-1]
        self._v_end = v[-1]

    def __call__(self, xi) -> np.ndarray:
        w = np.abs(np.asarray(xi, dtype=float))
        inside = w <= self._xi_end
        out = np.empty_like(w)
        out[inside] = self._spline(w[inside])
        v0 = self.params.v0
        out[~inside] = v0 - (v0 - self._v_end) * np.exp(
            -self.kappa * (w[~inside] - self._xi_end)
        )
        return out


def _orbit_slope(v: np.ndarray, params: SolitonParams) -> np.ndarray:
    """|dv/dxi| = sqrt(-2 S(v)) on the orbit, in the factorized form."""
    lam, v0 = params.lambda_speed, params.v0
    v_turn = lam / v0**2
    q = (v - v_turn) * (v0 - v) ** 2 / v
    return np.sqrt(np.maximum(q, 0.0))


def solve_quadrature(
    params: SolitonParams, n_points: int = 800, tail_cut: float | None = None
) -> QuadratureSolution:
    """Tabulate xi(v) by Gauss-Legendre panels in the regularized variable.

    With u = sqrt(v - v_turn) the flank integral becomes
    xi = int 2*sqrt(v_turn + u^2) / (v0 - v_turn - u^2) du, analytic on the
    whole panel range. Nodes cluster geometrically toward v0 where xi(v)
    diverges. Every panel is evaluated at two quadrature orders; their
    mismatch is the convergence diagnostic.
    """
    _require_admissible(params)
    tp = turning_points(params)
    v0, v_turn = params.v0, tp.v_turn
    depth = v0 - v_turn
    if tail_cut is None:
        tail_cut = TAIL_CUT_REL * depth
    if not (0.0 < tail_cut < 0.5 * depth):
        raise ValueError("tail_cut must lie strictly between 0 and half the depth")
    if n_points < 32:
        raise ValueError("need at least 32 quadrature nodes")

    # Lower half of the orbit: uniform in u (dense xi resolution around the
    # minimum). Upper half: geometric ladder in t = (v0 - v)/depth down to
    # the tail cut, resolving the logarithmic divergence of xi(v) at v0.
    n_lo = n_points // 2
    u_half = np.sqrt(0.5 * depth)
    u_lo = np.linspace(0.0, u_half, n_lo, endpoint=False)
    t_hi = np.exp(np.linspace(np.log(0.5), np.log(tail_cut / depth), n_points - n_lo))
    u_hi = np.sqrt(depth * (1.0 - t_hi))
    u = np.concatenate((u_lo, u_hi))
    v = v_turn + u**2
    v[0] = v_turn

    def panel_sums(order: int) -> np.ndarray:
        nodes, weights = leggauss(order)
        lo, hi = u[:-1], u[1:]
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        uu = mid[:, None] + half[:, None] * nodes[None, :]
        g = 2.0 * np.sqrt(v_turn + uu**2) / (v0 - v_turn - uu**2)
        return half * (g @ weights)

    coarse = panel_sums(16)
    fine = panel_sums(24)
    defect = float(np.max(np.abs(fine - coarse)))
    xi = np.concatenate(([0.0], np.cumsum(fine)))
    if defect > 1e-9 * (1.0 + xi[-1]):
        raise NumericalError(
            f"flank quadrature did not converge: max panel defect {defect:.3e} "
            f"over {n_points - 1} panels (lambda={params.lambda_speed}, v0={v0})"
        )
    return QuadratureSolution(params, xi, v, defect)


def profile_by_quadrature(
    params: SolitonParams, n_points: int = 800, tail_cut: float | None = None
) -> Profile:
    """Even profile from the first-integral quadrature, minimum at xi = 0."""
    sol = solve_quadrature(params, n_points=n_points, tail_cut=tail_cut)
    xi = np.concatenate((-sol.xi[:0:-1], sol.xi))
    v = np.concatenate((sol.v[:0:-1], sol.v))
    return Profile(xi=xi, v=v, params=params, method="quadrature")


class ShootingSolution:
    """Callable v(xi) from outward integration of the profile ODE.

    ``steps_xi`` / ``steps_v`` / ``steps_vp`` expose the accepted solver
    steps so the first integral can be audited along the actual solution.
    """

    def __init__(self, params: SolitonParams, ode_result, xi_requested: float):
        self.params = params
        self.kappa = decay_rate(params)
        self._dense = ode_result.sol
        self.steps_xi = ode_result.t
        self.steps_v = ode_result.y[0]
        self.steps_vp = ode_result.y[1]
        self.xi_switch = float(ode_result.t[-1])
        self._v_switch = float(ode_result.y[0, -1])
        self.xi_requested = xi_requested

    def __call__(self, xi) -> np.ndarray:
        w = np.abs(np.asarray(xi, dtype=float))
        inside = w <= self.xi_switch
        out = np.empty_like(w)
        if np.any(inside):
            out[inside] = self._dense(w[inside])[0]
        v0 = self.params.v0
        out[~inside] = v0 - (v0 - self._v_switch) * np.exp(
            -self.kappa * (w[~inside] - self.xi_switch)
        )
        return out


def solve_shooting(params: SolitonParams, xi_max: float) -> ShootingSolution:
    """Integrate the profile ODE outward from the minimum up to xi_max.

    Initial data v(0) = v_turn, v'(0) = 0 sit exactly on the first-integral
    level set. A terminal event at v = v0 - TAIL_SWITCH_REL*depth hands over
    to the analytic tail before the saddle's unstable direction can amplify
    the accumulated error.
    """
    _require_admissible(params)
    tp = turning_points(params)
    lam, v0 = params.lambda_speed, params.v0
    depth = v0 - tp.v_turn

    def rhs(_xi, y):
        v = y[0]
        return (y[1], 0.5 * lam * (1.0 / v**2 - 1.0 / v0**2) + (v - v0))

    v_stop = v0 - TAIL_SWITCH_REL * depth

    def reach_background(_xi, y):
        return y[0] - v_stop

    reach_background.terminal = True
    reach_background.direction = 1.0

    def collapse(_xi, y):
        return y[0] - 0.1 * tp.v_turn

    collapse.terminal = True
    collapse.direction = -1.0

    result = solve_ivp(
        rhs,
        (0.0, float(xi_max)),
        (tp.v_turn, 0.0),
        method="DOP853",
        rtol=SHOOT_RTOL,
        atol=SHOOT_ATOL,
        dense_output=True,
        events=(reach_background, collapse),
    )
    if not result.success:
        raise NumericalError(f"profile shooting failed: {result.message}")
    if result.t_events[1].size:
        raise NumericalError(
            "profile shooting collapsed toward v = 0; parameters or "
            "tolerances are inconsistent"
        )
    if result.y[0, -1] > v0:
        raise NumericalError("profile shooting overshot the background v0")
    return ShootingSolution(params, result, xi_requested=float(xi_max))


def _check_shooting_grid(params: SolitonParams, grid: Grid1D) -> None:
    if abs(grid.x_min + grid.x_max) > 1e-9 * grid.length:
        raise ValueError("shooting grid must be symmetric about xi = 0")
    half_width = 0.5 * grid.length
    kappa = decay_rate(params)
    if kappa * half_width < MIN_DECAY_LENGTHS:
        raise ValueError(
            f"grid half-width {half_width:g} spans only "
            f"{kappa * half_width:.1f} decay lengths; need at least "
            f"{MIN_DECAY_LENGTHS:g} for the tails to relax"
        )


def profile_by_shooting(params: SolitonParams, grid: Grid1D) -> Profile:
    """Shooting profile resampled onto a symmetric grid (even extension)."""
    _check_shooting_grid(params, grid)
    sol = solve_shooting(params, xi_max=0.5 * grid.length)
    return Profile(xi=grid.x, v=sol(grid.x), params=params, method="shooting")


def profile_metrics(profile: Profile) -> ProfileMetrics:
    """Depression depth v0 - min(v) and full width at half the depth.

    The half-depth crossings are located by linear interpolation on each
    flank; the width is their separation.
    """
    v0 = profile.params.v0
    v = profile.v
    depth = float(v0 - v.min())
    if depth < 1e-12:
        raise ValueError("profile is flat: no measurable depression")
    level = v0 - 0.5 * depth
    below = v < level
    idx = np.flatnonzero(below)
    if idx.size == 0 or idx[0] == 0 or idx[-1] == v.size - 1:
        raise ValueError("half-depth level is not bracketed inside the window")

    def cross(i_out: int, i_in: int) -> float:
        x0, x1 = profile.xi[i_out], profile.xi[i_in]
        f0, f1 = v[i_out] - level, v[i_in] - level
        return x0 + f0 * (x1 - x0) / (f0 - f1)

    left = cross(idx[0] - 1, idx[0])
    right = cross(idx[-1] + 1, idx[-1])
    return ProfileMetrics(depth=depth, fwhm=float(right - left))


def translated_trajectory(
    params: SolitonParams, grid: Grid1D, times: np.ndarray
) -> Trajectory:
    """Exact travelling-wave trajectory v(x, t) = profile(x - lambda*t).

    Frames are direct evaluations of the shooting solution at the shifted,
    periodically wrapped positions, so the trajectory solves the evolution
    equation up to profile accuracy alone (no time stepping involved).
    """
    if not grid.periodic:
        raise ValueError("translated trajectories require a periodic grid")
    _check_shooting_grid(params, grid)
    sol = solve_shooting(params, xi_max=0.5 * grid.length)
    times = np.asarray(times, dtype=float)
    x = grid.x
    length = grid.length
    frames = []
    for t in times:
        shifted = np.mod(x - params.lambda_speed * t - grid.x_min, length) + grid.x_min
        frames.append(Field(grid, sol(shifted)))
    return Trajectory(times=times, frames=tuple(frames))
