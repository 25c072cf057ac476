"""Benchmark problems with exact solutions and error metrics.

Five problems exercise the integrators:

* :func:`prob1` -- scalar index-1 DAE with logarithmic solution,
* :func:`prothero_robinson` -- the classic stiffness test (pure ODE),
* :func:`parabolic` -- method-of-lines diffusion with a cubic manufactured
  solution (the second difference of a cubic is exact, so the nodal exact
  solution solves the semi-discrete system too),
* :func:`hyperbolic` -- upwinded advection with a solution linear in x,
  again nodally exact,
* :func:`pendulum` -- chain of point masses on rigid rods, written as a
  semi-explicit index-1 system via the twice-differentiated constraint.

Each returns a :class:`Benchmark` bundling the problem in whichever forms
make sense (mass-matrix and/or semi-explicit), the exact solution where one
exists, and metric plumbing used by the CLI and the reproduction harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit

from .errors import (
    InconsistentInitialState,
    MissingDenseCoefficients,
    MissingExactSolution,
)
from .linalg import lu_factor, lu_solve
from .steppers import MassMatrixProblem, SemiExplicitDAE, Trajectory, interpolate

__all__ = [
    "Benchmark",
    "ErrorMetrics",
    "prob1",
    "prothero_robinson",
    "parabolic",
    "hyperbolic",
    "pendulum",
    "error_metrics",
    "BENCHMARKS",
]


@dataclass
class Benchmark:
    """One benchmark problem in the forms the steppers understand."""

    name: str
    t_end: float
    n_diff: int
    semi_explicit: Optional[SemiExplicitDAE] = None
    mass_matrix: Optional[MassMatrixProblem] = None
    exact: Optional[Callable] = None  # t -> stacked state
    stiff: bool = False
    custom_error: Optional[Callable] = None  # Trajectory -> float

    def problem_for(self, tab) -> object:
        """The problem form matching the tableau's kind."""
        p = self.mass_matrix if tab.kind == "row" else self.semi_explicit
        if p is None:
            raise ValueError(
                f"benchmark {self.name!r} has no {tab.kind!r}-compatible form"
            )
        return p

    def exact_states(self, ts) -> np.ndarray:
        if self.exact is None:
            raise MissingExactSolution(f"benchmark {self.name!r} has no exact solution")
        return np.array([self.exact(t) for t in np.atleast_1d(ts)])


# ---------------------------------------------------------------------------
# problem 1: scalar DAE with logarithmic solution


def prob1() -> Benchmark:
    """y' = z/y, 0 = y/z - t on t in [2, 4]; exact y = ln t, z = ln(t)/t."""

    def f(t, y, z):
        return z / y[0]

    def g(t, y, z):
        return np.array([y[0] / z[0] - t])

    def g_y(t, y, z):
        return np.array([[1.0 / z[0]]])

    def g_z(t, y, z):
        return np.array([[-y[0] / z[0] ** 2]])

    def g_t(t, y, z):
        return np.array([-1.0])

    ln2 = math.log(2.0)
    dae = SemiExplicitDAE(
        f=f, g=g, t0=2.0, y0=[ln2], z0=[ln2 / 2.0],
        g_y=g_y, g_z=g_z, g_t=g_t, name="prob1",
    )

    def f_full(t, u):
        return np.array([u[1] / u[0], u[0] / u[1] - t])

    def jac_full(t, u):
        return np.array(
            [
                [-u[1] / u[0] ** 2, 1.0 / u[0]],
                [1.0 / u[1], -u[0] / u[1] ** 2],
            ]
        )

    def ft_full(t, u):
        return np.array([0.0, -1.0])

    mm = MassMatrixProblem(
        mass=np.diag([1.0, 0.0]), f=f_full, t0=2.0, y0=[ln2, ln2 / 2.0],
        jac=jac_full, f_t=ft_full, name="prob1",
    )

    def exact(t):
        return np.array([math.log(t), math.log(t) / t])

    return Benchmark(
        name="prob1", t_end=4.0, n_diff=1,
        semi_explicit=dae, mass_matrix=mm, exact=exact,
    )


# ---------------------------------------------------------------------------
# problem 2: Prothero-Robinson


def prothero_robinson(lam: float = 10.0) -> Benchmark:
    """y' = -lam*(y - q(t)) + q'(t) with q(t) = 10 - (10+t)exp(-t), t in [0, 2].

    The exact solution is q itself since y0 = q(0) = 0; ``lam`` sets the
    stiffness.  Exposed in both forms; the semi-explicit one has no
    algebraic part and exercises the explicit stepper path.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")

    def q(t):
        return 10.0 - (10.0 + t) * math.exp(-t)

    def qp(t):
        return (9.0 + t) * math.exp(-t)

    def qpp(t):
        return -(8.0 + t) * math.exp(-t)

    def f_ode(t, y):
        return np.array([-lam * (y[0] - q(t)) + qp(t)])

    mm = MassMatrixProblem(
        mass=np.eye(1), f=f_ode, t0=0.0, y0=[0.0],
        jac=lambda t, y: np.array([[-lam]]),
        f_t=lambda t, y: np.array([lam * qp(t) + qpp(t)]),
        name="prothero-robinson",
    )
    dae = SemiExplicitDAE(
        f=lambda t, y, z: f_ode(t, y), g=None, t0=0.0, y0=[0.0],
        name="prothero-robinson",
    )
    return Benchmark(
        name="prothero-robinson", t_end=2.0, n_diff=1,
        semi_explicit=dae, mass_matrix=mm,
        exact=lambda t: np.array([q(t)]),
    )


# ---------------------------------------------------------------------------
# problem 3: diffusion with manufactured cubic solution


def parabolic(nx: int = 250) -> Benchmark:
    """u_t = u_xx + u^2 + h(x,t) on x in (-1,1), t in [0,1]; u = x^3 e^t.

    Central second differences on ``nx`` interior points with Dirichlet
    values from the exact solution.  The forcing makes the cubic profile an
    exact solution of the PDE *and* of the semi-discrete system (a cubic
    has no fourth derivative, so the difference stencil is exact).
    """
    if nx < 3:
        raise ValueError("nx must be at least 3")
    dx = 2.0 / (nx + 1)
    x = -1.0 + dx * np.arange(1, nx + 1)
    x3 = x**3
    x6 = x**6
    inv_dx2 = 1.0 / dx**2
    lap = (
        np.diag(np.full(nx, -2.0 * inv_dx2))
        + np.diag(np.full(nx - 1, inv_dx2), 1)
        + np.diag(np.full(nx - 1, inv_dx2), -1)
    )

    def f(t, u):
        et = math.exp(t)
        out = np.empty(nx)
        out[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) * inv_dx2
        out[0] = (-et - 2.0 * u[0] + u[1]) * inv_dx2
        out[-1] = (u[-2] - 2.0 * u[-1] + et) * inv_dx2
        out += u * u + (x3 - 6.0 * x) * et - x6 * (et * et)
        return out

    def jac(t, u):
        return lap + np.diag(2.0 * u)

    def f_t(t, u):
        et = math.exp(t)
        out = (x3 - 6.0 * x) * et - 2.0 * x6 * (et * et)
        out[0] -= et * inv_dx2
        out[-1] += et * inv_dx2
        return out

    mm = MassMatrixProblem(
        mass=np.eye(nx), f=f, t0=0.0, y0=x3.copy(),
        jac=jac, f_t=f_t, name="parabolic",
    )
    dae = SemiExplicitDAE(
        f=lambda t, y, z: f(t, y), g=None, t0=0.0, y0=x3.copy(), name="parabolic"
    )
    return Benchmark(
        name="parabolic", t_end=1.0, n_diff=nx,
        semi_explicit=dae, mass_matrix=mm,
        exact=lambda t: x3 * math.exp(t), stiff=True,
    )


# ---------------------------------------------------------------------------
# problem 4: advection with upwind differences


def hyperbolic(nx: int = 250) -> Benchmark:
    """u_t = -u_x + g(x,t) on x in (0,1], t in [0,1]; u = (1+x)/(1+t).

    First-order upwind differences with the inflow value u(0,t) = 1/(1+t).
    The solution is linear in x, so the upwind stencil is exact in space
    and the semi-discrete system is solved exactly by the nodal values.
    """
    if nx < 2:
        raise ValueError("nx must be at least 2")
    dx = 1.0 / nx
    x = dx * np.arange(1, nx + 1)
    inv_dx = 1.0 / dx
    jac_const = -inv_dx * np.eye(nx) + inv_dx * np.diag(np.ones(nx - 1), -1)
    jac_const.setflags(write=False)
    one_plus_x = 1.0 + x

    def f(t, u):
        s = 1.0 + t
        out = np.empty(nx)
        out[0] = -(u[0] - 1.0 / s) * inv_dx
        out[1:] = -(u[1:] - u[:-1]) * inv_dx
        out += 1.0 / s - one_plus_x / s**2
        return out

    def f_t(t, u):
        s = 1.0 + t
        out = -1.0 / s**2 + 2.0 * one_plus_x / s**3
        out[0] += -inv_dx / s**2
        return out

    mm = MassMatrixProblem(
        mass=np.eye(nx), f=f, t0=0.0, y0=one_plus_x.copy(),
        jac=lambda t, u: jac_const, f_t=f_t, name="hyperbolic",
    )
    dae = SemiExplicitDAE(
        f=lambda t, y, z: f(t, y), g=None, t0=0.0, y0=one_plus_x.copy(),
        name="hyperbolic",
    )
    return Benchmark(
        name="hyperbolic", t_end=1.0, n_diff=nx,
        semi_explicit=dae, mass_matrix=mm,
        exact=lambda t: one_plus_x / (1.0 + t), stiff=True,
    )


# ---------------------------------------------------------------------------
# problem 5: chain pendulum
#
# State u = [x, y, vx, vy] (blocks of n), algebraic z = lambda (rod
# tensions, negative when the rod pulls).  The constraint used is the
# twice-differentiated rod-length condition, which is linear in lambda.
# Kernels are jit-compiled: the adaptive runs take ~1e5 steps with a dozen
# evaluations each.


@njit(cache=True)
def _pend_accel(x, y, lam, m, grav):
    n = x.shape[0]
    ax = np.empty(n)
    ay = np.empty(n)
    for i in range(n):
        dx = x[i] - (x[i - 1] if i else 0.0)
        dy = y[i] - (y[i - 1] if i else 0.0)
        fx = lam[i] * dx
        fy = lam[i] * dy
        if i + 1 < n:
            fx -= lam[i + 1] * (x[i + 1] - x[i])
            fy -= lam[i + 1] * (y[i + 1] - y[i])
        ax[i] = fx / m[i]
        ay[i] = -grav + fy / m[i]
    return ax, ay


@njit(cache=True)
def _pend_f(u, lam, m, grav):
    n = lam.shape[0]
    x, y = u[0:n], u[n : 2 * n]
    ax, ay = _pend_accel(x, y, lam, m, grav)
    out = np.empty(4 * n)
    out[0 : 2 * n] = u[2 * n : 4 * n]
    out[2 * n : 3 * n] = ax
    out[3 * n : 4 * n] = ay
    return out


@njit(cache=True)
def _pend_g(u, lam, m, grav):
    n = lam.shape[0]
    x, y = u[0:n], u[n : 2 * n]
    vx, vy = u[2 * n : 3 * n], u[3 * n : 4 * n]
    ax, ay = _pend_accel(x, y, lam, m, grav)
    out = np.empty(n)
    for i in range(n):
        dvx = vx[i] - (vx[i - 1] if i else 0.0)
        dvy = vy[i] - (vy[i - 1] if i else 0.0)
        dx = x[i] - (x[i - 1] if i else 0.0)
        dy = y[i] - (y[i - 1] if i else 0.0)
        dax = ax[i] - (ax[i - 1] if i else 0.0)
        day = ay[i] - (ay[i - 1] if i else 0.0)
        out[i] = dvx * dvx + dvy * dvy + dx * dax + dy * day
    return out


@njit(cache=True)
def _pend_gz(u, m):
    """d(constraint)/d(lambda): tridiagonal, independent of lambda."""
    n = m.shape[0]
    x, y = u[0:n], u[n : 2 * n]
    out = np.zeros((n, n))
    for i in range(n):
        dx = x[i] - (x[i - 1] if i else 0.0)
        dy = y[i] - (y[i - 1] if i else 0.0)
        diag = (dx * dx + dy * dy) / m[i]
        if i:
            dxm = x[i - 1] - (x[i - 2] if i > 1 else 0.0)
            dym = y[i - 1] - (y[i - 2] if i > 1 else 0.0)
            diag += (dx * dx + dy * dy) / m[i - 1]
            out[i, i - 1] = -(dx * dxm + dy * dym) / m[i - 1]
        if i + 1 < n:
            dxp = x[i + 1] - x[i]
            dyp = y[i + 1] - y[i]
            out[i, i + 1] = -(dx * dxp + dy * dyp) / m[i]
        out[i, i] = diag
    return out


@njit(cache=True)
def _pend_gy(u, lam, m, grav):
    """d(constraint)/d(x, y, vx, vy), shape (n, 4n)."""
    n = lam.shape[0]
    x, y = u[0:n], u[n : 2 * n]
    vx, vy = u[2 * n : 3 * n], u[3 * n : 4 * n]
    ax, ay = _pend_accel(x, y, lam, m, grav)
    out = np.zeros((n, 4 * n))
    for i in range(n):
        dx = x[i] - (x[i - 1] if i else 0.0)
        dy = y[i] - (y[i - 1] if i else 0.0)
        dvx = vx[i] - (vx[i - 1] if i else 0.0)
        dvy = vy[i] - (vy[i - 1] if i else 0.0)
        dax = ax[i] - (ax[i - 1] if i else 0.0)
        day = ay[i] - (ay[i - 1] if i else 0.0)
        # velocity columns
        out[i, 2 * n + i] = 2.0 * dvx
        out[i, 3 * n + i] = 2.0 * dvy
        if i:
            out[i, 2 * n + i - 1] = -2.0 * dvx
            out[i, 3 * n + i - 1] = -2.0 * dvy
        # position columns: direct dependence through dx, dy ...
        out[i, i] += dax
        out[i, n + i] += day
        if i:
            out[i, i - 1] -= dax
            out[i, n + i - 1] -= day
        # ... and through the acceleration difference (banded in i-2..i+1)
        lam_next = lam[i + 1] if i + 1 < n else 0.0
        dii = (lam[i] + lam_next) / m[i]
        if i:
            dii += lam[i] / m[i - 1]
        out[i, i] += dx * dii
        out[i, n + i] += dy * dii
        if i:
            lam_prev2 = lam[i - 1]
            d_im1 = -lam[i] / m[i] - (lam_prev2 + lam[i]) / m[i - 1]
            out[i, i - 1] += dx * d_im1
            out[i, n + i - 1] += dy * d_im1
            if i > 1:
                d_im2 = lam[i - 1] / m[i - 1]
                out[i, i - 2] += dx * d_im2
                out[i, n + i - 2] += dy * d_im2
        if i + 1 < n:
            d_ip1 = -lam_next / m[i]
            out[i, i + 1] += dx * d_ip1
            out[i, n + i + 1] += dy * d_ip1
    return out


def pendulum(
    n: int = 5,
    masses=None,
    lengths=None,
    gravity: float = 9.81,
    angles=None,
    speeds=None,
) -> Benchmark:
    """Chain of ``n`` masses on rigid rods hung from the origin.

    ``angles`` are measured from the downward vertical (``pi/2`` puts a rod
    horizontal); ``speeds`` are angular velocities.  The default is the
    whole chain stretched horizontally at rest.  Initial rod tensions are
    computed by solving the (linear-in-lambda) twice-differentiated
    constraint, so the returned problem always starts consistently;
    inconsistent *positions* raise :class:`InconsistentInitialState`.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    m = np.full(n, 1.0) if masses is None else np.asarray(masses, dtype=float)
    L = np.full(n, 1.0) if lengths is None else np.asarray(lengths, dtype=float)
    if m.shape != (n,) or L.shape != (n,):
        raise ValueError("masses and lengths must have length n")
    if np.any(L <= 0) or np.any(m <= 0):
        raise ValueError("masses and lengths must be positive")

    if angles is None:
        x = np.cumsum(L)
        y = np.zeros(n)
    else:
        th = np.asarray(angles, dtype=float)
        x = np.cumsum(L * np.sin(th))
        y = np.cumsum(-L * np.cos(th))
    if speeds is None:
        vx = np.zeros(n)
        vy = np.zeros(n)
    else:
        om = np.asarray(speeds, dtype=float)
        th = np.zeros(n) if angles is None else np.asarray(angles, dtype=float)
        vx = np.cumsum(L * om * np.cos(th))
        vy = np.cumsum(L * om * np.sin(th))
    u0 = np.concatenate([x, y, vx, vy])

    dist = np.hypot(np.diff(x, prepend=0.0), np.diff(y, prepend=0.0))
    worst = np.max(np.abs(dist - L))
    if worst > 1e-10:
        raise InconsistentInitialState(
            f"rod-length violation {worst:.3e} exceeds 1e-10 at t0"
        )

    # consistent tensions: constraint is affine in lambda
    g_at_zero = _pend_g(u0, np.zeros(n), m, gravity)
    gz0 = _pend_gz(u0, m)
    lam0 = lu_solve(lu_factor(gz0), -g_at_zero)

    dae = SemiExplicitDAE(
        f=lambda t, y_, z: _pend_f(y_, z, m, gravity),
        g=lambda t, y_, z: _pend_g(y_, z, m, gravity),
        t0=0.0,
        y0=u0,
        z0=lam0,
        g_y=lambda t, y_, z: _pend_gy(y_, z, m, gravity),
        g_z=lambda t, y_, z: _pend_gz(y_, m),
        g_t=lambda t, y_, z: np.zeros(n),
        name="pendulum",
    )

    total_length = float(np.sum(L))

    def length_error(traj: Trajectory) -> float:
        xs = traj.states[:, 0:n]
        ys = traj.states[:, n : 2 * n]
        dxs = np.diff(xs, axis=1, prepend=0.0)
        dys = np.diff(ys, axis=1, prepend=0.0)
        total = np.sum(np.hypot(dxs, dys), axis=1)
        return float(np.max(np.abs(total - total_length)))

    return Benchmark(
        name="pendulum", t_end=100.0, n_diff=4 * n,
        semi_explicit=dae, custom_error=length_error,
    )


# ---------------------------------------------------------------------------
# metrics

BENCHMARKS = {
    "prob1": prob1,
    "prothero-robinson": prothero_robinson,
    "parabolic": parabolic,
    "hyperbolic": hyperbolic,
    "pendulum": pendulum,
}


@dataclass
class ErrorMetrics:
    """Error measures of one trajectory against a benchmark.

    ``endpoint`` is the maximum-norm error at ``t_end``; ``l2_steps`` is
    the root-mean-square over all accepted steps and components;
    ``l2_interp`` samples the dense output at 100 evenly spaced times
    (None when the trajectory carries no dense segments); ``custom`` is the
    benchmark-specific measure (pendulum length defect).
    """

    endpoint: Optional[float] = None
    l2_steps: Optional[float] = None
    l2_interp: Optional[float] = None
    custom: Optional[float] = None


def error_metrics(traj: Trajectory, bench: Benchmark) -> ErrorMetrics:
    """All applicable error measures of ``traj`` for ``bench``."""
    if bench.exact is None and bench.custom_error is None:
        raise MissingExactSolution(
            f"benchmark {bench.name!r} has neither exact solution nor custom metric"
        )
    out = ErrorMetrics()
    if bench.custom_error is not None:
        out.custom = float(bench.custom_error(traj))
    if bench.exact is None:
        return out
    exact_t = bench.exact_states(traj.ts)
    diff = traj.states - exact_t
    out.endpoint = float(np.max(np.abs(diff[-1])))
    out.l2_steps = float(np.sqrt(np.mean(diff**2)))
    if traj.segments is not None:
        ts = np.linspace(traj.ts[0], traj.ts[-1], 100)
        try:
            vals = interpolate(traj, ts)
        except MissingDenseCoefficients:
            return out
        diff100 = vals - bench.exact_states(ts)
        out.l2_interp = float(np.sqrt(np.mean(diff100**2)))
    return out
