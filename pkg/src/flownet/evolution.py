"""Edge-density states and the exact two-parameter solution operator.

Each edge is parameterized by x in [0, 1] with material flowing from 1 toward
0. A state assigns one density per edge; fields sample states on a midpoint
grid x_r = (r + 1/2)/N, which keeps sample points off the characteristic
lines x + t - s in Z where solutions of discontinuous data are ambiguous.

The solver evaluates the closed form

    u(x, t) = A^k f(x + t - s - k),   A = M((t + x) mod 1),  k = floor(x + t - s),

valid for 1-periodic column-stochastic schedules: every boundary crossing of
a characteristic happens at times congruent mod 1, so one matrix power covers
all k crossings. An independent first-order upwind oracle cross-checks it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import expr as ex
from .errors import EvolutionError
from .schedules import TimeVaryingMatrix


@dataclass(frozen=True)
class ExprProfile:
    """Density profile given as an expression in the spatial variable x."""

    expr: ex.Expr

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = ex.evaluate(self.expr, np.asarray(x, dtype=float))
        return np.broadcast_to(out, np.shape(x)).astype(float)


@dataclass(frozen=True)
class PiecewiseProfile:
    """Piecewise-constant profile; right-continuous at its breakpoints.

    breaks must start at 0, end at 1, and be strictly increasing; values has
    one entry per interval.
    """

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.breaks) != len(self.values) + 1:
            raise EvolutionError("piecewise profile needs len(breaks) == len(values) + 1")
        if self.breaks[0] != 0.0 or self.breaks[-1] != 1.0:
            raise EvolutionError("piecewise breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(self.breaks, self.breaks[1:])):
            raise EvolutionError("piecewise breakpoints must be strictly increasing")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(np.asarray(self.breaks[1:-1]), x, side="right")
        return np.asarray(self.values, dtype=float)[idx]


@dataclass(frozen=True)
class CallableProfile:
    """Profile backed by an arbitrary vectorized function of x."""

    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


Profile = Union[ExprProfile, PiecewiseProfile, CallableProfile]


@dataclass(frozen=True)
class InitialData:
    """One samplable density profile per edge."""

    profiles: tuple[Profile, ...]

    @property
    def m(self) -> int:
        return len(self.profiles)

    def evaluate(self, x) -> np.ndarray:
        """Values of every profile at the given positions, shape (m, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.stack([p(x) for p in self.profiles])

    @staticmethod
    def from_expressions(sources: Sequence[str]) -> "InitialData":
        return InitialData(tuple(ExprProfile(ex.parse_expr(s, var="x")) for s in sources))

    @staticmethod
    def constant(values: Sequence[float]) -> "InitialData":
        return InitialData(
            tuple(PiecewiseProfile((0.0, 1.0), (float(v),)) for v in values)
        )


@dataclass(frozen=True)
class EdgeDensityField:
    """Densities sampled on the midpoint grid at one instant."""

    values: np.ndarray
    resolution: int
    time: float
    origin: float

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def grid(self) -> np.ndarray:
        return midpoints(self.resolution)

    def write_csv(self, path) -> None:
        """Rows `edge,x,value,t,s`, one per (edge, grid point)."""
        xs = self.grid()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["edge", "x", "value", "t", "s"])
            for j in range(self.m):
                for r in range(self.resolution):
                    writer.writerow(
                        [j + 1, repr(float(xs[r])), repr(float(self.values[j, r])),
                         repr(self.time), repr(self.origin)]
                    )


def midpoints(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _stack_power(stack: np.ndarray, k: int) -> np.ndarray:
    """k-th power of each matrix in a (r, m, m) stack by binary exponentiation."""
    r, m, _ = stack.shape
    result = np.broadcast_to(np.eye(m), (r, m, m)).copy()
    base = stack.copy()
    while k:
        if k & 1:
            result = base @ result
        k >>= 1
        if k:
            base = base @ base
    return result


def _evolve(M: TimeVaryingMatrix, f: InitialData, s: float, t: float, xs: np.ndarray) -> np.ndarray:
    """Exact solution values at positions xs, shape (m, len(xs))."""
    if t < s:
        raise EvolutionError(f"query time {t} precedes start time {s}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise EvolutionError("positions must lie in [0, 1]")
    if f.m != M.dim:
        raise EvolutionError(f"initial data has {f.m} edges, matrix has {M.dim}")
    z = xs + (t - s)
    ks = np.floor(z).astype(np.int64)
    xi = z - ks
    stack = M.at_times(np.mod(t + xs, 1.0))
    fv = f.evaluate(xi)
    out = np.empty_like(fv)
    for k in np.unique(ks):
        sel = ks == k
        powered = _stack_power(stack[sel], int(k))
        out[:, sel] = np.einsum("rij,jr->ir", powered, fv[:, sel])
    return out


def evaluate_evolution(
    M: TimeVaryingMatrix, f: InitialData, s: float, t: float, x: float
) -> np.ndarray:
    """Density vector u(x, t) of the flow started from f at time s."""
    return _evolve(M, f, s, t, np.asarray([float(x)]))[:, 0]


def propagate(
    M: TimeVaryingMatrix, f: InitialData, s: float, t: float, N: int
) -> EdgeDensityField:
    """Sample the exact solution at time t on the N-point midpoint grid."""
    if N < 1:
        raise EvolutionError(f"resolution must be at least 1, got {N}")
    values = _evolve(M, f, s, t, midpoints(N))
    return EdgeDensityField(values=values, resolution=N, time=float(t), origin=float(s))


def initial_from_evolution(
    M: TimeVaryingMatrix, f: InitialData, s: float, t: float
) -> InitialData:
    """The state at time t, exactly samplable, for restarting the evolution."""

    def profile(j: int) -> CallableProfile:
        return CallableProfile(lambda x, j=j: _evolve(M, f, s, t, x)[j])

    return InitialData(tuple(profile(j) for j in range(f.m)))


def l1_norm(u: EdgeDensityField) -> tuple[np.ndarray, float]:
    """(per-edge masses, total mass) by midpoint quadrature of |values|."""
    masses = np.abs(u.values).sum(axis=1) / u.resolution
    return masses, float(masses.sum())


def boundary_residual(
    M: TimeVaryingMatrix, f: InitialData, s: float, t: float, eps: float
) -> float:
    """Sup-norm mismatch of the vertex coupling u(1, t) = M(t) u(0, t).

    Traces at x = 0 and x = 1 are not pointwise defined for integrable
    states, so both sides are evaluated a distance eps inside the edge along
    matched characteristics: u(1 - eps, t) against M(t) u(eps, t - 2 eps).
    Both sides then depend on the initial data at the same point and the
    residual is bounded by the schedule's modulus of continuity over eps,
    except when t - s is within eps of an integer and a data jump crosses
    the comparison (reported, not an error).
    """
    if not 0.0 < eps <= 1e-3:
        raise EvolutionError("eps must lie in (0, 1/1000]")
    if t - 2 * eps < s:
        raise EvolutionError("need t - 2*eps >= s for the matched comparison")
    left = _evolve(M, f, s, t, np.asarray([1.0 - eps]))[:, 0]
    inner = _evolve(M, f, s, t - 2 * eps, np.asarray([eps]))[:, 0]
    right = M.at(float(np.mod(t, 1.0))) @ inner
    return float(np.max(np.abs(left - right)))


def oracle_characteristics(
    M: TimeVaryingMatrix, f: InitialData, s: float, t: float, N: int, dt: float
) -> EdgeDensityField:
    """First-order upwind simulation of the transport system, for cross-checks.

    Maintains point samples on a fine midpoint grid of width dt = 1/(N*q);
    each step is an exact one-cell shift toward x = 0, and the vacated cell
    at x = 1 is refilled through the boundary coupling with the matrix taken
    at the current step time. The shift is exact, so the only error source is
    that time sampling, O(dt). Requires dt to divide both the cell width 1/N
    and the horizon t - s.
    """
    if t < s:
        raise EvolutionError(f"query time {t} precedes start time {s}")
    q = 1.0 / (N * dt)
    if abs(q - round(q)) > 1e-9 * max(1.0, q):
        raise EvolutionError(f"dt={dt} must equal 1/(N*q) for an integer q (N={N})")
    q = int(round(q))
    steps = (t - s) / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise EvolutionError(f"horizon {t - s} is not an integer number of steps of dt={dt}")
    steps = int(round(steps))

    fine = N * q
    buf = f.evaluate(midpoints(fine))
    if steps:
        times = np.mod(s + dt * np.arange(steps), 1.0)
        mats = M.at_times(times)
        for j in range(steps):
            idx = j % fine
            buf[:, idx] = mats[j] @ buf[:, idx]
        order = (np.arange(fine) + steps) % fine
        buf = buf[:, order]

    if q == 1:
        coarse = buf
    elif q % 2 == 1:
        coarse = buf[:, (q - 1) // 2 :: q]
    else:
        lo = buf[:, q // 2 - 1 :: q]
        hi = buf[:, q // 2 :: q]
        coarse = 0.5 * (lo + hi)
    return EdgeDensityField(values=coarse.copy(), resolution=N, time=float(t), origin=float(s))
