"""Asymptotic period of the flow from cycle structure and matrix spectra.

The flow converges to a periodic regime whose period is the least common
multiple, over one period of the schedule, of the cyclic indices of the
active subnetwork G_t (edges with inflow at time t). The cyclic index is
computed combinatorially from the support pattern; the number of peripheral
eigenvalues of the sampled matrix provides an independent spectral route to
the same number, which the tests cross-check.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError, SpectralError
from .evolution import InitialData, propagate
from .graph import LineGraphAdjacency, cyclic_index, is_strongly_connected
from .schedules import TimeVaryingMatrix, support_pattern


def peripheral_count(A: np.ndarray, eps: float = 1e-6) -> int:
    """Eigenvalues with modulus at least 1 - eps, counted with multiplicity.

    Requires a column-stochastic matrix (unit spectral radius); for an
    irreducible one these are exactly the h-th roots of unity.
    """
    A = np.asarray(A, dtype=float)
    if not 0.0 < eps < 0.5:
        raise SpectralError("eps must lie in (0, 1/2)")
    col_dev = np.abs(A.sum(axis=0) - 1.0).max()
    if col_dev > 1e-9:
        raise SpectralError(f"matrix is not column-stochastic (column sum off by {col_dev:.3e})")
    eigenvalues = np.linalg.eigvals(A)
    return int(np.sum(np.abs(eigenvalues) >= 1.0 - eps))


def pattern_hash(pattern: np.ndarray) -> str:
    """Stable short hash of a 0/1 support pattern."""
    data = np.ascontiguousarray(pattern, dtype=np.int8)
    return hashlib.sha256(data.tobytes()).hexdigest()[:16]


def active_subpattern(pattern: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(active edge indices, induced subpattern) after dropping no-inflow edges.

    An edge with an all-zero row receives nothing at this time and is deleted
    from the time-t network, together with its outgoing arcs.
    """
    active = np.nonzero(pattern.sum(axis=1) > 0)[0]
    return active, pattern[np.ix_(active, active)]


@dataclass(frozen=True)
class PeriodSample:
    time: float
    pattern_hash: str
    cyclic_index: int
    peripheral_count: int

    def to_json(self) -> dict:
        return {
            "time": self.time,
            "pattern_hash": self.pattern_hash,
            "cyclic_index": self.cyclic_index,
            "peripheral_count": self.peripheral_count,
        }


@dataclass(frozen=True)
class PeriodReport:
    samples: tuple[PeriodSample, ...]
    tau: int
    distinct_patterns: dict[str, np.ndarray]
    reducible_times: tuple[float, ...] = ()

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "samples": [s.to_json() for s in self.samples],
            "distinct_patterns": {
                h: p.tolist() for h, p in sorted(self.distinct_patterns.items())
            },
            "reducible_times": list(self.reducible_times),
        }


def default_sample_times(M: TimeVaryingMatrix, per_period: int = 64) -> tuple[float, ...]:
    """Equispaced times over one period plus all trig quarter-period times.

    Support patterns of the restricted grammar can only change where a trig
    factor crosses a zero or an extremum, so this set sees every pattern the
    schedule can attain; the report lists the distinct patterns for audit.
    """
    times = {j / per_period for j in range(per_period)}
    times |= set(M.critical_times())
    return tuple(sorted(times))


def asymptotic_period(
    M: TimeVaryingMatrix,
    sample_times=None,
    zero_tol: float = 1e-12,
    *,
    eigen_eps: float = 1e-6,
) -> PeriodReport:
    """Cyclic index at each sample time and their least common multiple.

    Every sampled support pattern must be irreducible on its active edges
    (the time-t network stays strongly connected); a reducible pattern
    violates the hypothesis of the asymptotics and raises HypothesisError.
    Measure-zero degenerate patterns count toward the lcm like any other.
    """
    if sample_times is None:
        sample_times = default_sample_times(M)
    if not len(sample_times):
        raise SpectralError("sample_times must be nonempty")
    samples = []
    distinct: dict[str, np.ndarray] = {}
    hash_index: dict[str, int] = {}
    for t in sample_times:
        pattern = support_pattern(M, float(t), zero_tol)
        digest = pattern_hash(pattern)
        if digest not in hash_index:
            active, sub = active_subpattern(pattern)
            if active.size == 0 or not is_strongly_connected(LineGraphAdjacency(sub)):
                raise HypothesisError(
                    f"support pattern at t={float(t)} is reducible: the time-t network "
                    "must be strongly connected for the asymptotic period to exist"
                )
            hash_index[digest] = cyclic_index(LineGraphAdjacency(sub))
            distinct[digest] = pattern
        samples.append(
            PeriodSample(
                time=float(t),
                pattern_hash=digest,
                cyclic_index=hash_index[digest],
                peripheral_count=peripheral_count(M.at(float(t)), eigen_eps),
            )
        )
    tau = math.lcm(*(s.cyclic_index for s in samples))
    return PeriodReport(samples=tuple(samples), tau=tau, distinct_patterns=distinct)


def strictly_positive_shortcut(
    M: TimeVaryingMatrix, sample_times=None, zero_tol: float = 1e-12
) -> int | None:
    """Cyclic index of the static adjacency if no edge ever loses its inflow.

    When the nonzero weights stay strictly positive at every sample time, the
    support pattern never changes and the period equals the cycle-length gcd
    of the static network. Returns None when some weight vanishes somewhere,
    in which case the general per-time formula must be used.
    """
    if sample_times is None:
        sample_times = default_sample_times(M)
    full = np.asarray(M.adjacency)
    for t in sample_times:
        if not np.array_equal(support_pattern(M, float(t), zero_tol), full):
            return None
    return cyclic_index(LineGraphAdjacency(full))


@dataclass(frozen=True)
class ConvergenceTrace:
    elapsed: tuple[float, ...]
    deviation: tuple[float, ...]
    rate: float | None

    def to_json(self) -> dict:
        return {
            "elapsed": list(self.elapsed),
            "deviation": list(self.deviation),
            "rate": self.rate,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "delta"])
            for t, d in zip(self.elapsed, self.deviation):
                writer.writerow([repr(t), repr(d)])


def convergence_diagnostic(
    M: TimeVaryingMatrix,
    f: InitialData,
    s: float,
    tau: int,
    horizon: float,
    N: int = 400,
    stride: float = 1.0,
) -> ConvergenceTrace:
    """Distance between the flow and its tau-shift along an elapsed-time grid.

    delta(t) is the total integrated absolute difference between the states
    at times t and t + tau, both propagated from the same initial data. The
    asymptotics predict delta -> 0 exponentially when tau is the true period;
    the fitted log-linear rate is reported as evidence, never asserted
    against a theoretical value (none is available).
    """
    if horizon < 2 * tau:
        raise HypothesisError(f"horizon {horizon} must be at least 2*tau = {2 * tau}")
    if stride <= 0:
        raise HypothesisError("stride must be positive")
    base_times = []
    j = 0
    while s + j * stride <= s + horizon + 1e-12:
        base_times.append(s + j * stride)
        j += 1
    fields: dict[float, np.ndarray] = {}

    def state(time: float) -> np.ndarray:
        if time not in fields:
            fields[time] = propagate(M, f, s, time, N).values
        return fields[time]

    elapsed = []
    deviation = []
    for t in base_times:
        diff = state(t + tau) - state(t)
        deviation.append(float(np.abs(diff).sum() / N))
        elapsed.append(t - s)

    positive = [(e, d) for e, d in zip(elapsed, deviation) if d > 0.0]
    rate = None
    if len(positive) >= 2:
        es = np.asarray([p[0] for p in positive])
        ds = np.log(np.asarray([p[1] for p in positive]))
        rate = float(np.polyfit(es, ds, 1)[0])
    return ConvergenceTrace(elapsed=tuple(elapsed), deviation=tuple(deviation), rate=rate)
