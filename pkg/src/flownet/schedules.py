"""Time-varying routing matrices and their validation.

Two kinds of m x m matrix-valued schedules are assembled here:

* ``flow``: vertex-based weights; all incoming edges at a vertex feed an
  outgoing edge with the same proportion. Entry (k, l) is the weight assigned
  to outgoing edge k at the head vertex of edge l.
* ``allocation``: edge-resolved proportions; entry (k, l) is the fraction of
  traffic leaving edge l that continues on edge k, given either directly or
  as per-junction blocks that are embedded transposed into the big matrix.

Both kinds must be column-stochastic for mass conservation; that is checked
by sampling, not symbolically. Entries are 1-periodic in time by structural
restriction of the expression grammar (see expr.is_periodic_in_time).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from . import expr as ex
from .errors import ScheduleError
from .graph import LineGraphAdjacency, NetworkGraph

FLOW = "flow"
ALLOCATION = "allocation"

ExprLike = Union[str, ex.Expr]


def _as_expr(value: ExprLike, *, require_periodic: bool, label: str) -> ex.Expr:
    e = ex.parse_expr(value) if isinstance(value, str) else value
    if require_periodic and not ex.is_periodic_in_time(e):
        raise ScheduleError(
            f"{label}: expression {ex.to_source(e)!r} is not structurally 1-periodic "
            "(t may only occur inside sin/cos with an integer multiple of pi*t)"
        )
    return e


@dataclass(frozen=True)
class TimeVaryingMatrix:
    """Square matrix of 1-periodic scalar expressions; absent entries are zero.

    ``entries`` is keyed by 1-based (row k, col l). ``adjacency`` is the 0/1
    support allowed by the underlying graph; every key must lie inside it.
    """

    dim: int
    entries: Mapping[tuple[int, int], ex.Expr]
    kind: str
    adjacency: np.ndarray
    period: float = 1.0

    def at(self, t: float) -> np.ndarray:
        """Dense value at one time."""
        out = np.zeros((self.dim, self.dim))
        for (k, l), e in self.entries.items():
            out[k - 1, l - 1] = ex.evaluate(e, t)
        return out

    def at_times(self, ts: np.ndarray) -> np.ndarray:
        """Stacked dense values, shape (len(ts), dim, dim)."""
        ts = np.asarray(ts, dtype=float)
        out = np.zeros((ts.size, self.dim, self.dim))
        for (k, l), e in self.entries.items():
            out[:, k - 1, l - 1] = ex.evaluate(e, ts)
        return out

    def critical_times(self) -> frozenset[float]:
        """Union of quarter-period times of every trig factor in any entry."""
        times: set[float] = set()
        for e in self.entries.values():
            times |= ex.critical_times(e)
        return frozenset(times)


@dataclass(frozen=True)
class JunctionAllocation:
    """Per-junction routing block: rows are incoming edges, columns outgoing.

    Row sums must equal 1 at all times (checked by validate_stochastic after
    embedding, where row sums become column sums of the network matrix).
    """

    incoming: tuple[int, ...]
    outgoing: tuple[int, ...]
    entries: tuple[tuple[ex.Expr, ...], ...]

    def __post_init__(self):
        p, q = len(self.incoming), len(self.outgoing)
        if p < 1 or q < 1:
            raise ScheduleError("junction needs at least one incoming and one outgoing edge")
        if len(self.entries) != p or any(len(row) != q for row in self.entries):
            raise ScheduleError(
                f"junction matrix must be {p}x{q} to match incoming x outgoing edges"
            )


def make_junction(incoming, outgoing, rows, *, require_periodic: bool = True) -> JunctionAllocation:
    """Build a JunctionAllocation from expression strings or ASTs."""
    entries = tuple(
        tuple(
            _as_expr(v, require_periodic=require_periodic, label=f"junction entry ({i},{j})")
            for j, v in enumerate(row)
        )
        for i, row in enumerate(rows)
    )
    return JunctionAllocation(tuple(incoming), tuple(outgoing), entries)


def assemble_weighted_adjacency(
    g: NetworkGraph,
    weights: Mapping[tuple[int, int], ExprLike],
    *,
    require_periodic: bool = True,
) -> TimeVaryingMatrix:
    """Build the flow-kind matrix from per-(vertex, outgoing edge) weights.

    Entry (k, l) becomes the weight of (tail(e_k), e_k) whenever the head of
    e_l is the tail of e_k. Weights may only be supplied on incident pairs.
    """
    parsed: dict[tuple[int, int], ex.Expr] = {}
    for (i, j), value in weights.items():
        if not (1 <= j <= g.m) or not (1 <= i <= g.n) or g.tail(j) != i:
            raise ScheduleError(
                f"weight ({i},{j}): edge {j} does not leave vertex {i}"
                if 1 <= j <= g.m and 1 <= i <= g.n
                else f"weight ({i},{j}): no such vertex/edge pair"
            )
        parsed[(i, j)] = _as_expr(value, require_periodic=require_periodic, label=f"weight ({i},{j})")

    entries: dict[tuple[int, int], ex.Expr] = {}
    for k in range(1, g.m + 1):
        w = parsed.get((g.tail(k), k))
        if w is None:
            continue
        for l in g.in_edges(g.tail(k)):
            entries[(k, l)] = w
    b = (g.phi_minus.T @ g.phi_plus > 0).astype(np.int64)
    b.setflags(write=False)
    return TimeVaryingMatrix(dim=g.m, entries=entries, kind=FLOW, adjacency=b)


def assemble_allocation(
    adj: LineGraphAdjacency,
    entries: Mapping[tuple[int, int], ExprLike],
    *,
    require_periodic: bool = True,
) -> TimeVaryingMatrix:
    """Build the allocation-kind matrix from explicit (k, l) proportions."""
    parsed: dict[tuple[int, int], ex.Expr] = {}
    for (k, l), value in entries.items():
        if not (1 <= k <= adj.m and 1 <= l <= adj.m) or adj.b[k - 1, l - 1] == 0:
            raise ScheduleError(
                f"entry ({k},{l}): edge {l} does not flow into edge {k} "
                "(support violation: flow only takes place on edges of the network)"
            )
        parsed[(k, l)] = _as_expr(value, require_periodic=require_periodic, label=f"entry ({k},{l})")
    return TimeVaryingMatrix(dim=adj.m, entries=parsed, kind=ALLOCATION, adjacency=adj.b)


def embed_junctions(
    adj: LineGraphAdjacency, junctions: list[JunctionAllocation]
) -> TimeVaryingMatrix:
    """Assemble the network allocation matrix from junction blocks.

    Every edge must appear as "incoming" in exactly one junction (each edge
    has a single head vertex). Junction index sets must match the adjacency:
    l incoming and k outgoing at the same junction iff b[k][l] = 1. The block
    is embedded transposed: entry (k, l) of the result is junction row l,
    column k.
    """
    m = adj.m
    owner: dict[int, int] = {}
    for idx, junction in enumerate(junctions):
        for l in junction.incoming:
            if not 1 <= l <= m:
                raise ScheduleError(f"junction {idx}: incoming edge {l} outside 1..{m}")
            if l in owner:
                raise ScheduleError(
                    f"edge {l} is incoming at junctions {owner[l]} and {idx}; "
                    "each edge has exactly one head vertex"
                )
            owner[l] = idx
        for k in junction.outgoing:
            if not 1 <= k <= m:
                raise ScheduleError(f"junction {idx}: outgoing edge {k} outside 1..{m}")
    missing = [l for l in range(1, m + 1) if l not in owner]
    if missing:
        raise ScheduleError(f"edges {missing} are not incoming at any junction")

    for idx, junction in enumerate(junctions):
        out_set = set(junction.outgoing)
        for l in junction.incoming:
            followers = {k for k in range(1, m + 1) if adj.b[k - 1, l - 1] == 1}
            if followers != out_set:
                raise ScheduleError(
                    f"junction {idx}: outgoing set {sorted(out_set)} does not match the "
                    f"successors {sorted(followers)} of incoming edge {l}"
                )

    entries: dict[tuple[int, int], ex.Expr] = {}
    for junction in junctions:
        for row, l in enumerate(junction.incoming):
            for col, k in enumerate(junction.outgoing):
                entries[(k, l)] = junction.entries[row][col]
    return TimeVaryingMatrix(dim=m, entries=entries, kind=ALLOCATION, adjacency=adj.b)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    witness_time: float | None = None
    witness_index: object = None
    witness_value: float | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "witness_time": self.witness_time,
            "witness_index": self.witness_index,
            "witness_value": self.witness_value,
        }


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]
    grid: tuple[float, ...] = field(repr=False, default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "grid_size": len(self.grid),
        }


def validate_stochastic(M: TimeVaryingMatrix, grid, tol: float) -> ValidationReport:
    """Sample the matrix on a time grid and check nonnegativity and column sums.

    Failures are report contents, not exceptions. Column sums within tol of 1
    encode the no-absorption requirement for both matrix kinds.
    """
    grid = tuple(float(t) for t in grid)
    if not grid:
        raise ScheduleError("validation grid is empty")
    if tol <= 0:
        raise ScheduleError("tolerance must be positive")
    stack = M.at_times(np.asarray(grid))

    flat = np.argmin(stack)
    g_idx, k_idx, l_idx = np.unravel_index(flat, stack.shape)
    min_entry = float(stack[g_idx, k_idx, l_idx])
    neg = CheckResult(
        name="nonnegative_entries",
        passed=min_entry >= -tol,
        worst=max(0.0, -min_entry),
        witness_time=grid[g_idx],
        witness_index=[int(k_idx) + 1, int(l_idx) + 1],
        witness_value=min_entry,
    )

    sums = stack.sum(axis=1)
    dev = np.abs(sums - 1.0)
    g_idx, l_idx = np.unravel_index(np.argmax(dev), dev.shape)
    worst_dev = float(dev[g_idx, l_idx])
    cols = CheckResult(
        name="column_sums",
        passed=worst_dev <= tol,
        worst=worst_dev,
        witness_time=grid[g_idx],
        witness_index=int(l_idx) + 1,
        witness_value=float(sums[g_idx, l_idx]),
    )
    return ValidationReport(checks=(neg, cols), grid=grid)


def support_pattern(M: TimeVaryingMatrix, t: float, zero_tol: float = 1e-12) -> np.ndarray:
    """0/1 pattern of entries exceeding zero_tol in magnitude at time t."""
    if zero_tol < 0:
        raise ScheduleError("zero_tol must be nonnegative")
    return (np.abs(M.at(t)) > zero_tol).astype(np.int64)


def regularity_diagnostic(M: TimeVaryingMatrix, grid) -> float:
    """Max over entries of the discrete total variation along the grid.

    A finite, moderate value is necessary (not sufficient) evidence that the
    schedule is absolutely continuous in time. Purely diagnostic.
    """
    grid = np.asarray(sorted(float(t) for t in grid))
    if grid.size < 2:
        raise ScheduleError("regularity diagnostic needs at least two grid times")
    stack = M.at_times(grid)
    tv = np.abs(np.diff(stack, axis=0)).sum(axis=0)
    return float(tv.max())
