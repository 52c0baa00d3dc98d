"""Scenario files: one JSON document describing a complete simulation setup.

Schema sketch::

    {
      "graph": {"n": 5, "edges": [[tail, head], ...]},
      "mode": "flow" | "atf",
      "weights": {"i,j": "expr", ...},            # flow: vertex i, edge j
      "weights": {"k,l": "expr", ...},            # atf: out-edge k, in-edge l
      "junctions": [{"vertex": v, "in": [...], "out": [...],
                     "matrix": [["expr", ...], ...]}, ...],   # atf alternative
      "initial": {"j": "expr in x" | {"breaks": [...], "values": [...]}, ...},
      "s": 0.0, "N": 400, "validation_grid": 1001,
      "tolerances": {"stochastic": 1e-9, "zero": 1e-12}
    }

Errors carry a JSON-pointer to the offending element. Three scenarios ship
with the package and can be addressed by bare name: example1, example2,
junction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import expr as ex
from .errors import (
    ExprSyntaxError,
    FlownetError,
    GraphError,
    ScenarioError,
    ScheduleError,
)
from .evolution import ExprProfile, InitialData, PiecewiseProfile
from .graph import (
    LineGraphAdjacency,
    NetworkGraph,
    build_graph,
    is_strongly_connected,
    line_graph_adjacency,
)
from .schedules import (
    TimeVaryingMatrix,
    assemble_allocation,
    assemble_weighted_adjacency,
    embed_junctions,
    make_junction,
    regularity_diagnostic,
    support_pattern,
    validate_stochastic,
)
from .spectral import active_subpattern, default_sample_times, pattern_hash

BUNDLED = ("example1", "example2", "junction")

_TOP_KEYS = {"graph", "mode", "weights", "junctions", "initial", "s", "N",
             "validation_grid", "tolerances"}


@dataclass(frozen=True)
class Tolerances:
    stochastic: float = 1e-9
    zero: float = 1e-12


@dataclass(frozen=True)
class Scenario:
    graph: NetworkGraph
    mode: str
    matrix: TimeVaryingMatrix
    initial: InitialData
    start_time: float
    resolution: int
    validation_grid: int
    tolerances: Tolerances


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    if name not in BUNDLED:
        raise ScenarioError(f"no bundled scenario named {name!r}; available: {BUNDLED}")
    return Path(str(resources.files("flownet") / "scenarios" / f"{name}.json"))


def _require(condition: bool, message: str, pointer: str) -> None:
    if not condition:
        raise ScenarioError(message, pointer)


def _parse_pair(key: str, pointer: str) -> tuple[int, int]:
    parts = key.split(",")
    _require(len(parts) == 2, f"key {key!r} must look like 'a,b'", pointer)
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ScenarioError(f"key {key!r} must hold two integers", pointer) from None


def _parse_weight(source, pointer: str, var: str = "t") -> ex.Expr:
    _require(isinstance(source, str), "expression must be a string", pointer)
    try:
        return ex.parse_expr(source, var=var)
    except ExprSyntaxError as err:
        raise ScenarioError(f"bad expression {source!r}: {err}", pointer) from err


def load_scenario(path, *, allow_nonperiodic: bool = False) -> Scenario:
    """Load and structurally validate a scenario from a file or bundled name."""
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        p = bundled_scenario_path(str(path))
    if not p.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as err:
        raise ScenarioError(f"not valid JSON: {err}") from err
    return scenario_from_dict(doc, allow_nonperiodic=allow_nonperiodic)


def scenario_from_dict(doc, *, allow_nonperiodic: bool = False) -> Scenario:
    _require(isinstance(doc, dict), "document must be a JSON object", "")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown keys {sorted(unknown)}", "")

    graph_doc = doc.get("graph")
    _require(isinstance(graph_doc, dict), "missing or invalid 'graph' object", "/graph")
    _require("n" in graph_doc and "edges" in graph_doc, "graph needs 'n' and 'edges'", "/graph")
    edges = graph_doc["edges"]
    _require(isinstance(edges, list) and edges, "'edges' must be a nonempty list", "/graph/edges")
    for idx, pair in enumerate(edges):
        _require(
            isinstance(pair, list) and len(pair) == 2
            and all(isinstance(v, int) for v in pair),
            "each edge must be a [tail, head] pair of integers",
            f"/graph/edges/{idx}",
        )
    try:
        g = build_graph([tuple(pair) for pair in edges], int(graph_doc["n"]))
    except GraphError as err:
        raise ScenarioError(str(err), "/graph") from err

    mode = doc.get("mode")
    _require(mode in ("flow", "atf"), "mode must be 'flow' or 'atf'", "/mode")

    require_periodic = not allow_nonperiodic
    if mode == "flow":
        _require("weights" in doc, "flow mode needs 'weights'", "/weights")
        _require("junctions" not in doc, "'junctions' is only valid in atf mode", "/junctions")
        matrix = _flow_matrix(g, doc["weights"], require_periodic)
    else:
        has_w, has_j = "weights" in doc, "junctions" in doc
        _require(has_w != has_j, "atf mode needs exactly one of 'weights' or 'junctions'", "")
        if has_w:
            matrix = _atf_matrix(g, doc["weights"], require_periodic)
        else:
            matrix = _junction_matrix(g, doc["junctions"], require_periodic)

    initial = _initial_data(g, doc.get("initial"))

    s = doc.get("s", 0.0)
    _require(isinstance(s, (int, float)), "'s' must be a number", "/s")
    N = doc.get("N", 400)
    _require(isinstance(N, int) and N >= 1, "'N' must be a positive integer", "/N")
    vgrid = doc.get("validation_grid", 1001)
    _require(
        isinstance(vgrid, int) and vgrid >= 2,
        "'validation_grid' must be an integer >= 2",
        "/validation_grid",
    )
    tol_doc = doc.get("tolerances", {})
    _require(isinstance(tol_doc, dict), "'tolerances' must be an object", "/tolerances")
    unknown = set(tol_doc) - {"stochastic", "zero"}
    _require(not unknown, f"unknown tolerance keys {sorted(unknown)}", "/tolerances")
    tolerances = Tolerances(
        stochastic=float(tol_doc.get("stochastic", 1e-9)),
        zero=float(tol_doc.get("zero", 1e-12)),
    )
    return Scenario(
        graph=g,
        mode=mode,
        matrix=matrix,
        initial=initial,
        start_time=float(s),
        resolution=N,
        validation_grid=vgrid,
        tolerances=tolerances,
    )


def _flow_matrix(g: NetworkGraph, weights_doc, require_periodic: bool) -> TimeVaryingMatrix:
    _require(isinstance(weights_doc, dict) and weights_doc, "'weights' must be a nonempty object", "/weights")
    weights = {}
    for key, source in weights_doc.items():
        pointer = f"/weights/{key}"
        i, j = _parse_pair(key, pointer)
        weights[(i, j)] = _parse_weight(source, pointer)
    try:
        return assemble_weighted_adjacency(g, weights, require_periodic=require_periodic)
    except ScheduleError as err:
        raise ScenarioError(str(err), "/weights") from err


def _atf_matrix(g: NetworkGraph, weights_doc, require_periodic: bool) -> TimeVaryingMatrix:
    _require(isinstance(weights_doc, dict) and weights_doc, "'weights' must be a nonempty object", "/weights")
    entries = {}
    for key, source in weights_doc.items():
        pointer = f"/weights/{key}"
        k, l = _parse_pair(key, pointer)
        entries[(k, l)] = _parse_weight(source, pointer)
    try:
        return assemble_allocation(line_graph_adjacency(g), entries, require_periodic=require_periodic)
    except ScheduleError as err:
        raise ScenarioError(str(err), "/weights") from err


def _junction_matrix(g: NetworkGraph, junctions_doc, require_periodic: bool) -> TimeVaryingMatrix:
    _require(isinstance(junctions_doc, list) and junctions_doc,
             "'junctions' must be a nonempty list", "/junctions")
    junctions = []
    for idx, jdoc in enumerate(junctions_doc):
        pointer = f"/junctions/{idx}"
        _require(isinstance(jdoc, dict), "junction must be an object", pointer)
        unknown = set(jdoc) - {"vertex", "in", "out", "matrix"}
        _require(not unknown, f"unknown junction keys {sorted(unknown)}", pointer)
        incoming = jdoc.get("in")
        outgoing = jdoc.get("out")
        rows = jdoc.get("matrix")
        _require(isinstance(incoming, list) and incoming, "'in' must be a nonempty list", f"{pointer}/in")
        _require(isinstance(outgoing, list) and outgoing, "'out' must be a nonempty list", f"{pointer}/out")
        _require(isinstance(rows, list) and rows, "'matrix' must be a nonempty list of rows", f"{pointer}/matrix")
        parsed_rows = []
        for r, row in enumerate(rows):
            _require(isinstance(row, list), "matrix row must be a list", f"{pointer}/matrix/{r}")
            parsed_rows.append(
                [_parse_weight(v, f"{pointer}/matrix/{r}/{c}") for c, v in enumerate(row)]
            )
        try:
            junctions.append(
                make_junction(incoming, outgoing, parsed_rows,
                              require_periodic=require_periodic)
            )
        except ScheduleError as err:
            raise ScenarioError(str(err), pointer) from err
    try:
        return embed_junctions(line_graph_adjacency(g), junctions)
    except ScheduleError as err:
        raise ScenarioError(str(err), "/junctions") from err


def _initial_data(g: NetworkGraph, initial_doc) -> InitialData:
    _require(isinstance(initial_doc, dict), "missing or invalid 'initial' object", "/initial")
    profiles = []
    for j in range(1, g.m + 1):
        key = str(j)
        pointer = f"/initial/{key}"
        _require(key in initial_doc, f"missing initial density for edge {j}", pointer)
        spec = initial_doc[key]
        if isinstance(spec, str):
            profiles.append(ExprProfile(_parse_weight(spec, pointer, var="x")))
        elif isinstance(spec, dict):
            unknown = set(spec) - {"breaks", "values"}
            _require(not unknown, f"unknown keys {sorted(unknown)}", pointer)
            breaks = spec.get("breaks")
            values = spec.get("values")
            _require(isinstance(breaks, list) and isinstance(values, list),
                     "piecewise profile needs 'breaks' and 'values' lists", pointer)
            try:
                profiles.append(
                    PiecewiseProfile(tuple(float(b) for b in breaks),
                                     tuple(float(v) for v in values))
                )
            except (FlownetError, ValueError) as err:
                raise ScenarioError(str(err), pointer) from err
        else:
            raise ScenarioError("initial density must be an expression string or "
                                "{'breaks': ..., 'values': ...}", pointer)
    extra = set(initial_doc) - {str(j) for j in range(1, g.m + 1)}
    _require(not extra, f"initial data for unknown edges {sorted(extra)}", "/initial")
    return InitialData(tuple(profiles))


def validation_summary(sc: Scenario) -> dict:
    """Run every scenario-level check and return a JSON-ready summary.

    Checks: column-stochasticity and nonnegativity on the validation grid,
    strong connectivity of the support pattern at the period sample times,
    nonnegativity of the initial data on the simulation grid, and the
    total-variation regularity diagnostic (reported, never gating).
    """
    grid = np.linspace(0.0, 1.0, sc.validation_grid)
    report = validate_stochastic(sc.matrix, grid, sc.tolerances.stochastic)

    sample_times = default_sample_times(sc.matrix)
    patterns: dict[str, list] = {}
    reducible: list[float] = []
    for t in sample_times:
        pattern = support_pattern(sc.matrix, t, sc.tolerances.zero)
        digest = pattern_hash(pattern)
        if digest not in patterns:
            patterns[digest] = pattern.tolist()
            active, sub = active_subpattern(pattern)
            if active.size == 0 or not is_strongly_connected(LineGraphAdjacency(sub)):
                reducible.append(t)

    xs = (np.arange(sc.resolution) + 0.5) / sc.resolution
    min_density = float(sc.initial.evaluate(xs).min())

    summary = {
        "stochastic": report.to_json(),
        "support": {
            "sample_times": len(sample_times),
            "distinct_patterns": len(patterns),
            "patterns": {h: p for h, p in sorted(patterns.items())},
            "reducible_times": reducible,
        },
        "initial_min_density": min_density,
        "regularity_total_variation": regularity_diagnostic(sc.matrix, grid),
        "passed": report.passed and not reducible and min_density >= -sc.tolerances.zero,
    }
    return summary
