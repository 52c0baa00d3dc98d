"""Exception hierarchy shared across the package."""


class FlownetError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(FlownetError):
    """Invalid graph construction or a graph-structure precondition failed."""


class ExprSyntaxError(FlownetError):
    """Malformed weight expression; carries the source offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class ExprEvalError(FlownetError):
    """Expression evaluation failed (division by zero, zero to negative power)."""


class ScheduleError(FlownetError):
    """Invalid time-varying matrix assembly (support violation, bad junction set)."""


class EvolutionError(FlownetError):
    """Invalid arguments to the transport solvers."""


class HypothesisError(FlownetError):
    """A structural hypothesis needed by the asymptotic theory does not hold."""


class SpectralError(FlownetError):
    """Invalid input to an eigenvalue-based check."""


class ScenarioError(FlownetError):
    """Scenario file rejected; carries a JSON-pointer to the offending element."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer
