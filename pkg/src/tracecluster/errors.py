"""Exception types shared across the package.

Everything user-facing derives from TraceClusterError so the CLI can map
bad inputs to a dedicated exit code. Errors carry enough context (row
numbers, offending pairs, witness paths) to be actionable.
"""


class TraceClusterError(Exception):
    """Base class for all input or domain errors raised by this package."""


# -- event log parsing ------------------------------------------------------

class MissingColumnError(TraceClusterError):
    """A mapped CSV column is absent from the header."""


class UnparseableTimestampError(TraceClusterError):
    def __init__(self, row: int, value: str, fmt: str):
        self.row = row
        self.value = value
        super().__init__(
            f"row {row}: timestamp {value!r} does not match format {fmt!r}"
        )


class EmptyLogError(TraceClusterError):
    """Parsed input contains no events, or a sublog is empty."""


class MalformedXmlError(TraceClusterError):
    """XES input is not well-formed XML."""


class MissingConceptNameError(TraceClusterError):
    def __init__(self, where: str):
        super().__init__(f"missing concept:name on {where}")


class MissingTimestampError(TraceClusterError):
    def __init__(self, where: str):
        super().__init__(f"missing time:timestamp on {where}")


# -- constraints -------------------------------------------------------------

class SelfConstraintError(TraceClusterError):
    """A constraint links an id to itself."""


class UnknownTraceIdError(TraceClusterError):
    """A constraint or lookup references an id not present in the log."""


class MlClConflictError(TraceClusterError):
    """A cannot-link pair is connected by a must-link path."""

    def __init__(self, pair, path):
        self.pair = tuple(pair)
        self.path = list(path)
        chain = " - ".join(str(p) for p in self.path)
        super().__init__(
            f"cannot-link pair {self.pair} is connected by must-links: {chain}"
        )


class InvalidConstraintsError(TraceClusterError):
    """Constraint input violates a structural precondition."""


class IntraVariantCannotLinkError(TraceClusterError):
    """A cannot-link pair maps to a single variant and can never be satisfied."""

    def __init__(self, pair, variant):
        self.pair = tuple(pair)
        self.variant = variant
        super().__init__(
            f"cannot-link pair {self.pair} falls inside variant {variant}"
        )


class InfeasibleSamplingError(TraceClusterError):
    """The requested number of constraints cannot be drawn from the truth."""


# -- similarity / matrices ---------------------------------------------------

class DimensionMismatchError(TraceClusterError):
    """Vectors or matrices do not share the required dimensions."""


# -- clustering --------------------------------------------------------------

class KOutOfRangeError(TraceClusterError):
    """Requested cluster count is outside [1, number of instances]."""


class InfeasibleKError(TraceClusterError):
    """Fewer seedable groups than requested clusters."""


class UnsatisfiableConstraintsError(TraceClusterError):
    """A trace group is cannot-linked to every available cluster."""


# -- evaluation --------------------------------------------------------------

class EmptyClusterError(TraceClusterError):
    """A solution contains a cluster with no members."""


class DomainMismatchError(TraceClusterError):
    """Two solutions do not describe the same set of instances."""


# -- synthetic data ----------------------------------------------------------

class InvalidSpecError(TraceClusterError):
    """A synthetic log specification cannot be realised."""
