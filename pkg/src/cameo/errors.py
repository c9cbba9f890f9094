"""Exception hierarchy shared across the engine and the domain pipelines."""


class CameoError(Exception):
    """Base class for all errors raised by this package."""


# --- workflow documents ---------------------------------------------------

class WorkflowSyntaxError(CameoError):
    """Malformed workflow document (not parseable at all)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class WorkflowSchemaError(CameoError):
    """Document parsed but violates the workflow schema."""


class CycleError(CameoError):
    """Process graph contains a dependency cycle."""

    def __init__(self, processes):
        self.processes = list(processes)
        super().__init__(f"dependency cycle involving: {', '.join(self.processes)}")


class OperatorArityError(CameoError):
    """Channel operator applied with missing/extra operands."""


class UnresolvedCardinalityError(CameoError):
    """Task fan-out of a process cannot be computed without executing it."""


# --- execution ------------------------------------------------------------

class SerializationError(CameoError):
    """Payload cannot be serialized canonically."""


class TaskFailedError(CameoError):
    """A task attempt failed (nonzero exit, or builtin raised)."""


class TaskTimeoutError(CameoError):
    """Task exceeded its wall-clock limit."""


class RunAbortedError(CameoError):
    """Run interrupted by the user; on-disk state remains resumable."""


# --- data ingestion -------------------------------------------------------

class DataParseError(CameoError):
    """Tabular input file unparseable; carries the offending location."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {column})" if column else ")")
        super().__init__(message + where)


class RangeError(CameoError):
    """A value is outside its physical/geographic range."""


class GapError(CameoError):
    """Hourly series has a missing or non-contiguous timestamp."""


class InsufficientDataError(CameoError):
    """Not enough historical days for the requested sampling/clustering."""


# --- optimization ---------------------------------------------------------

class NumericalFailureError(CameoError):
    """LP solver failed for numerical reasons (not infeasible/unbounded)."""


class TreeInvalidError(CameoError):
    """Scenario tree failed structural validation."""


class InstanceTooLargeError(CameoError):
    """Brute-force oracle refused an instance beyond its enumeration budget."""


# --- reporting ------------------------------------------------------------

class EmptyInputError(CameoError):
    """An aggregation was asked to consolidate zero records."""


class UnknownSiteError(CameoError):
    """Requested site id not present in the summary table."""


class InvariantError(CameoError):
    """A record violates its own declared invariants."""
