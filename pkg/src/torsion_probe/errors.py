"""Exception taxonomy shared by all modules.

Exceptions are grouped by the exit code the CLI maps them to:
constraint violations (2), data errors (3), numeric budget exhaustion (4).
"""


class TorsionProbeError(Exception):
    """Base class for all package errors."""


class ConstraintError(TorsionProbeError):
    """A documented precondition or theorem hypothesis is violated.  CLI exit 2."""


class DataError(TorsionProbeError):
    """Malformed or inconsistent external data.  CLI exit 3."""


class BudgetError(TorsionProbeError):
    """A configured numeric budget (precision, size, iterations) was exhausted.  CLI exit 4."""


# -- constraint violations ------------------------------------------------

class NotFundamental(ConstraintError):
    """Discriminant fails the fundamental-discriminant test."""


class NotPrimitive(ConstraintError):
    """Operation requires a primitive non-principal character."""


class NotCubefree(ConstraintError):
    """Integer has a cubed prime factor."""


class RangeOrder(ConstraintError):
    """Sum range has N > M, outside the bound's stated hypothesis."""


class MixedSquarefullClass(ConstraintError):
    """Fit sample mixes moduli with different square-full factors r."""


class Infeasible(ConstraintError):
    """Parameter-plan hypothesis cannot be met (xi too large for theta, ell)."""


class ConstraintViolated(ConstraintError):
    """Experiment parameter violates a lemma constraint (e.g. varpi too large)."""


class PoleAtOne(ConstraintError):
    """Evaluation requested at the pole s=1 of a principal L-function."""


class NearZeroOrPole(ConstraintError):
    """Logarithmic derivative requested too close to a zero or pole."""


class ZeroCensus(ConstraintError):
    """A census count of zero makes the requested bound undefined."""


class DegenerateRegion(ConstraintError):
    """Scan rectangle has zero width or height."""


class EmptySample(ConstraintError):
    """An aggregate was requested over an empty sample."""


# -- data errors ----------------------------------------------------------

class ParseError(DataError):
    """Malformed ingestion row; carries the 1-based line number."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class DuplicateDiscriminant(DataError):
    """Two ingested records share a discriminant."""


class VersionMismatch(DataError):
    """Cache record was written by an incompatible schema version."""


class ConfigError(DataError):
    """Config file is malformed or has out-of-range values."""


# -- numeric budgets ------------------------------------------------------

class FactorizationTooLarge(BudgetError):
    """Factorization exceeded the trial-division/Pollard budget."""


class PrecisionBudgetExceeded(BudgetError):
    """Requested tolerance unreachable within the evaluation budget."""


class QuadratureBudget(BudgetError):
    """Adaptive quadrature failed to converge within its panel budget."""


class CapTooSmall(BudgetError):
    """Truncation cap visibly truncates the sum it was meant to exhaust."""


class CapExceeded(BudgetError):
    """Requested input exceeds the configured size cap."""


class ResolutionExhausted(BudgetError):
    """Zero scan could not isolate winding cells at the minimum cell size."""


class BoundaryZeroSuspected(BudgetError):
    """Scan boundary repeatedly passes too close to a zero; perturbation failed."""
