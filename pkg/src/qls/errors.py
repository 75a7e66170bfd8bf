"""Exception types and warning tags shared across the package."""


class QlsError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(QlsError, ValueError):
    """Operands have incompatible shapes."""


class NotPositiveDefinite(QlsError):
    """A matrix expected to be SPD has a pivot at or below tolerance."""


class Singular(QlsError):
    """LU pivot magnitude fell below the dimension-scaled tolerance."""


class DomainError(QlsError, ValueError):
    """Argument outside the mathematical domain of the function."""


class Unavailable(QlsError):
    """Requested quantity is undefined for this family/mode combination."""


class InvalidGrid(QlsError, ValueError):
    """Quantile grid violates 0 < a < b < 1 or k >= 2."""


class EmptySample(QlsError, ValueError):
    """An empty data vector was supplied."""


class DegenerateDensity(QlsError):
    """Standard density vanishes (or is non-finite) at a grid quantile."""


class RankDeficient(QlsError):
    """Design matrix does not have full column rank."""


class NoConvergence(QlsError):
    """Iterative optimizer exhausted its budget without converging."""


class InsufficientDof(QlsError):
    """The in-sample test statistic needs at least k >= 3 levels."""


class NonPositiveScale(QlsError):
    """Operation requires a fit with positive estimated scale."""


class BootstrapDegenerate(QlsError):
    """Too many bootstrap replicates failed to produce a fit."""


# Warning tags carried on fits/responses. Plain strings so they serialize
# cleanly into JSON/CSV reports.
WARN_NON_POSITIVE_SCALE = "non_positive_scale"
WARN_DEGENERATE_GRID = "degenerate_grid"
WARN_RANK_CLAMPED = "rank_clamped_to_first_order_statistic"
