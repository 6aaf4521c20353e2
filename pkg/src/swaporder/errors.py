"""Exception types shared across the library."""


class SwapOrderError(Exception):
    """Base class for all library-specific errors."""


class InvalidMoments(SwapOrderError):
    """Moment matching has no binomial solution (mean <= variance or mean <= 0).

    Callers in the fast approximation path should fall back to exact
    or tail-truncated evaluation when they see this.
    """


class DegenerateTheta(SwapOrderError):
    """The min-of-two-Gaussians formula is undefined (theta = 0)."""


class InvalidOrder(SwapOrderError):
    """A swapping order is not a permutation of the path's interior nodes."""


class BudgetExceeded(SwapOrderError):
    """An exhaustive search would exceed the configured enumeration budget."""


class Infeasible(SwapOrderError):
    """No allocation satisfies the memory budget constraints."""


class SlotNonpositive(SwapOrderError):
    """The coherence time is too small for the path's signaling delays."""


class SchemaError(SwapOrderError):
    """A path document does not conform to the JSON schema."""
