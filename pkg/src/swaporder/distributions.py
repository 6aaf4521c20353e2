"""Entanglement-count distributions and conversions.

Everything here is exact-arithmetic plumbing for the rest of the library:
binomial probability mass functions over counts {0..C}, epsilon-tail
truncation, the binomial <-> normal moment-matching pair, and the closed-form
moments of the minimum of two Gaussians used by the fast swap approximation.

All values are immutable after construction and safe to share between
threads; every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateTheta, InvalidMoments

__all__ = [
    "Pmf",
    "BinomialParams",
    "NormalParams",
    "binomial_pmf",
    "approx_tail",
    "hoeffding_support",
    "b2n",
    "n2b",
    "min_normal_moments",
    "norm_cdf",
    "norm_pdf",
]

_SUM_TOL = 1e-9

# Recurrence is fastest but only safe while (1-p)^n stays representable;
# above this size (or near the representability edge) we go through logs.
_RECURRENCE_MAX_TRIALS = 1000
_LOG_UNDERFLOW = -700.0

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_cdf(x: float) -> float:
    """Standard normal CDF via math.erf (absolute accuracy ~1e-16)."""
    return 0.5 * (1.0 + math.erf(x / _SQRT2))


def norm_pdf(x: float) -> float:
    """Standard normal PDF."""
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Finite distribution of an entanglement count on {0..support}.

    probs[k] is the probability of exactly k entanglements.  Entries must
    lie in [0, 1] and sum to 1 within 1e-9.  The underlying array is made
    read-only so instances can be shared freely.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pmf must be a non-empty 1-D sequence")
        if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
            raise ValueError("pmf entries must lie in [0, 1]")
        total = float(arr.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"pmf entries must sum to 1 within {_SUM_TOL}, got {total}")
        np.clip(arr, 0.0, 1.0, out=arr)
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    @property
    def support(self) -> int:
        """Largest representable count (len(probs) - 1)."""
        return self.probs.size - 1

    def mean(self) -> float:
        """Expected count."""
        return float(np.arange(self.probs.size) @ self.probs)

    def variance(self) -> float:
        """Variance of the count."""
        k = np.arange(self.probs.size)
        m = self.mean()
        return float((k - m) ** 2 @ self.probs)

    @classmethod
    def point_mass(cls, k: int) -> "Pmf":
        probs = np.zeros(k + 1)
        probs[k] = 1.0
        return cls(probs)


@dataclass(frozen=True)
class BinomialParams:
    """Per-slot attempt count and per-attempt success probability."""

    trials: int
    success: float

    def __post_init__(self) -> None:
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if not 0.0 <= self.success <= 1.0:
            raise ValueError("success must lie in [0, 1]")


@dataclass(frozen=True)
class NormalParams:
    """Gaussian surrogate (mean, variance) for a count distribution.

    The mean may dip slightly below zero after min-of-Gaussians steps; only
    variance >= 0 is enforced.
    """

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0.0:
            raise ValueError("variance must be >= 0")


def _probs_by_recurrence(trials: int, success: float) -> np.ndarray:
    out = np.empty(trials + 1)
    q = 1.0 - success
    cur = q**trials
    out[0] = cur
    ratio = success / q
    for k in range(trials):
        cur *= (trials - k) / (k + 1) * ratio
        out[k + 1] = cur
    return out


def _probs_by_logs(trials: int, success: float) -> np.ndarray:
    k = np.arange(trials + 1)
    logs = (
        gammaln(trials + 1)
        - gammaln(k + 1)
        - gammaln(trials - k + 1)
        + k * math.log(success)
        + (trials - k) * math.log1p(-success)
    )
    return np.exp(logs)


@lru_cache(maxsize=1024)
def _binomial_probs(trials: int, success: float) -> np.ndarray:
    if trials == 0 or success == 0.0:
        probs = np.zeros(trials + 1)
        probs[0] = 1.0
    elif success == 1.0:
        probs = np.zeros(trials + 1)
        probs[trials] = 1.0
    elif trials <= _RECURRENCE_MAX_TRIALS and trials * math.log1p(-success) > _LOG_UNDERFLOW:
        probs = _probs_by_recurrence(trials, success)
    else:
        probs = _probs_by_logs(trials, success)
    probs.flags.writeable = False
    return probs


def binomial_pmf(params: BinomialParams) -> Pmf:
    """Exact pmf of the number of successes in `trials` attempts.

    probs[k] = C(trials, k) * success^k * (1 - success)^(trials - k).
    Results are cached per (trials, success) pair.
    """
    return Pmf(_binomial_probs(params.trials, params.success))


def approx_tail(pmf: Pmf, epsilon: float) -> Pmf:
    """Truncate a pmf's upper tail to an epsilon error.

    Returns the pmf cut at the smallest K whose cumulative mass reaches
    1 - epsilon, with all mass above K absorbed into probs[K].  The result
    has the same total mass as the input (the absorbed tail sits at K, so
    the truncation can only lower the expected count, by at most
    epsilon * support).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    cum = np.cumsum(pmf.probs)
    cut = int(np.searchsorted(cum, 1.0 - epsilon, side="left"))
    cut = min(cut, pmf.support)
    head = pmf.probs[: cut + 1].copy()
    head[cut] = pmf.probs[cut:].sum()
    return Pmf(head)


def hoeffding_support(trials: int, success: float, epsilon: float) -> int:
    """Smallest K >= trials*success whose Hoeffding tail bound is <= epsilon.

    The bound is exp(-2 * trials * (K/trials - success)^2); it is used to
    pre-size buffers before exact truncation.  Returns `trials` when no
    smaller K qualifies.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if epsilon <= 0.0:
        return trials

    def bound(k: int) -> float:
        return math.exp(-2.0 * trials * (k / trials - success) ** 2)

    lo = max(math.ceil(trials * success), 0)
    if epsilon >= 1.0:
        return min(lo, trials)
    # analytic solution of bound(K) <= epsilon, then nudge to the exact
    # boundary with the same float comparison a direct scan would use
    k = math.ceil(trials * success + math.sqrt(0.5 * trials * math.log(1.0 / epsilon)))
    k = max(lo, min(k, trials + 1))
    while k - 1 >= lo and bound(k - 1) <= epsilon:
        k -= 1
    while k <= trials and bound(k) > epsilon:
        k += 1
    return k if k <= trials else trials


def b2n(params: BinomialParams) -> NormalParams:
    """Moment-matched Gaussian surrogate of a binomial distribution."""
    mean = params.trials * params.success
    return NormalParams(mean, mean * (1.0 - params.success))


def n2b(normal: NormalParams) -> BinomialParams:
    """Moment-matched binomial parameters of a Gaussian surrogate.

    Raises InvalidMoments when the moments are not binomial-compatible
    (mean <= 0 or mean <= variance); the caller is expected to fall back
    to exact evaluation.
    """
    if normal.mean <= 0.0 or normal.mean <= normal.variance:
        raise InvalidMoments(
            f"no binomial matches mean={normal.mean}, variance={normal.variance}"
        )
    trials = round(normal.mean * normal.mean / (normal.mean - normal.variance))
    return BinomialParams(int(trials), 1.0 - normal.variance / normal.mean)


def min_normal_moments(a: NormalParams, b: NormalParams, rho: float = 0.0) -> NormalParams:
    """Mean and variance of min(X1, X2) for bivariate Gaussian (X1, X2).

    With theta = sqrt(s1^2 + s2^2 - 2*rho*s1*s2) and delta = (m2 - m1)/theta:

        E[Y]   = m1*Phi(delta) + m2*Phi(-delta) - theta*phi(delta)
        E[Y^2] = (s1^2 + m1^2)*Phi(delta) + (s2^2 + m2^2)*Phi(-delta)
                 - (m1 + m2)*theta*phi(delta)

    Raises DegenerateTheta when theta = 0, except for two point masses where
    the minimum is deterministic and (min(m1, m2), 0) is returned.
    """
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    theta_sq = a.variance + b.variance - 2.0 * rho * math.sqrt(a.variance * b.variance)
    theta = math.sqrt(max(theta_sq, 0.0))
    if theta == 0.0:
        if a.variance == 0.0 and b.variance == 0.0:
            return NormalParams(min(a.mean, b.mean), 0.0)
        raise DegenerateTheta("theta = 0 with nondegenerate operands")
    delta = (b.mean - a.mean) / theta
    cdf_d, cdf_md, pdf_d = norm_cdf(delta), norm_cdf(-delta), norm_pdf(delta)
    mean = a.mean * cdf_d + b.mean * cdf_md - theta * pdf_d
    second = (
        (a.variance + a.mean * a.mean) * cdf_d
        + (b.variance + b.mean * b.mean) * cdf_md
        - (a.mean + b.mean) * theta * pdf_d
    )
    return NormalParams(mean, max(second - mean * mean, 0.0))


def clear_caches() -> None:
    """Drop memoized pmf tables (used by benchmarks and memory-sensitive callers)."""
    _binomial_probs.cache_clear()
