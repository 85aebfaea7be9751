"""Scalar numerical kernels: principal-branch Lambert W and a bracketed maximizer.

Both routines are pure functions of their arguments and hold no state, so
they are safe to call concurrently from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, ConvergenceError, DomainError

__all__ = ["Tolerance", "DEFAULT_TOLERANCE", "lambert_w0", "maximize_unimodal"]

_BRANCH_POINT = -math.exp(-1.0)

# Inputs of the form -exp(-x-1) can round one or two ulps below -1/e; treat
# anything this close to the branch point as the branch point itself.
_BRANCH_SLACK = 1e-15

_GOLDEN = 2.0 / (1.0 + math.sqrt(5.0))


@dataclass(frozen=True)
class Tolerance:
    """Convergence budget for the iterative kernels.

    rel is a relative threshold: for root finding it bounds the residual
    relative to the target value, for bracketing searches it bounds the
    final bracket width relative to the initial one.
    """

    rel: float = 1e-12
    max_iter: int = 64

    def __post_init__(self) -> None:
        if not (self.rel > 0.0):
            raise DomainError(f"tolerance rel must be > 0, got {self.rel}")
        if self.max_iter < 1:
            raise DomainError(f"tolerance max_iter must be >= 1, got {self.max_iter}")


DEFAULT_TOLERANCE = Tolerance()


def lambert_w0(z: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Principal branch of the Lambert W function, the inverse of w * e**w.

    Returns w >= -1 with ``|w * exp(w) - z| <= tol.rel * max(|z|, 1e-300)``.
    Defined for z >= -1/e; values within ``1e-15`` below the branch point are
    clamped to it so that arguments computed as ``-exp(-x - 1)`` cannot fail
    on rounding alone.

    Uses Halley iteration on ``f(w) = w * exp(w) - z``.  The initial guess is
    the two-term branch-point series ``-1 + p - p**2/3`` with
    ``p = sqrt(2 * (1 + e*z))`` near the branch point, ``log1p(z)`` on the
    middle of the domain and ``log(z) - log(log(z))`` for large z; all three
    lie well inside Halley's convergence basin.
    """
    if math.isnan(z):
        raise DomainError("lambert_w0 is undefined for NaN")
    if z < _BRANCH_POINT:
        if z < _BRANCH_POINT - _BRANCH_SLACK:
            raise DomainError(
                f"lambert_w0 requires z >= -1/e ~ {_BRANCH_POINT!r}, got {z!r}"
            )
        z = _BRANCH_POINT
    if z == _BRANCH_POINT:
        return -1.0
    if z == 0.0:
        return 0.0

    if z < -0.25:
        p = math.sqrt(2.0 * (1.0 + math.e * z))
        w = -1.0 + p - p * p / 3.0
    elif z < math.e:
        w = math.log1p(z)
    else:
        log_z = math.log(z)
        w = log_z - math.log(log_z)

    target = tol.rel * max(abs(z), 1e-300)
    for _ in range(tol.max_iter):
        ew = math.exp(w)
        residual = w * ew - z
        if abs(residual) <= target:
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - residual * (w + 2.0) / (2.0 * wp1)
        w -= residual / denom
        if w < -1.0:
            # Halley overshoot past the branch point would leave the branch.
            w = -1.0
    raise ConvergenceError(
        f"lambert_w0 did not converge for z={z!r} within {tol.max_iter} iterations"
    )


def maximize_unimodal(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """Locate the maximum of a unimodal function on [lo, hi].

    Golden-section search; the returned point is within
    ``tol.rel * (hi - lo)`` of the true argmax and never leaves [lo, hi].
    Unimodality of f on the bracket is the caller's responsibility.
    """
    if not (lo < hi):
        raise BracketError(f"invalid bracket: lo={lo!r} must be < hi={hi!r}")

    width_target = tol.rel * (hi - lo)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(tol.max_iter):
        if hi - lo <= width_target:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)
