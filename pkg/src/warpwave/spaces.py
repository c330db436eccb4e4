"""Besov and weak-Besov functionals on wavelet coefficient arrays.

All functionals act on per-level coefficient rows (scaling row j = -1
first, 2^j entries at level j >= 0).  Suprema over a continuous
threshold parameter reduce to finite candidate sets because the
objectives are piecewise monotone between coefficient magnitudes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet


@dataclass(frozen=True)
class BesovIndex:
    """Smoothness/integrability indices (s, p, q); q may be math.inf."""

    s: float
    p: float
    q: float

    def __post_init__(self):
        if self.p < 1.0 or (self.q < 1.0):
            raise ValueError("p and q must be >= 1")
        if self.s <= max(0.0, 1.0 / self.p - 0.5):
            raise ValueError("need s > max(0, 1/p - 1/2)")


class CoefficientArray:
    """Per-level coefficient rows beta[j,k], j from -1 to j_max."""

    def __init__(self, levels):
        rows = [np.asarray(row, dtype=float) for row in levels]
        if not rows:
            raise ValueError("need at least the scaling row")
        for i, row in enumerate(rows):
            want = 1 << max(i - 1, 0)
            if row.ndim != 1 or row.size != want:
                raise ValueError(f"level {i - 1} must hold {want} entries")
        self.rows = rows

    @property
    def j_max(self) -> int:
        return len(self.rows) - 2

    def levels(self):
        for i, row in enumerate(self.rows):
            yield i - 1, row

    def flat(self) -> np.ndarray:
        return np.concatenate(self.rows)

    def scaled(self, t: float) -> "CoefficientArray":
        return CoefficientArray([t * row for row in self.rows])

    @classmethod
    def from_coefficients(cls, coeffs: CoefficientSet) -> "CoefficientArray":
        return cls([b for b in coeffs.beta])


def besov_norm(arr: CoefficientArray, idx: BesovIndex) -> float:
    """Sequence-space Besov norm with level weights 2^{j(s + 1/2 - 1/p)}."""
    exponent = idx.s + 0.5 - 1.0 / idx.p
    terms = []
    for j, row in arr.levels():
        if row.size == 0:
            continue
        lp = float(np.sum(np.abs(row) ** idx.p) ** (1.0 / idx.p))
        terms.append(2.0 ** (j * exponent) * lp)
    if not terms:
        return 0.0
    if math.isinf(idx.q):
        return max(terms)
    return float(np.sum(np.asarray(terms) ** idx.q) ** (1.0 / idx.q))


def besov_s2inf_seminorm(arr: CoefficientArray, s: float) -> float:
    """sup over J of 2^{2Js} times the tail sum of squares from level J up."""
    if s <= 0.0:
        raise ValueError("smoothness must be positive")
    level_sq = [float(np.sum(row**2)) for _, row in arr.levels()]
    best = 0.0
    tail = 0.0
    for i in range(len(level_sq) - 1, -1, -1):
        j = i - 1
        tail += level_sq[i]
        best = max(best, 2.0 ** (2 * j * s) * tail)
    return best


def weak_besov_norm(arr: CoefficientArray, r: float) -> float:
    """[sup over lambda of lambda^{r-2} sum of beta^2 over |beta| <= lambda]^(1/2).

    The supremum is attained at a coefficient magnitude: between
    magnitudes the sum is constant while lambda^{r-2} decreases.
    """
    if not 0.0 < r < 2.0:
        raise ValueError("need 0 < r < 2")
    mags = np.abs(arr.flat())
    mags = np.sort(mags[mags > 0.0])
    if mags.size == 0:
        return 0.0
    cums = np.cumsum(mags**2)
    # at lambda = mags[i] the indicator sum includes everything <= mags[i]
    uniq = np.nonzero(np.diff(np.append(mags, np.inf)) > 0.0)[0]
    sup = float(np.max(mags[uniq] ** (r - 2.0) * cums[uniq]))
    return math.sqrt(sup)


def exceedance_bound_check(arr: CoefficientArray, r: float) -> tuple:
    """Check sup_lambda lambda^r #{|beta| > lambda} <= 2^{2-r} W^2 / (1 - 2^{-r}).

    W is the weak-Besov norm of the array.  Returns (holds, ratio) with
    ratio = LHS/RHS (0 when both vanish).  The LHS supremum over lambda
    is attained as lambda approaches a magnitude from below, where the
    strict exceedance count jumps to the inclusive count.
    """
    if not 0.0 < r < 2.0:
        raise ValueError("need 0 < r < 2")
    mags = np.abs(arr.flat())
    mags = np.sort(mags[mags > 0.0])
    if mags.size == 0:
        return True, 0.0
    counts_at_least = mags.size - np.arange(mags.size)
    lhs = float(np.max(mags**r * counts_at_least))
    rhs = 2.0 ** (2.0 - r) * weak_besov_norm(arr, r) ** 2 / (1.0 - 2.0 ** (-r))
    ratio = lhs / rhs if rhs > 0.0 else math.inf
    return lhs <= rhs * (1.0 + 1e-12), ratio
