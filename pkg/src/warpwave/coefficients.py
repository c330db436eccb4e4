"""Empirical warped coefficients, their stochastic noise levels, and level cutoffs.

For a sample (X_i, Y_i) with known design CDF G, the coefficient of atom
(j, k) is estimated by direct summation

    beta_hat[j,k]  = (1/n) sum_i psi_jk(G(X_i)) Y_i
    gamma_sq[j,k]  = (sigma^2/n^2) sum_i psi_jk(G(X_i))^2

gamma_sq is the data-dependent noise level of beta_hat; its expectation
is sigma^2/n.  Sums are accumulated with numpy's pairwise reduction to
keep n * 2^J-term accumulations accurate.
"""

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .design import DesignModel
from .wavelets import DyadicTable


@dataclass(frozen=True)
class Sample:
    """Regression sample: design points x in [0, 1], responses y, noise sd sigma."""

    x: np.ndarray
    y: np.ndarray
    sigma: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 1:
            raise ValueError("x and y must be equal-length 1-d arrays")
        if self.sigma < 0.0:
            raise ValueError("noise sd must be nonnegative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class CoefficientSet:
    """Per-(j,k) empirical coefficients and noise levels up to level j_max.

    ``beta`` and ``gamma_sq`` hold one array per level, starting with the
    scaling row j = -1; level j >= 0 holds 2^j entries.
    """

    j_max: int
    n: int
    sigma: float
    beta: tuple = field(repr=False)
    gamma_sq: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.beta) != self.j_max + 2 or len(self.gamma_sq) != self.j_max + 2:
            raise ValueError("need one row per level from -1 to j_max")
        for j in range(-1, self.j_max + 1):
            want = 1 << max(j, 0)
            if self.beta[j + 1].size != want or self.gamma_sq[j + 1].size != want:
                raise ValueError(f"level {j} must hold {want} entries")
            if np.any(self.gamma_sq[j + 1] < 0.0):
                raise ValueError("noise levels must be nonnegative")

    @property
    def total_atoms(self) -> int:
        return 1 << (self.j_max + 1)

    def level(self, j: int) -> tuple:
        return self.beta[j + 1], self.gamma_sq[j + 1]

    def levels(self):
        for j in range(-1, self.j_max + 1):
            yield j, self.beta[j + 1], self.gamma_sq[j + 1]

    def flat_beta(self) -> np.ndarray:
        return np.concatenate(self.beta)

    def flat_gamma_sq(self) -> np.ndarray:
        return np.concatenate(self.gamma_sq)

    def with_beta(self, new_beta) -> "CoefficientSet":
        return CoefficientSet(
            j_max=self.j_max,
            n=self.n,
            sigma=self.sigma,
            beta=tuple(np.asarray(b, dtype=float) for b in new_beta),
            gamma_sq=self.gamma_sq,
        )

    def write_csv(self, path) -> None:
        """Flat (j, k, beta_hat, gamma_sq) dump for inspection."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "k", "beta_hat", "gamma_sq"])
            for j, beta_j, gam_j in self.levels():
                for k in range(beta_j.size):
                    writer.writerow(
                        [j, k, repr(float(beta_j[k])), repr(float(gam_j[k]))]
                    )


def empirical_coeffs(
    sample: Sample,
    model: DesignModel,
    table: DyadicTable,
    j_max: int,
    warped: np.ndarray | None = None,
) -> CoefficientSet:
    """Empirical warped coefficients and noise levels up to level j_max.

    ``warped`` may pass precomputed G(x) values to share the CDF lookup
    with reconstruction.
    """
    if j_max < 0:
        raise ValueError("level cutoff must be >= 0")
    u = model.cdf(sample.x) if warped is None else np.asarray(warped, dtype=float)
    n = sample.n
    beta, gamma = [], []
    for j in range(-1, j_max + 1):
        first, second = table.level_moments(j, u, sample.y)
        beta.append(first / n)
        gamma.append(second * (sample.sigma**2 / n**2))
    return CoefficientSet(
        j_max=j_max,
        n=n,
        sigma=float(sample.sigma),
        beta=tuple(beta),
        gamma_sq=tuple(gamma),
    )


def reconstruct(
    coeffs: CoefficientSet, table: DyadicTable, u: np.ndarray
) -> np.ndarray:
    """Evaluate sum_jk beta[j,k] psi_jk(u) at warped points u = G(x)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for j, beta_j, _ in coeffs.levels():
        out += table.level_apply(j, u, beta_j)
    return out


def cutoff_small(n: int, alpha: float) -> int:
    """Level cutoff for the small-variance regime: floor(log2((2n/3)^(1/alpha))).

    Requires alpha >= 1; the alpha = 1 boundary is admitted with a warning
    since the regime's risk bound needs alpha > 1.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if alpha < 1.0:
        raise ValueError("small-variance cutoff requires alpha >= 1")
    if alpha == 1.0:
        warnings.warn(
            "alpha = 1 is the boundary of the admissible range",
            RuntimeWarning,
            stacklevel=2,
        )
    return max(0, math.floor(math.log2(2.0 * n / 3.0) / alpha))


def cutoff_large(n: int) -> int:
    """Level cutoff for the large-variance regime: floor(log2(n / ln n))."""
    if n < 3:
        raise ValueError("need n >= 3")
    return math.floor(math.log2(n / math.log(n)))


def noise_concentration_fraction(coeffs: CoefficientSet, delta: float) -> float:
    """Fraction of atoms whose normalized noise level concentrates near 1/n.

    Counts entries with |gamma_sq / sigma^2 - 1/n| <= delta; the theory
    controls the Bayes rules on the event where this holds everywhere.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if coeffs.sigma <= 0.0:
        raise ValueError("concentration check needs sigma > 0")
    target = 1.0 / coeffs.n
    hits = 0
    for _, _, gam in coeffs.levels():
        hits += int(np.sum(np.abs(gam / coeffs.sigma**2 - target) <= delta))
    return hits / coeffs.total_atoms
