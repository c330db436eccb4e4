"""Coefficientwise estimation rules: posterior-median shrinkage and hard thresholding.

The Bayes rules put the prior  beta ~ pi N(0, tau^2) + (1 - pi) delta_0
on each coefficient and report the posterior median given the empirical
coefficient beta_hat, whose noise level gamma_sq is data dependent.
The median has the closed form

    med = sign(beta_hat) max(0, zeta)
    zeta = tau^2/(gamma^2 + tau^2) |beta_hat|
           - tau gamma / sqrt(gamma^2 + tau^2) * PhiInv((1 + min(eta, 1)) / 2)
    eta  = (1 - pi)/pi * sqrt(tau^2 + gamma^2)/gamma
           * exp(-tau^2 beta_hat^2 / (2 gamma^2 (tau^2 + gamma^2)))

which is a genuine thresholding rule: the output is exactly zero for
|beta_hat| at or below an induced threshold.  Two hyperparameter regimes
are provided (level-dependent small-variance and level-free
large-variance) plus a universal hard threshold baseline.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy.special import ndtri

from .coefficients import CoefficientSet, cutoff_large, cutoff_small


@dataclass(frozen=True)
class SmallVarHyper:
    """Level-dependent prior scales tau_j^2 = c1 2^{-j a}, pi_j = min(1, c2 2^{-j b})."""

    c1: float = 1.0
    c2: float = 2.0
    alpha: float = 0.5
    beta: float = 1.0

    def __post_init__(self):
        if self.c1 <= 0.0 or self.c2 <= 0.0:
            raise ValueError("c1 and c2 must be positive")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("decay exponents must be nonnegative")


@dataclass(frozen=True)
class LargeVarHyper:
    """Level-free prior with variance tied to n and prior odds w(n) = w_scale n^{-q/2}.

    tau_mode selects how the prior variance depends on n:
      "theory":    tau^2 = tau_scale / sqrt(n ln n)   (default)
      "paper-sd":  tau   = tau_scale sigma^2 / (n ln n)
      "paper-var": tau^2 = tau_scale sigma^2 / (n ln n)
    """

    q: float = 1.0
    w_scale: float = 20.0
    tau_scale: float = 20.0
    tau_mode: str = "theory"

    def __post_init__(self):
        if self.w_scale <= 0.0 or self.tau_scale <= 0.0:
            raise ValueError("scales must be positive")
        if self.tau_mode not in ("theory", "paper-sd", "paper-var"):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")


@dataclass(frozen=True)
class SmallVarBayes:
    hyper: SmallVarHyper = field(default_factory=SmallVarHyper)


@dataclass(frozen=True)
class LargeVarBayes:
    hyper: LargeVarHyper = field(default_factory=LargeVarHyper)


@dataclass(frozen=True)
class HardUniversal:
    """Hard threshold at sigma sqrt(2 ln n) on the coefficient noise scale.

    sigma = None defers to the sample noise level at application time.
    literal_scale applies the raw sigma sqrt(2 ln n) without the 1/sqrt(n)
    coefficient-scale factor, for comparison.
    """

    sigma: float | None = None
    literal_scale: bool = False


RuleSpec = Union[SmallVarBayes, LargeVarBayes, HardUniversal]


def posterior_median(beta_hat, gamma_sq, tau_sq, pi):
    """Posterior median under the Gaussian/point-mass prior; vectorized.

    pi = 0 returns 0 everywhere (all prior mass at zero); pi = 1 reduces
    to pure linear shrinkage tau^2/(tau^2 + gamma^2) beta_hat.
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    gamma_sq = np.asarray(gamma_sq, dtype=float)
    tau_sq = np.asarray(tau_sq, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if np.any(gamma_sq <= 0.0):
        raise ValueError("gamma_sq must be positive")
    if np.any(tau_sq <= 0.0):
        raise ValueError("tau_sq must be positive")
    if np.any(pi < 0.0) or np.any(pi > 1.0):
        raise ValueError("pi must lie in [0, 1]")

    total = tau_sq + gamma_sq
    shrink = tau_sq / total
    post_sd = np.sqrt(shrink * gamma_sq)
    with np.errstate(divide="ignore"):
        log_odds = np.log1p(-pi) - np.log(pi)
    # eta in log space; min(eta, 1) caps the quantile argument at 1.
    log_eta = (
        log_odds
        + 0.5 * (np.log(total) - np.log(gamma_sq))
        - shrink * beta_hat**2 / (2.0 * gamma_sq)
    )
    dead = log_eta >= 0.0  # eta >= 1: the point mass holds the median at 0
    eta = np.exp(np.where(dead, 0.0, log_eta))
    quantile = np.where(dead, np.inf, ndtri((1.0 + np.minimum(eta, 1.0)) / 2.0))
    zeta = shrink * np.abs(beta_hat) - post_sd * quantile
    out = np.sign(beta_hat) * np.maximum(0.0, zeta)
    out = np.where(pi == 0.0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def small_var_params(j: int, hyper: SmallVarHyper) -> tuple:
    """(tau_sq, pi) at level j; the scaling row j = -1 uses the j = 0 values."""
    if j < -1:
        raise ValueError("level must be >= -1")
    je = max(j, 0)
    tau_sq = hyper.c1 * 2.0 ** (-je * hyper.alpha)
    pi = min(1.0, hyper.c2 * 2.0 ** (-je * hyper.beta))
    return tau_sq, pi


def large_var_params(n: int, hyper: LargeVarHyper, sigma: float = 1.0) -> tuple:
    """(tau_sq, pi) for the level-free regime at sample size n."""
    if n < 3:
        raise ValueError("need n >= 3")
    log_n = math.log(n)
    if hyper.tau_mode == "theory":
        tau_sq = hyper.tau_scale / math.sqrt(n * log_n)
    elif hyper.tau_mode == "paper-sd":
        tau_sq = (hyper.tau_scale * sigma**2 / (n * log_n)) ** 2
    else:  # paper-var
        tau_sq = hyper.tau_scale * sigma**2 / (n * log_n)
    w = hyper.w_scale * n ** (-hyper.q / 2.0)
    pi = w / (1.0 + w)
    return tau_sq, pi


def hard_threshold(beta_hat, sigma: float, n: int, literal_scale: bool = False):
    """Keep beta_hat where |beta_hat| strictly exceeds the universal threshold.

    The threshold sigma sqrt(2 ln n) is applied on the coefficient scale,
    i.e. divided by sqrt(n) since the coefficient noise sd is about
    sigma/sqrt(n); literal_scale skips that division.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    lam = sigma * math.sqrt(2.0 * math.log(n))
    if not literal_scale:
        lam /= math.sqrt(n)
    beta_hat = np.asarray(beta_hat, dtype=float)
    out = np.where(np.abs(beta_hat) > lam, beta_hat, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def locate_threshold(tau_sq: float, pi: float, gamma_sq: float) -> float:
    """Induced threshold of the posterior-median rule, by bisection to 1e-12.

    Returns the unique lambda >= 0 with a zero posterior median at
    |beta_hat| <= lambda and a positive one beyond; exists only for
    0 < pi < 1.
    """
    if not 0.0 < pi < 1.0:
        raise ValueError("threshold is defined only for pi strictly inside (0, 1)")
    if tau_sq <= 0.0 or gamma_sq <= 0.0:
        raise ValueError("variances must be positive")

    def dead(b: float) -> bool:
        return posterior_median(b, gamma_sq, tau_sq, pi) == 0.0

    hi = math.sqrt(gamma_sq + tau_sq)
    while dead(hi):
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("no finite threshold located")
    lo = 0.0
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2.0
        if dead(mid):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def rule_cutoff(rule: RuleSpec, n: int) -> int:
    """Level cutoff the rule must be paired with at sample size n.

    For the small-variance rule a prior decay alpha below 1 is clamped to
    the alpha = 1 boundary, since the cutoff formula only admits alpha >= 1.
    """
    if isinstance(rule, SmallVarBayes):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return cutoff_small(n, max(rule.hyper.alpha, 1.0))
    return cutoff_large(n)


def apply_rule(coeffs: CoefficientSet, rule: RuleSpec) -> CoefficientSet:
    """Shrink every coefficient per the rule, using that entry's own noise level.

    The scaling row j = -1 passes through unshrunk.  Atoms whose support
    caught no sample (gamma_sq = 0) carry no information and map to 0.
    The set's cutoff must match the rule's regime.
    """
    expected = rule_cutoff(rule, coeffs.n)
    if coeffs.j_max != expected:
        raise ValueError(
            f"rule expects level cutoff {expected}, coefficient set has {coeffs.j_max}"
        )
    sigma = coeffs.sigma
    if isinstance(rule, HardUniversal) and rule.sigma is not None:
        sigma = rule.sigma

    new_beta = [coeffs.beta[0].copy()]  # scaling row untouched
    for j in range(0, coeffs.j_max + 1):
        beta_j, gamma_j = coeffs.level(j)
        if isinstance(rule, HardUniversal):
            shrunk = hard_threshold(beta_j, sigma, coeffs.n, rule.literal_scale)
        else:
            if isinstance(rule, SmallVarBayes):
                tau_sq, pi = small_var_params(j, rule.hyper)
            else:
                tau_sq, pi = large_var_params(coeffs.n, rule.hyper, sigma)
            live = gamma_j > 0.0
            shrunk = np.zeros_like(beta_j)
            if np.any(live):
                shrunk[live] = posterior_median(
                    beta_j[live], gamma_j[live], tau_sq, pi
                )
        new_beta.append(shrunk)
    return coeffs.with_beta(new_beta)


@dataclass(frozen=True)
class WeightAuditReport:
    """Empirical check of the shrinkage-weight conditions behind the risk bound.

    w[j,k] = shrunk/original coefficient (0 at original 0); t_n = sqrt(ln n / n).
    ``smallest_c`` makes  |beta_hat| <= m t_n  =>  w <= c t_n  hold on this
    realization, ``smallest_k`` makes  1 - w <= K (t_n/|beta_hat| + t_n)  hold,
    and ``high_level_nonzero`` counts surviving weights at levels >= the
    large-variance cutoff, which the conditions require to vanish.
    """

    t_n: float
    level_cutoff: int
    m: float
    w_min: float
    w_max: float
    range_violation: float
    smallest_c: float
    smallest_k: float
    high_level_nonzero: int


def weight_audit(
    original: CoefficientSet,
    shrunk: CoefficientSet,
    n: int,
    m: float = 1.0,
) -> WeightAuditReport:
    """Audit the per-coefficient shrinkage weights of shrunk against original."""
    if original.j_max != shrunk.j_max or original.n != shrunk.n:
        raise ValueError("coefficient sets are not aligned")
    if m <= 0.0:
        raise ValueError("band constant m must be positive")
    t_n = math.sqrt(math.log(n) / n)
    j_cut = cutoff_large(n)

    w_min, w_max = np.inf, -np.inf
    smallest_c = 0.0
    smallest_k = 0.0
    high_nonzero = 0
    for j in range(-1, original.j_max + 1):
        b0 = original.beta[j + 1]
        b1 = shrunk.beta[j + 1]
        w = np.divide(b1, b0, out=np.zeros_like(b0), where=b0 != 0.0)
        w_min = min(w_min, float(w.min()))
        w_max = max(w_max, float(w.max()))
        if j >= j_cut:
            high_nonzero += int(np.sum(w != 0.0))
            continue
        below = np.abs(b0) <= m * t_n
        if np.any(below):
            smallest_c = max(smallest_c, float(w[below].max()) / t_n)
        live = b0 != 0.0
        if np.any(live):
            need = (1.0 - w[live]) / (t_n / np.abs(b0[live]) + t_n)
            smallest_k = max(smallest_k, float(need.max()))
    range_violation = max(0.0, w_max - 1.0, -w_min)
    return WeightAuditReport(
        t_n=t_n,
        level_cutoff=j_cut,
        m=m,
        w_min=w_min,
        w_max=w_max,
        range_violation=range_violation,
        smallest_c=smallest_c,
        smallest_k=smallest_k,
        high_level_nonzero=high_nonzero,
    )


def rule_name(rule: RuleSpec) -> str:
    if isinstance(rule, LargeVarBayes):
        return "bayes-large"
    if isinstance(rule, SmallVarBayes):
        return "bayes-small"
    return "hard"


def make_rule(name: str, **hyper) -> RuleSpec:
    name = name.lower()
    if name in ("bayes-large", "large"):
        return LargeVarBayes(LargeVarHyper(**hyper))
    if name in ("bayes-small", "small"):
        return SmallVarBayes(SmallVarHyper(**hyper))
    if name == "hard":
        return HardUniversal(**hyper)
    raise ValueError(f"unknown rule {name!r}")


def with_sigma(rule: RuleSpec, sigma: float) -> RuleSpec:
    """Resolve a deferred hard-threshold sigma; Bayes rules are returned as is."""
    if isinstance(rule, HardUniversal) and rule.sigma is None:
        return replace(rule, sigma=sigma)
    return rule
