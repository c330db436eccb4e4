"""Monte-Carlo benchmark harness: sample, estimate, score, repeat.

One run draws fresh design points and noise, estimates the target with
the configured rule, and scores it by the root mean squared error at the
design points.  Runs are seeded individually (base seed + run index), so
experiments reproduce bit-identically regardless of worker count or
scheduling; the worker count is read from WARPWAVE_WORKERS.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache, partial

import numpy as np

from .coefficients import Sample, empirical_coeffs, reconstruct
from .design import DesignModel
from .shrinkage import RuleSpec, apply_rule, rule_cutoff, rule_name, with_sigma
from .signals import calibrate_sigma
from .wavelets import build_table, get_family


@dataclass(frozen=True)
class CallableSignal:
    """Ad-hoc target for pipeline checks; used as-is, never rescaled."""

    kind: str
    fn: object

    def evaluate(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def normalized(self):
        return self.fn


@dataclass(frozen=True)
class ExperimentConfig:
    """Full specification of one benchmark cell."""

    signal: object
    design: DesignModel
    rule: RuleSpec
    n: int = 1024
    rsnr: float = 4.0
    runs: int = 100
    seed: int = 0
    wavelet: str = "symmlet8"
    table_level: int = 12
    sigma_override: float | None = None
    n_list: tuple | None = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("need n >= 3")
        if self.rsnr <= 0.0:
            raise ValueError("rsnr must be positive")
        if self.runs < 1:
            raise ValueError("need at least one run")

    @property
    def labels(self) -> tuple:
        return (self.signal.kind, self.design.kind, rule_name(self.rule), self.rsnr)


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregated per-cell scores plus the per-run values behind them."""

    signal: str
    design: str
    rule: str
    rsnr: float
    n: int
    runs: int
    mean_rmse: float
    sd_rmse: float
    values: tuple = field(repr=False)


@dataclass(frozen=True)
class RateResult:
    """Error decay against sample size for one rule/signal pair."""

    n_values: tuple
    mean_mse: tuple
    slope: float | None
    undefined: bool


@lru_cache(maxsize=8)
def shared_table(wavelet: str, level: int):
    return build_table(get_family(wavelet), level)


def _signal_fn(cfg: ExperimentConfig):
    return cfg.signal.normalized()


def _noise_sd(cfg: ExperimentConfig) -> float:
    if cfg.sigma_override is not None:
        return float(cfg.sigma_override)
    return calibrate_sigma(_signal_fn(cfg), cfg.rsnr)


def _execute(cfg: ExperimentConfig, run_seed: int, grid=None):
    table = shared_table(cfg.wavelet, cfg.table_level)
    f = _signal_fn(cfg)
    sigma = _noise_sd(cfg)

    design_seed, noise_seed = np.random.SeedSequence(run_seed).spawn(2)
    x = cfg.design.sample(cfg.n, seed=design_seed)
    fx = f(x)
    y = fx + sigma * np.random.default_rng(noise_seed).standard_normal(cfg.n)

    rule = with_sigma(cfg.rule, sigma)
    u = cfg.design.cdf(x)
    coeffs = empirical_coeffs(
        Sample(x, y, sigma), cfg.design, table, rule_cutoff(rule, cfg.n), warped=u
    )
    shrunk = apply_rule(coeffs, rule)
    fhat = reconstruct(shrunk, table, u)
    rmse = float(np.sqrt(np.mean((fhat - fx) ** 2)))
    if grid is None:
        return rmse, None
    estimate = reconstruct(shrunk, table, cfg.design.cdf(grid))
    return rmse, (f(grid), estimate)


def run_once(cfg: ExperimentConfig, run_seed: int) -> float:
    """One seeded benchmark run; deterministic in (cfg, run_seed)."""
    return _execute(cfg, run_seed)[0]


def reconstruct_on_grid(cfg: ExperimentConfig, run_seed: int, grid_points: int = 1024):
    """(grid, truth, estimate) triple from one seeded run, for plotting."""
    grid = np.linspace(0.0, 1.0, grid_points)
    _, pair = _execute(cfg, run_seed, grid=grid)
    return grid, pair[0], pair[1]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WARPWAVE_WORKERS", "1")))
    except ValueError:
        return 1


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Benchmark one cell over cfg.runs seeded runs (seeds seed+1 .. seed+runs)."""
    seeds = [cfg.seed + i for i in range(1, cfg.runs + 1)]
    workers = worker_count()
    if workers > 1 and cfg.runs > 1:
        chunk = max(1, len(seeds) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(partial(run_once, cfg), seeds, chunksize=chunk))
    else:
        values = [run_once(cfg, s) for s in seeds]
    arr = np.asarray(values)
    sd = float(arr.std(ddof=1)) if cfg.runs > 1 else 0.0
    sig, design, rule, rsnr = cfg.labels
    return ExperimentResult(
        signal=sig,
        design=design,
        rule=rule,
        rsnr=rsnr,
        n=cfg.n,
        runs=cfg.runs,
        mean_rmse=float(arr.mean()),
        sd_rmse=sd,
        values=tuple(values),
    )


def rate_study(
    rule: RuleSpec,
    sig,
    n_list,
    design: DesignModel | None = None,
    rsnr: float = 4.0,
    runs: int = 50,
    seed: int = 0,
    wavelet: str = "symmlet8",
    table_level: int = 12,
    sigma_override: float | None = None,
) -> RateResult:
    """Regress log mean MSE on log(n / ln n) over increasing sample sizes.

    MSE rather than RMSE, since risk bounds control squared error.  The
    slope is flagged undefined when a mean MSE vanishes or misbehaves.
    """
    n_values = [int(n) for n in n_list]
    if len(n_values) < 3:
        raise ValueError("need at least three sample sizes")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("sample sizes must be increasing")
    if design is None:
        from .design import uniform_design

        design = uniform_design()

    mean_mse = []
    for i, n in enumerate(n_values):
        cfg = ExperimentConfig(
            signal=sig,
            design=design,
            rule=rule,
            n=n,
            rsnr=rsnr,
            runs=runs,
            seed=seed + 10_000 * i,
            wavelet=wavelet,
            table_level=table_level,
            sigma_override=sigma_override,
        )
        result = run_experiment(cfg)
        mean_mse.append(float(np.mean(np.square(result.values))))

    usable = all(m > 0.0 and math.isfinite(m) for m in mean_mse)
    if usable:
        log_x = np.log([n / math.log(n) for n in n_values])
        slope = float(np.polyfit(log_x, np.log(mean_mse), 1)[0])
    else:
        slope = None
    return RateResult(
        n_values=tuple(n_values),
        mean_mse=tuple(mean_mse),
        slope=slope,
        undefined=not usable,
    )


def with_rule(cfg: ExperimentConfig, rule: RuleSpec) -> ExperimentConfig:
    return replace(cfg, rule=rule)
