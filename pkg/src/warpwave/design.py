"""Known design densities on [0, 1] and their warping machinery.

A design model bundles the density g, its CDF G, the inverse CDF and a
guaranteed positive lower bound on g.  G and its inverse are stored as
monotone lookup tables at resolution 2^-12 with monotone cubic
interpolation, so evaluation cost is uniform across density shapes.
Models are immutable after construction; sampling takes an explicit
seed so parallel runs never share generator state.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erf

_TABLE_LEVEL = 12
_GRID = np.linspace(0.0, 1.0, (1 << _TABLE_LEVEL) + 1)


def _check_unit_interval(x: np.ndarray, what: str) -> None:
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"{what} must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class DesignModel:
    """Design density g with warping CDF G and inverse, on [0, 1]."""

    kind: str
    params: tuple
    lower_bound_m: float
    _density: object = field(repr=False)
    _cdf_values: np.ndarray = field(repr=False)
    _cdf: PchipInterpolator = field(repr=False)
    _inverse: PchipInterpolator = field(repr=False)

    def density(self, x) -> np.ndarray:
        """g(x); rejects points outside [0, 1]."""
        x = np.asarray(x, dtype=float)
        _check_unit_interval(x, "density argument")
        return np.asarray(self._density(x), dtype=float)

    def cdf(self, x) -> np.ndarray:
        """G(x) = integral of g from 0 to x."""
        x = np.asarray(x, dtype=float)
        _check_unit_interval(x, "cdf argument")
        return np.clip(self._cdf(x), 0.0, 1.0)

    def inverse_cdf(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        _check_unit_interval(u, "inverse cdf argument")
        return np.clip(self._inverse(u), 0.0, 1.0)

    def sample(self, n: int, seed) -> np.ndarray:
        """n i.i.d. design points via inverse-CDF of uniform variates."""
        if n < 1:
            raise ValueError("need at least one sample")
        rng = np.random.default_rng(seed)
        return self.inverse_cdf(rng.random(n))

    def config_params(self) -> dict:
        """Parameters in config-file form (see warpwave.config)."""
        names = {
            "uniform": (),
            "sine": ("design_amplitude",),
            "hole2": ("design_hole_width", "design_hole_min"),
        }
        if self.kind not in names:
            return {}
        return dict(zip(names[self.kind], self.params))


def _build(kind, params, density_fn, cdf_fn, lower_bound) -> DesignModel:
    cdf_values = np.asarray(cdf_fn(_GRID), dtype=float)
    if abs(cdf_values[0]) > 1e-12 or abs(cdf_values[-1] - 1.0) > 1e-10:
        raise ValueError("density does not integrate to 1 over [0, 1]")
    cdf_values[0], cdf_values[-1] = 0.0, 1.0
    if np.any(np.diff(cdf_values) <= 0.0):
        raise ValueError("CDF table is not strictly increasing")
    cdf_values.setflags(write=False)
    return DesignModel(
        kind=kind,
        params=tuple(float(p) for p in params),
        lower_bound_m=float(lower_bound),
        _density=density_fn,
        _cdf_values=cdf_values,
        _cdf=PchipInterpolator(_GRID, cdf_values, extrapolate=False),
        _inverse=PchipInterpolator(cdf_values, _GRID, extrapolate=False),
    )


def uniform_design() -> DesignModel:
    return _build("uniform", (), lambda x: np.ones_like(x), lambda x: x, 1.0)


def sine_design(amplitude: float = 0.5) -> DesignModel:
    """g(x) = 1 + a sin(2 pi x); integrates to 1 for any |a| < 1."""
    if not 0.0 <= abs(amplitude) < 1.0:
        raise ValueError("sine amplitude must satisfy |a| < 1")
    a = float(amplitude)

    def dens(x):
        return 1.0 + a * np.sin(2.0 * np.pi * x)

    def cdf(x):
        return x + a * (1.0 - np.cos(2.0 * np.pi * x)) / (2.0 * np.pi)

    return _build("sine", (a,), dens, cdf, 1.0 - abs(a))


def hole2_design(width: float = 0.15, floor: float = 0.1) -> DesignModel:
    """Density with a central hole: c (m0 + 1 - exp(-((x-1/2)/w)^2)).

    The pair (c, m0) is fixed so the density integrates to 1 and its
    minimum, at x = 1/2, equals ``floor``.
    """
    if width <= 0.0:
        raise ValueError("hole width must be positive")
    if not 0.0 < floor < 1.0:
        raise ValueError("hole floor must lie in (0, 1)")
    w = float(width)
    bump_mass = w * math.sqrt(math.pi) * erf(0.5 / w)
    c = (1.0 - floor) / (1.0 - bump_mass)
    m0 = floor / c

    def dens(x):
        return c * (m0 + 1.0 - np.exp(-(((x - 0.5) / w) ** 2)))

    half = w * math.sqrt(math.pi) / 2.0

    def cdf(x):
        return c * ((m0 + 1.0) * x - half * (erf((x - 0.5) / w) + erf(0.5 / w)))

    return _build("hole2", (w, floor), dens, cdf, floor)


def table_design(table, kind: str = "custom-table") -> DesignModel:
    """Design density from a two-column (x, g(x)) table.

    The table is linearly interpolated, renormalized to unit mass, and
    must stay strictly positive.  ``table`` may be an (m, 2) array or a
    path to a whitespace/comma delimited text file.
    """
    if isinstance(table, (str, bytes)) or hasattr(table, "read_text"):
        raw = np.loadtxt(table, delimiter=None, comments="#")
        if raw.ndim == 1:
            raw = raw.reshape(1, -1)
    else:
        raw = np.asarray(table, dtype=float)
    if raw.ndim != 2 or raw.shape[1] != 2 or raw.shape[0] < 2:
        raise ValueError("density table must be two columns with >= 2 rows")
    x, g = raw[:, 0], raw[:, 1].astype(float)
    if np.any(np.diff(x) <= 0.0):
        raise ValueError("table abscissae must be strictly increasing")
    if abs(x[0]) > 1e-9 or abs(x[-1] - 1.0) > 1e-9:
        raise ValueError("table must span [0, 1]")
    if np.any(g <= 0.0):
        raise ValueError("table density must be strictly positive")
    x = x.copy()
    x[0], x[-1] = 0.0, 1.0

    # Exact mass of the piecewise-linear interpolant, for renormalization.
    seg = np.diff(x) * (g[:-1] + g[1:]) / 2.0
    g = g / seg.sum()
    lower = float(g.min())

    def dens(q):
        return np.interp(q, x, g)

    cum = np.concatenate([[0.0], np.cumsum(np.diff(x) * (g[:-1] + g[1:]) / 2.0)])

    def cdf(q):
        q = np.asarray(q, dtype=float)
        i = np.clip(np.searchsorted(x, q, side="right") - 1, 0, x.size - 2)
        dx = q - x[i]
        slope = (g[i + 1] - g[i]) / (x[i + 1] - x[i])
        return cum[i] + g[i] * dx + 0.5 * slope * dx * dx

    return _build(kind, (), dens, cdf, lower)


_BUILDERS = {
    "uniform": uniform_design,
    "sine": sine_design,
    "hole2": hole2_design,
}


def make_design(kind: str, **params) -> DesignModel:
    try:
        builder = _BUILDERS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown design kind {kind!r}") from None
    return builder(**params)
