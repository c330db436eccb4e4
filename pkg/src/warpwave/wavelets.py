"""Compactly supported orthonormal wavelets evaluated from dyadic tables.

The working basis is periodized on [0, 1].  Atoms are indexed by
(j, k) with j = -1 denoting the single coarse scaling atom (the level-0
father function); for j >= 0 level j holds 2**j mother atoms.

Point evaluation goes through a precomputed table of father/mother
samples on a dyadic grid.  Tables are built once by refining the
two-scale relation and are immutable afterwards, so they can be shared
freely across worker processes.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

_SQRT2 = math.sqrt(2.0)

# Published orthonormal filter bank values (sum normalized to 2); the
# unit-norm lowpass used everywhere below is derived at import time.
_SYMMLET8_RAW = (
    0.002672793393,
    -0.000428394300,
    -0.021145686528,
    0.005386388754,
    0.069490465911,
    -0.038493521263,
    -0.073462508761,
    0.515398670374,
    1.099106630537,
    0.680745347190,
    -0.086653615406,
    -0.202648655286,
    0.010758611751,
    0.044823623042,
    -0.000766690896,
    -0.004783458512,
)


class AtomIndex(NamedTuple):
    """Basis atom position: level j >= -1 and translate k in [0, 2**max(j,0))."""

    j: int
    k: int


@dataclass(frozen=True)
class WaveletFamily:
    """Orthonormal filter defining a compactly supported wavelet pair.

    ``lowpass`` holds the unit-norm refinement taps h with sum(h) = sqrt(2)
    and the double-shift orthonormality sum_k h[k] h[k+2m] = delta_m.
    ``step_function`` marks families whose father/mother functions are
    piecewise constant (Haar); those are evaluated by step lookup instead
    of linear interpolation so that inner products stay exact.
    """

    name: str
    lowpass: tuple
    vanishing_moments: int
    step_function: bool = False

    @property
    def support_len(self) -> int:
        return len(self.lowpass)

    def validate(self) -> None:
        h = np.asarray(self.lowpass, dtype=float)
        if h.ndim != 1 or h.size < 2 or h.size % 2 != 0:
            raise ValueError("lowpass filter must have even length >= 2")
        if abs(h.sum() - _SQRT2) > 1e-12:
            raise ValueError(
                f"filter taps must sum to sqrt(2); got {h.sum()!r}"
            )
        for m in range(1, h.size // 2 + 1):
            dot = float(np.dot(h[: h.size - 2 * m], h[2 * m:]))
            if abs(dot) > 1e-12:
                raise ValueError(
                    f"filter fails double-shift orthonormality at shift {m}"
                )
        if abs(float(h @ h) - 1.0) > 1e-12:
            raise ValueError("filter taps must have unit l2 norm")
        if self.vanishing_moments < 1:
            raise ValueError("need at least one vanishing moment")

    def highpass(self) -> np.ndarray:
        """Quadrature mirror taps g[k] = (-1)^k h[N-1-k]."""
        h = np.asarray(self.lowpass, dtype=float)
        signs = np.where(np.arange(h.size) % 2 == 0, 1.0, -1.0)
        return signs * h[::-1]


HAAR = WaveletFamily(
    name="haar",
    lowpass=(1.0 / _SQRT2, 1.0 / _SQRT2),
    vanishing_moments=1,
    step_function=True,
)

_s8 = np.asarray(_SYMMLET8_RAW)
SYMMLET8 = WaveletFamily(
    name="symmlet8",
    lowpass=tuple(float(v) for v in _s8 / np.linalg.norm(_s8)),
    vanishing_moments=8,
)
del _s8

FAMILIES = {f.name: f for f in (HAAR, SYMMLET8)}


def get_family(name: str) -> WaveletFamily:
    try:
        return FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown wavelet family {name!r}") from None


def _integer_values(h: np.ndarray) -> np.ndarray:
    """Father function at integers of its support, via the two-scale eigenproblem."""
    n = h.size
    if n == 2:
        # Box function, right-continuous at the jump.
        return np.array([1.0, 0.0])
    # phi(a) = sqrt(2) sum_b h[2a-b] phi(b) on interior integers 1..n-2.
    idx = np.arange(1, n - 1)
    shifts = 2 * idx[:, None] - idx[None, :]
    mat = np.where((shifts >= 0) & (shifts < n), _SQRT2 * h[np.clip(shifts, 0, n - 1)], 0.0)
    vals, vecs = np.linalg.eig(mat)
    pick = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[pick] - 1.0) > 1e-8:
        raise ValueError("two-scale operator has no unit eigenvalue; bad filter")
    v = np.real(vecs[:, pick])
    v = v / v.sum()  # partition of unity: sum_k phi(k) = 1
    out = np.zeros(n)
    out[1:-1] = v
    return out


def _refine(h: np.ndarray, values: np.ndarray, level: int) -> np.ndarray:
    """One dyadic refinement of father samples using the two-scale relation."""
    width = h.size - 1
    half = 1 << (level - 1)
    fine = np.zeros(width * 2 * half + 1)
    fine[::2] = values
    odd = np.arange(1, fine.size, 2)
    acc = np.zeros(odd.size)
    for k in range(h.size):
        src = odd - k * half
        ok = (src >= 0) & (src < values.size)
        acc[ok] += h[k] * values[src[ok]]
    fine[1::2] = _SQRT2 * acc
    return fine


@dataclass(frozen=True)
class DyadicTable:
    """Father/mother samples on the grid {i 2^-L} over the common support [0, N-1].

    Immutable after construction; evaluation only reads the sample arrays.
    """

    family: WaveletFamily
    resolution_level: int
    phi_samples: np.ndarray = field(repr=False)
    psi_samples: np.ndarray = field(repr=False)
    support_interval: tuple
    refinement_residual: float

    @property
    def spacing(self) -> float:
        return 2.0 ** (-self.resolution_level)

    def _base(self, which: str, s: np.ndarray) -> np.ndarray:
        """Evaluate the unperiodized father ('phi') or mother ('psi') at s."""
        samples = self.phi_samples if which == "phi" else self.psi_samples
        width = self.support_interval[1]
        pos = s * (1 << self.resolution_level)
        out = np.zeros_like(pos)
        if self.family.step_function:
            inside = (s >= 0.0) & (s < width)
            i = np.floor(pos[inside]).astype(np.int64)
            out[inside] = samples[i]
        else:
            inside = (s >= 0.0) & (s <= width)
            p = pos[inside]
            i = np.minimum(np.floor(p).astype(np.int64), samples.size - 2)
            frac = p - i
            out[inside] = samples[i] * (1.0 - frac) + samples[i + 1] * frac
        return out

    def evaluate(self, j: int, k: int, x) -> np.ndarray:
        """Periodized atom value: sum_l 2^{j/2} psi(2^j (x+l) - k), father for j = -1.

        The sum is finite by compact support; x must lie in [0, 1].
        """
        _check_atom(j, k)
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        je = max(j, 0)
        which = "phi" if j == -1 else "psi"
        t = x * (1 << je)
        base = np.floor(t)
        total = np.zeros_like(t)
        period = 1 << je
        for m in range(self.family.support_len - 1):
            d = base - m
            mask = np.mod(d, period) == (k % period)
            if np.any(mask):
                total[mask] += self._base(which, t[mask] - d[mask])
        return float(2.0 ** (je / 2.0)) * total

    def atom_matrix(self, j: int, x: np.ndarray) -> np.ndarray:
        """Values of every level-j atom at the points x, as an (len(x), 2^max(j,0)) array."""
        _check_atom(j, 0)
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        rows = np.arange(x.size)
        out = np.zeros((x.size, 1 << max(j, 0)))
        for vals, colk in self._passes(j, x):
            # rows are distinct within one pass, so plain fancy-index
            # accumulation is collision-free; wrapped translates land in
            # later passes.
            out[rows, colk] += vals
        return out

    def _passes(self, j: int, x: np.ndarray):
        """Yield (values, translates) per support offset at level j."""
        je = max(j, 0)
        which = "phi" if j == -1 else "psi"
        cols = 1 << je
        t = x * (1 << je)
        base = np.floor(t)
        scale = float(2.0 ** (je / 2.0))
        for m in range(self.family.support_len - 1):
            d = base - m
            vals = scale * self._base(which, t - d)
            yield vals, np.mod(d, cols).astype(np.int64)

    def level_moments(self, j: int, x: np.ndarray, y: np.ndarray) -> tuple:
        """Per-translate sums (sum_i psi_jk(x_i) y_i, sum_i psi_jk(x_i)^2) at level j.

        When the periodized support wraps (2^j below the filter width)
        the dense block is used so squared atom values stay exact.
        """
        _check_atom(j, 0)
        x = np.asarray(x, dtype=float)
        cols = 1 << max(j, 0)
        if cols <= self.family.support_len - 2:
            block = self.atom_matrix(j, x)
            return (block * y[:, None]).sum(axis=0), (block * block).sum(axis=0)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        first = np.zeros(cols)
        second = np.zeros(cols)
        for vals, colk in self._passes(j, x):
            first += np.bincount(colk, weights=vals * y, minlength=cols)
            second += np.bincount(colk, weights=vals * vals, minlength=cols)
        return first, second

    def level_apply(self, j: int, x: np.ndarray, coef: np.ndarray) -> np.ndarray:
        """sum_k coef[k] psi_jk(x): one level's contribution to a reconstruction."""
        _check_atom(j, 0)
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        coef = np.asarray(coef, dtype=float)
        if coef.size != (1 << max(j, 0)):
            raise ValueError("coefficient row does not match the level")
        out = np.zeros_like(x)
        for vals, colk in self._passes(j, x):
            out += vals * coef[colk]
        return out


def _trapezoid(samples: np.ndarray, dx: float) -> float:
    return float((samples[0] / 2 + samples[1:-1].sum() + samples[-1] / 2) * dx)


def _check_atom(j: int, k: int) -> None:
    if j < -1:
        raise ValueError("level must be >= -1")
    if not 0 <= k < (1 << max(j, 0)):
        raise ValueError(f"translate k={k} out of range at level {j}")


def build_table(family: WaveletFamily, level: int = 12) -> DyadicTable:
    """Build the dyadic sample table by cascade refinement of the two-scale relation.

    Rejects non-orthonormal filters and levels too coarse to resolve the
    support.  The construction is deterministic, and the result is checked
    to be a fixed point of the refinement map to within 2^-level.
    """
    family.validate()
    if level < 6:
        raise ValueError("table resolution level must be >= 6")
    h = np.asarray(family.lowpass, dtype=float)
    width = h.size - 1
    phi = _integer_values(h)
    for m in range(1, level + 1):
        phi = _refine(h, phi, m)

    # Fixed-point residual: one more application of the two-scale map.
    scale = 1 << level
    idx = np.arange(phi.size)
    again = np.zeros_like(phi)
    for k in range(h.size):
        src = 2 * idx - k * scale
        ok = (src >= 0) & (src < phi.size)
        again[ok] += h[k] * phi[src[ok]]
    residual = float(np.max(np.abs(_SQRT2 * again - phi)))
    if residual >= 2.0 ** (-level):
        raise ValueError("cascade refinement did not reach its fixed point")

    g = family.highpass()
    psi = np.zeros_like(phi)
    for k in range(g.size):
        src = 2 * idx - k * scale
        ok = (src >= 0) & (src < phi.size)
        psi[ok] += g[k] * phi[src[ok]]
    psi *= _SQRT2

    spacing = 2.0 ** (-level)
    tol = 2.0 ** (-level + 3)
    if abs(_trapezoid(phi, spacing) - 1.0) > tol:
        raise ValueError("father samples fail the unit-integral check")
    if abs(_trapezoid(psi, spacing)) > tol:
        raise ValueError("mother samples fail the zero-mean check")

    phi.setflags(write=False)
    psi.setflags(write=False)
    return DyadicTable(
        family=family,
        resolution_level=level,
        phi_samples=phi,
        psi_samples=psi,
        support_interval=(0.0, float(width)),
        refinement_residual=residual,
    )


def atom_count(j_max: int) -> int:
    """Number of atoms with levels -1..j_max (scaling row included)."""
    if j_max < -1:
        raise ValueError("j_max must be >= -1")
    return 1 << (j_max + 1)


def all_atoms(j_max: int):
    """Iterate AtomIndex values for levels -1..j_max in storage order."""
    for j in range(-1, j_max + 1):
        for k in range(1 << max(j, 0)):
            yield AtomIndex(j, k)


def eval_periodized(table: DyadicTable, atom: AtomIndex, x) -> np.ndarray:
    return table.evaluate(atom[0], atom[1], x)


def gram_deviation(table: DyadicTable, j_max: int, quad_points: int) -> float:
    """Max |<psi_a, psi_b> - delta_ab| over atoms with levels <= j_max.

    Inner products use the composite midpoint rule on [0, 1].
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    if quad_points < (1 << (j_max + 6)):
        raise ValueError("quad_points too small for the requested level range")
    xq = (np.arange(quad_points) + 0.5) / quad_points
    blocks = [table.atom_matrix(j, xq) for j in range(-1, j_max + 1)]
    design = np.hstack(blocks)
    gram = design.T @ design / quad_points
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.max(np.abs(gram)))
