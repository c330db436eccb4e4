"""Standard spatially inhomogeneous test signals on [0, 1].

Closed-form step/bump/sine/chirp targets with the usual published knot
and height vectors.  The benchmark pipeline rescales each signal to unit
standard deviation on a 2^14 grid before calibrating noise, so reported
errors are comparable across targets.
"""

import math
from dataclasses import dataclass

import numpy as np

_KNOTS = (0.1, 0.13, 0.15, 0.23, 0.25, 0.4, 0.44, 0.65, 0.76, 0.78, 0.81)
_BLOCK_HEIGHTS = (4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2)
_BUMP_HEIGHTS = (4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2)
_BUMP_WIDTHS = (0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005)

SIGNAL_KINDS = ("blocks", "bumps", "heavisine", "doppler")

_SD_GRID = (np.arange(1 << 14) + 0.5) / (1 << 14)
_UNIT_SCALE_CACHE: dict = {}


def _blocks(x):
    out = np.zeros_like(x)
    for t0, h in zip(_KNOTS, _BLOCK_HEIGHTS):
        out += h * (1.0 + np.sign(x - t0)) / 2.0
    return out


def _bumps(x):
    out = np.zeros_like(x)
    for t0, h, w in zip(_KNOTS, _BUMP_HEIGHTS, _BUMP_WIDTHS):
        out += h / (1.0 + np.abs((x - t0) / w)) ** 4
    return out


def _heavisine(x):
    return 4.0 * np.sin(4.0 * np.pi * x) - np.sign(x - 0.3) - np.sign(0.72 - x)


def _doppler(x):
    return np.sqrt(x * (1.0 - x)) * np.sin(2.0 * np.pi * 1.05 / (x + 0.05))


_EVALUATORS = {
    "blocks": _blocks,
    "bumps": _bumps,
    "heavisine": _heavisine,
    "doppler": _doppler,
}


@dataclass(frozen=True)
class TestSignal:
    """One of the named test targets, evaluable anywhere on [0, 1]."""

    kind: str

    def __post_init__(self):
        if self.kind not in _EVALUATORS:
            raise ValueError(f"unknown test signal {self.kind!r}")

    def evaluate(self, x) -> np.ndarray:
        return signal_eval(self, x)

    def unit_scale(self) -> float:
        """Factor that rescales this signal to unit sd on the 2^14 grid."""
        if self.kind not in _UNIT_SCALE_CACHE:
            _UNIT_SCALE_CACHE[self.kind] = 1.0 / grid_sd(self.evaluate)
        return _UNIT_SCALE_CACHE[self.kind]

    def normalized(self):
        """Unit-sd version of the signal as a plain callable."""
        scale = self.unit_scale()
        fn = _EVALUATORS[self.kind]

        def f(x):
            x = np.asarray(x, dtype=float)
            if np.any(x < 0.0) or np.any(x > 1.0):
                raise ValueError("signal argument must lie in [0, 1]")
            return scale * fn(x)

        return f


def signal_eval(sig, x) -> np.ndarray:
    """Raw closed-form signal value; rejects points outside [0, 1]."""
    kind = sig.kind if isinstance(sig, TestSignal) else str(sig)
    try:
        fn = _EVALUATORS[kind]
    except KeyError:
        raise ValueError(f"unknown test signal {kind!r}") from None
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("signal argument must lie in [0, 1]")
    return fn(x)


def grid_sd(fn) -> float:
    """Standard deviation of a callable over the 2^14 midpoint grid."""
    values = np.asarray(fn(_SD_GRID), dtype=float)
    return float(values.std())


def calibrate_sigma(sig, rsnr: float) -> float:
    """Noise sd achieving the requested root signal-to-noise ratio sd(f)/sigma."""
    if rsnr <= 0.0:
        raise ValueError("rsnr must be positive")
    fn = sig.evaluate if isinstance(sig, TestSignal) else sig
    sd = grid_sd(fn)
    if sd == 0.0:
        raise ValueError("constant signal has no signal-to-noise scale")
    return sd / rsnr
