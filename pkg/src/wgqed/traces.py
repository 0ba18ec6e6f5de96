"""Sampled spectra and correlation curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AUTO_PAIRS = ("TT", "RR", "PP")


def _as_1d(x, name):
    a = np.asarray(x, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return a


@dataclass(frozen=True)
class SpectrumTrace:
    """Values sampled on a detuning/frequency/power axis.

    ``sigma`` is ``None`` when no per-point uncertainties are known.
    """

    x: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None
    channel: str = ""
    x_unit: str = ""

    def __post_init__(self):
        x = _as_1d(self.x, "x")
        v = _as_1d(self.values, "values")
        if x.shape != v.shape:
            raise ValueError("x and values must have the same length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        if self.sigma is not None:
            s = _as_1d(self.sigma, "sigma")
            if s.shape != x.shape:
                raise ValueError("sigma must match x")
            if np.any(s <= 0):
                raise ValueError("sigma must be positive")
            object.__setattr__(self, "sigma", s)

    @property
    def has_sigma(self) -> bool:
        return self.sigma is not None

    def __len__(self):
        return self.x.size


@dataclass(frozen=True)
class CorrelationTrace:
    """g2 samples on a delay grid."""

    tau: np.ndarray
    values: np.ndarray
    channel_pair: str = ""
    normalization: float = float("nan")
    sigma: np.ndarray | None = None

    def __post_init__(self):
        t = _as_1d(self.tau, "tau")
        v = _as_1d(self.values, "values")
        if t.shape != v.shape:
            raise ValueError("tau and values must have the same length")
        object.__setattr__(self, "tau", t)
        object.__setattr__(self, "values", v)
        if self.sigma is not None:
            s = _as_1d(self.sigma, "sigma")
            if s.shape != t.shape:
                raise ValueError("sigma must match tau")
            object.__setattr__(self, "sigma", s)

    @property
    def has_sigma(self) -> bool:
        return self.sigma is not None

    def at(self, tau: float) -> float:
        """Value at the grid point closest to ``tau``."""
        return float(self.values[np.argmin(np.abs(self.tau - tau))])

    def __len__(self):
        return self.tau.size
