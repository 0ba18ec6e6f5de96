"""Jones-calculus model of the probe-polarisation sweep.

A vertically polarised input passes a quarter-wave plate at angle ``phi1``
and then a half-wave plate at angle ``phi2``; the sideband counts follow the
modulus of the vertical-to-vertical amplitude,

    h(phi1, phi2) = 1/2 sqrt(cos 4(phi1 - phi2) + cos 4 phi2 + 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HALF_WAVE = "half_wave"
QUARTER_WAVE = "quarter_wave"


@dataclass(frozen=True)
class JonesMatrix:
    matrix: np.ndarray
    retardance_kind: str
    rotation_angle: float

    def __matmul__(self, other):
        m = other.matrix if isinstance(other, JonesMatrix) else other
        return self.matrix @ m

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))) <= tol)


def waveplate(kind: str, angle: float) -> JonesMatrix:
    """Jones matrix of an ideal waveplate with its fast axis at ``angle``.

    Global phases e^{-i pi/2} (half wave) and e^{-i pi/4} (quarter wave) are
    included.
    """
    c, s = np.cos(angle), np.sin(angle)
    if kind == HALF_WAVE:
        m = np.exp(-0.5j * np.pi) * np.array([[c * c - s * s, 2 * s * c], [2 * s * c, s * s - c * c]])
    elif kind == QUARTER_WAVE:
        m = np.exp(-0.25j * np.pi) * np.array(
            [[c * c + 1j * s * s, (1 - 1j) * s * c], [(1 - 1j) * s * c, 1j * c * c + s * s]]
        )
    else:
        raise ValueError(f"unknown waveplate kind {kind!r}")
    return JonesMatrix(m, kind, float(angle))


def psb_counts_closed_form(phi1, phi2):
    phi1 = np.asarray(phi1, float)
    phi2 = np.asarray(phi2, float)
    arg = np.cos(4 * (phi1 - phi2)) + np.cos(4 * phi2) + 2
    # arg >= 0 analytically; clip rounding below zero
    return 0.5 * np.sqrt(np.clip(arg, 0.0, None))


def psb_counts_matrix(phi1: float, phi2: float) -> float:
    """|<V| M_half(phi2) M_quarter(phi1) |V>| by explicit matrix product."""
    v = np.array([1.0, 0.0])
    out = waveplate(HALF_WAVE, phi2) @ (waveplate(QUARTER_WAVE, phi1) @ v)
    return float(abs(v @ out))


def psb_counts_model(phi1, phi2, check: bool = True):
    """Relative sideband counts h in [0, 1] for quarter-wave angle ``phi1``
    and half-wave angle ``phi2`` (radians).

    With ``check`` the closed form is compared against the matrix product
    (scalar inputs only).
    """
    h = psb_counts_closed_form(phi1, phi2)
    if check and np.ndim(h) == 0:
        hm = psb_counts_matrix(float(phi1), float(phi2))
        if abs(hm - h) > 1e-12:
            raise ArithmeticError(f"closed form {h} and matrix product {hm} disagree")
        return float(h)
    return h


def polarization_map(grid1, grid2, scale: float = 1.0, offset1: float = 0.0, offset2: float = 0.0):
    """``scale * h`` on the grid; rows follow ``grid1`` (phi1), columns ``grid2``.

    ``offset1`` and ``offset2`` shift the plate angles, for comparing against
    measured maps whose absolute angle zero is unknown.
    """
    g1 = np.asarray(grid1, float)
    g2 = np.asarray(grid2, float)
    if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))):
        raise ValueError("angle grids must be finite")
    P1, P2 = np.meshgrid(g1 + offset1, g2 + offset2, indexing="ij")
    return scale * psb_counts_closed_form(P1, P2)
