"""Operator algebra on small composite Hilbert spaces.

Spaces are ordered tensor products of two-level systems and truncated bosonic
modes, optionally restricted to states with a bounded total number of
excitations. Operators are dense ``numpy`` matrices; Lindblad generators are
stored as ``scipy.sparse`` matrices acting on column-stacked density matrices,

    vec(A X B) = (B^T kron A) vec(X),

so ``rho.reshape(-1, order="F")`` is the vector a superoperator acts on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    NondegeneracyError,
    NumericalError,
    SpaceMismatchError,
    TruncationWarning,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8
# reciprocal-condition threshold below which the trace-constrained generator is
# treated as having more than one stationary state
_COND_LIMIT = 1e13


@dataclass(frozen=True)
class TwoLevel:
    """Emitter with basis ordering (|g>, |e>)."""

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class BosonicMode:
    """Harmonic mode keeping Fock levels 0 .. cutoff-1."""

    cutoff: int

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise ValueError("BosonicMode cutoff must be an integer >= 2")

    @property
    def dim(self) -> int:
        return self.cutoff


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor product of subsystems.

    Parameters
    ----------
    subsystems : sequence of TwoLevel / BosonicMode
    max_excitations : int, optional
        If given, only product states whose total excitation number (emitter
        excitation plus all photons) is at most this value are kept.
    """

    subsystems: tuple
    max_excitations: int | None = None
    _keep: np.ndarray = field(init=False, repr=False, compare=False)
    _excitations: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        subs = tuple(self.subsystems)
        if not subs:
            raise ValueError("a HilbertSpace needs at least one subsystem")
        for s in subs:
            if not isinstance(s, (TwoLevel, BosonicMode)):
                raise TypeError(f"unknown subsystem {s!r}")
        object.__setattr__(self, "subsystems", subs)
        grids = np.meshgrid(*[np.arange(s.dim) for s in subs], indexing="ij")
        exc = sum(g.ravel() for g in grids)
        if self.max_excitations is None:
            keep = np.arange(exc.size)
        else:
            if self.max_excitations < 1:
                raise ValueError("max_excitations must be >= 1")
            keep = np.flatnonzero(exc <= self.max_excitations)
        object.__setattr__(self, "_keep", keep)
        object.__setattr__(self, "_excitations", exc[keep])
        if keep.size < 2:
            raise ValueError("total dimension must be at least 2")

    @property
    def dims(self) -> tuple:
        return tuple(s.dim for s in self.subsystems)

    @property
    def full_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def dim(self) -> int:
        return int(self._keep.size)

    @property
    def excitation_numbers(self) -> np.ndarray:
        return self._excitations.copy()

    def __eq__(self, other):
        return (
            isinstance(other, HilbertSpace)
            and self.subsystems == other.subsystems
            and self.max_excitations == other.max_excitations
        )

    def __hash__(self):
        return hash((self.subsystems, self.max_excitations))

    def restrict(self, full_matrix: np.ndarray) -> np.ndarray:
        """Compress an operator on the full tensor product to the kept states."""
        k = self._keep
        return np.asarray(full_matrix)[np.ix_(k, k)]

    def embed_full(self, local: np.ndarray, index: int) -> np.ndarray:
        """``local`` on subsystem ``index``, identity elsewhere (full product)."""
        factors = [np.eye(s.dim) for s in self.subsystems]
        factors[index] = np.asarray(local)
        return reduce(np.kron, factors)

    def embed(self, local: np.ndarray, index: int) -> "QOperator":
        self._check_index(index)
        return QOperator(self, self.restrict(self.embed_full(local, index)))

    def identity(self) -> "QOperator":
        return QOperator(self, np.eye(self.dim, dtype=complex))

    def basis_state(self, levels: Sequence[int]) -> np.ndarray:
        """Ket for the product state with the given per-subsystem levels."""
        flat = np.ravel_multi_index(tuple(levels), self.dims)
        pos = np.searchsorted(self._keep, flat)
        if pos >= self._keep.size or self._keep[pos] != flat:
            raise ValueError(f"state {tuple(levels)} lies outside the truncated space")
        ket = np.zeros(self.dim, dtype=complex)
        ket[pos] = 1.0
        return ket

    def _check_index(self, index: int):
        if not 0 <= index < len(self.subsystems):
            raise IndexError(f"subsystem index {index} out of range")


class QOperator:
    """Dense operator bound to a HilbertSpace."""

    __array_priority__ = 100

    def __init__(self, space: HilbertSpace, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (space.dim, space.dim):
            raise SpaceMismatchError(
                f"matrix shape {m.shape} does not match space dimension {space.dim}"
            )
        self.space = space
        self.matrix = m

    def _coerce(self, other):
        if isinstance(other, QOperator):
            if other.space != self.space:
                raise SpaceMismatchError("operators live on different spaces")
            return other.matrix
        if np.isscalar(other):
            return other * np.eye(self.space.dim)
        return NotImplemented

    def __add__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return m
        return QOperator(self.space, self.matrix + m)

    __radd__ = __add__

    def __sub__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return m
        return QOperator(self.space, self.matrix - m)

    def __rsub__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return m
        return QOperator(self.space, m - self.matrix)

    def __neg__(self):
        return QOperator(self.space, -self.matrix)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return QOperator(self.space, scalar * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return QOperator(self.space, self.matrix / scalar)

    def __matmul__(self, other):
        if isinstance(other, QOperator):
            if other.space != self.space:
                raise SpaceMismatchError("operators live on different spaces")
            return QOperator(self.space, self.matrix @ other.matrix)
        return self.matrix @ other

    def dag(self) -> "QOperator":
        return QOperator(self.space, self.matrix.conj().T)

    def expect(self, rho) -> complex:
        r = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho)
        return complex(np.trace(self.matrix @ r))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def __repr__(self):
        return f"QOperator(dim={self.space.dim})"


@dataclass(frozen=True)
class DensityState:
    """Density matrix with validated Hermiticity, unit trace and positivity."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatchError("density matrix does not match space")
        object.__setattr__(self, "matrix", m)

    def violations(self) -> list[str]:
        m = self.matrix
        out = []
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            out.append("not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            out.append(f"trace {np.trace(m).real:.3e} != 1")
        w = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if w[0] < POSITIVITY_TOL:
            out.append(f"negative eigenvalue {w[0]:.3e}")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def vec(self) -> np.ndarray:
        return self.matrix.reshape(-1, order="F")

    def expect(self, op: QOperator) -> complex:
        return op.expect(self)

    @classmethod
    def from_ket(cls, space: HilbertSpace, ket) -> "DensityState":
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(space, np.outer(ket, ket.conj()))


@dataclass(frozen=True)
class Superoperator:
    """Linear map on column-stacked operators, stored sparse."""

    space: HilbertSpace
    matrix: sp.csr_matrix

    def __post_init__(self):
        n = self.space.dim ** 2
        if self.matrix.shape != (n, n):
            raise SpaceMismatchError("superoperator does not match space")

    def apply(self, rho) -> np.ndarray:
        v = rho.vec() if isinstance(rho, DensityState) else np.asarray(rho)
        if v.ndim == 2:
            v = v.reshape(-1, order="F")
        return self.matrix @ v

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


# ---------------------------------------------------------------------------
# elementary operators

def destroy(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator on Fock levels 0..cutoff-1."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)


def ladder_operators(space: HilbertSpace, subsystem_index: int):
    """Annihilation and creation operators of one bosonic subsystem.

    Returns
    -------
    (QOperator, QOperator)
        ``(a, a_dagger)`` embedded in the full space.
    """
    space._check_index(subsystem_index)
    sub = space.subsystems[subsystem_index]
    if not isinstance(sub, BosonicMode):
        raise TypeError(f"subsystem {subsystem_index} is not a bosonic mode")
    a = space.embed(destroy(sub.cutoff), subsystem_index)
    return a, a.dag()


def sigma_minus(space: HilbertSpace, subsystem_index: int) -> QOperator:
    """|g><e| on a two-level subsystem."""
    space._check_index(subsystem_index)
    if not isinstance(space.subsystems[subsystem_index], TwoLevel):
        raise TypeError(f"subsystem {subsystem_index} is not a two-level system")
    return space.embed(np.array([[0, 1], [0, 0]], dtype=complex), subsystem_index)


def excited_projector(space: HilbertSpace, subsystem_index: int) -> QOperator:
    sm = sigma_minus(space, subsystem_index)
    return sm.dag() @ sm


def displacement_operator(space: HilbertSpace, subsystem_index: int, alpha: complex) -> QOperator:
    """exp(alpha a^dag - alpha^* a) for one mode, computed on the truncated mode.

    Warns with :class:`TruncationWarning` when ``|alpha|^2 >= cutoff / 4``.
    """
    space._check_index(subsystem_index)
    sub = space.subsystems[subsystem_index]
    if not isinstance(sub, BosonicMode):
        raise TypeError(f"subsystem {subsystem_index} is not a bosonic mode")
    if abs(alpha) ** 2 >= sub.cutoff / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} is not small against cutoff {sub.cutoff}",
            TruncationWarning,
            stacklevel=2,
        )
    a = destroy(sub.cutoff)
    local = sla.expm(alpha * a.conj().T - np.conj(alpha) * a)
    return space.embed(local, subsystem_index)


# ---------------------------------------------------------------------------
# Lindblad generator and solvers

def liouvillian(H: QOperator, jumps: Sequence[QOperator] = ()) -> Superoperator:
    """Lindblad generator -i[H, .] + sum_k D[L_k], column-stacking convention."""
    space = H.space
    for L in jumps:
        if L.space != space:
            raise SpaceMismatchError("jump operator lives on a different space")
    d = space.dim
    eye = sp.identity(d, dtype=complex, format="csr")
    h = sp.csr_matrix(H.matrix)
    gen = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for L in jumps:
        l = sp.csr_matrix(L.matrix)
        ldl = (l.conj().T @ l).tocsr()
        gen = gen + sp.kron(l.conj(), l) - 0.5 * sp.kron(eye, ldl) - 0.5 * sp.kron(ldl.T, eye)
    gen = sp.csr_matrix(gen)
    gen.eliminate_zeros()
    return Superoperator(space, gen)


def steady_state(L: Superoperator) -> DensityState:
    """Unique stationary state of a Lindblad generator.

    Solves ``L vec(rho) = 0`` with the first row replaced by the trace
    condition, using a sparse LU factorisation.

    Raises
    ------
    NondegeneracyError
        If the constrained system is singular or numerically so, i.e. the
        generator has more than one stationary state.
    NumericalError
        If the solution is not a physical density matrix.
    """
    d = L.space.dim
    n = d * d
    A = L.matrix.tolil(copy=True)
    trace_row = np.zeros(n, dtype=complex)
    trace_row[:: d + 1] = 1.0
    A[0, :] = trace_row
    A = A.tocsc()
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:  # "Factor is exactly singular"
        raise NondegeneracyError("generator has a degenerate null space") from exc
    inv_norm = spla.onenormest(
        spla.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="H"),
                            dtype=complex)
    )
    cond = inv_norm * spla.norm(A, 1)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise NondegeneracyError(f"steady state is ill-defined (condition ~ {cond:.2e})")
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0
    x = lu.solve(b)
    rho = unvec(x, d)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho)
    residual = np.max(np.abs(L.matrix @ vec(rho)))
    # absolute 1e-9 for generators with entries up to ~1e4, relative beyond
    tol = 1e-9 * max(1.0, spla.norm(L.matrix, np.inf) / 1e4)
    if residual > tol:
        raise NumericalError(f"steady-state residual {residual:.2e} too large")
    state = DensityState(L.space, rho)
    bad = state.violations()
    if bad:
        raise NumericalError("non-physical stationary state: " + ", ".join(bad))
    return state


class Propagator:
    """exp(tau L) applied to vectors, with cached step matrices.

    The exponential of ``L * step`` is formed once per distinct step by
    scaling and squaring (``scipy.linalg.expm``) and then applied repeatedly,
    so a uniform delay grid costs one matrix exponential.
    """

    def __init__(self, L: Superoperator):
        self.L = L
        self._dense = None
        self._cache: dict[float, np.ndarray] = {}

    def _step(self, h: float) -> np.ndarray:
        key = float(h)
        if key not in self._cache:
            if self._dense is None:
                self._dense = self.L.toarray()
            self._cache[key] = sla.expm(self._dense * key)
        return self._cache[key]

    def evolve(self, v, tau: float) -> np.ndarray:
        if tau < 0:
            raise ValueError("tau must be non-negative")
        v = np.asarray(v, dtype=complex)
        if tau == 0:
            return v.copy()
        return self._step(tau) @ v

    def trajectory(self, v, taus) -> np.ndarray:
        """Rows are exp(tau_i L) v for a sorted, non-negative grid."""
        taus = np.asarray(taus, dtype=float)
        if taus.size == 0:
            return np.empty((0, np.size(v)), dtype=complex)
        if np.any(taus < 0) or np.any(np.diff(taus) < 0):
            raise ValueError("tau grid must be sorted and non-negative")
        out = np.empty((taus.size, np.size(v)), dtype=complex)
        cur = self.evolve(v, taus[0])
        out[0] = cur
        steps = np.diff(taus)
        uniform = steps.size and np.allclose(steps, steps[0], rtol=1e-12, atol=0)
        for i, h in enumerate(steps, start=1):
            if h > 0:
                cur = self._step(steps[0] if uniform else h) @ cur
            out[i] = cur
        return out


def propagate(L: Superoperator, rho0, tau: float) -> np.ndarray:
    """exp(tau L) applied to a vectorised operator (or a matrix, which is vectorised)."""
    v = rho0.vec() if isinstance(rho0, DensityState) else np.asarray(rho0)
    if v.ndim == 2:
        v = vec(v)
    return Propagator(L).evolve(v, tau)
