"""Spin operators, two-qudit states and their coefficient view.

Matrices are dense ``complex128`` numpy arrays. The computational basis
|1>, ..., |d> is stored 0-based: basis label m lives at index m - 1, and
every formula below is written with that shift applied explicitly.

A two-qudit density matrix is a d^2 x d^2 array indexed by the composite
label (m, k) -> m * d + k. Reshaping it to (d, d, d, d) gives
``rho[m, k, m', k'] = <mk|rho|m'k'>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from spinchsh.config import DEFAULT_TOLERANCES, Tolerances
from spinchsh.errors import (
    DegenerateStateError,
    InvalidDimensionError,
    InvalidDirectionError,
    InvalidStateError,
)

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]
UnitVector3 = NDArray[np.float64]


# ---------------------------------------------------------------------------
# Matrix predicates
# ---------------------------------------------------------------------------


def is_hermitian(a: ComplexMatrix, atol: float = DEFAULT_TOLERANCES.hermitian) -> bool:
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(
        scipy.linalg.ishermitian(a, atol=atol)
    )


def is_unit_trace(a: ComplexMatrix, atol: float = DEFAULT_TOLERANCES.unit_trace) -> bool:
    return abs(np.trace(a) - 1.0) <= atol


def is_positive_semidefinite(
    a: ComplexMatrix, floor: float = DEFAULT_TOLERANCES.psd_floor
) -> bool:
    """Smallest eigenvalue of the Hermitian part is at least ``floor``."""
    herm = 0.5 * (a + a.conj().T)
    return bool(np.linalg.eigvalsh(herm)[0] >= floor)


def tensor(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Kronecker product ``a ⊗ b``."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def as_unit_vector(r: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES) -> UnitVector3:
    """Validate a direction in R^3 and return it as a float64 array."""
    vec = np.asarray(r, dtype=np.float64).reshape(-1)
    if vec.shape != (3,):
        raise InvalidDirectionError(f"direction must have 3 components, got {vec.shape[0]}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol.unit_norm:
        raise InvalidDirectionError(f"direction norm {norm!r} is not 1 within {tol.unit_norm}")
    return vec


def _check_dimension(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")


# ---------------------------------------------------------------------------
# Spin operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpinOperators:
    """Spin components S1, S2, S3 on C^d, d = 2s + 1 (hbar = 1)."""

    d: int
    s1: ComplexMatrix = field(repr=False)
    s2: ComplexMatrix = field(repr=False)
    s3: ComplexMatrix = field(repr=False)

    @property
    def s(self) -> float:
        return (self.d - 1) / 2

    @property
    def stacked(self) -> NDArray[np.complex128]:
        """The three components as one (3, d, d) array."""
        return np.stack([self.s1, self.s2, self.s3])


def make_spin_components(d: int) -> SpinOperators:
    """Build S1, S2, S3 in the computational basis.

    With c_m = sqrt(m (d - m)) for basis labels m = 1..d-1:
    S1 = 1/2 sum c_m (|m><m+1| + |m+1><m|),
    S2 = 1/(2i) sum c_m (|m><m+1| - |m+1><m|),
    S3 = 1/2 sum (d + 1 - 2m) |m><m|.
    """
    _check_dimension(d)
    d = int(d)
    labels = np.arange(1, d)  # m = 1..d-1
    c = np.sqrt(labels * (d - labels))
    upper = np.diag(c, k=1).astype(np.complex128)  # |m><m+1| at [m-1, m]
    lower = upper.T.copy()
    s1 = 0.5 * (upper + lower)
    s2 = (upper - lower) / 2j
    s3 = np.diag(0.5 * (d + 1 - 2 * np.arange(1, d + 1))).astype(np.complex128)
    for op in (s1, s2, s3):
        op.setflags(write=False)
    return SpinOperators(d=d, s1=s1, s2=s2, s3=s3)


def spin_projection(
    ops: SpinOperators, r: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES
) -> ComplexMatrix:
    """Return r·S for a unit direction r."""
    vec = as_unit_vector(r, tol)
    return np.tensordot(vec, ops.stacked, axes=1)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuantumState:
    """Two-qudit density operator on C^d ⊗ C^d."""

    d: int
    rho: ComplexMatrix = field(repr=False)
    label: str | None = None

    def __post_init__(self) -> None:
        _check_dimension(self.d)
        self.rho.setflags(write=False)

    @property
    def s(self) -> float:
        return (self.d - 1) / 2

    @property
    def tensor4(self) -> NDArray[np.complex128]:
        """rho reshaped to [m, k, m', k'] = <mk|rho|m'k'>."""
        return self.rho.reshape(self.d, self.d, self.d, self.d)


def validate_density_matrix(
    rho: ComplexMatrix, d: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> None:
    """Raise InvalidStateError naming the first violated invariant."""
    _check_dimension(d)
    if rho.shape != (d * d, d * d):
        raise InvalidStateError(
            "shape", f"expected {(d * d, d * d)} for d={d}, got {rho.shape}"
        )
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("finite", "matrix contains non-finite entries")
    if not is_hermitian(rho, tol.hermitian):
        raise InvalidStateError("hermitian", "density matrix is not Hermitian")
    if not is_unit_trace(rho, tol.unit_trace):
        raise InvalidStateError("unit-trace", f"trace is {complex(np.trace(rho))!r}")
    if not is_positive_semidefinite(rho, tol.psd_floor):
        lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        raise InvalidStateError(
            "positive-semidefinite", f"smallest eigenvalue {lowest:.3e} below {tol.psd_floor}"
        )


def density_state(
    rho: ArrayLike,
    d: int,
    label: str | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> QuantumState:
    """Validate a density matrix and wrap it as a QuantumState."""
    matrix = np.array(rho, dtype=np.complex128)
    validate_density_matrix(matrix, d, tol)
    return QuantumState(d=int(d), rho=matrix, label=label)


def pure_state(coeffs: ArrayLike, d: int, label: str | None = None) -> QuantumState:
    """|psi><psi| for psi = sum eta_{mk} |m>⊗|k>, normalized.

    ``coeffs`` holds eta in composite order (m, k) -> m * d + k.
    """
    _check_dimension(d)
    psi = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    if psi.shape != (d * d,):
        raise InvalidDimensionError(f"expected {d * d} coefficients for d={d}, got {psi.size}")
    norm = float(np.linalg.norm(psi))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateStateError("state vector has zero norm")
    psi = psi / norm
    return QuantumState(d=int(d), rho=np.outer(psi, psi.conj()), label=label)


def maximally_mixed_state(d: int) -> QuantumState:
    _check_dimension(d)
    return QuantumState(
        d=int(d), rho=np.eye(d * d, dtype=np.complex128) / (d * d), label="maximally-mixed"
    )


def swap_operator(d: int) -> ComplexMatrix:
    """V_d with V(|m>⊗|k>) = |k>⊗|m>."""
    _check_dimension(d)
    v = np.zeros((d * d, d * d), dtype=np.complex128)
    for m in range(d):
        for k in range(d):
            v[k * d + m, m * d + k] = 1.0
    return v


def is_permutation_invariant(
    state: QuantumState, atol: float = DEFAULT_TOLERANCES.hermitian
) -> bool:
    v = swap_operator(state.d)
    return bool(np.allclose(v @ state.rho @ v, state.rho, atol=atol, rtol=0.0))


def purity(state: QuantumState) -> float:
    return float(np.real(np.trace(state.rho @ state.rho)))


def partial_trace(state: QuantumState, keep: int = 0) -> ComplexMatrix:
    """Reduced state of site ``keep`` (0 for the first factor, 1 for the second)."""
    if keep not in (0, 1):
        raise ValueError(f"keep must be 0 or 1, got {keep!r}")
    r = state.tensor4
    if keep == 0:
        return np.einsum("akbk->ab", r)
    return np.einsum("kakb->ab", r)


# ---------------------------------------------------------------------------
# Coefficient view
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateCoefficients:
    """zeta[m, m', k, k'] = <mk|rho|m'k'> (0-based labels).

    Satisfies conj(zeta[m, m', k, k']) = zeta[m', m, k', k] and
    sum_{m,k} zeta[m, m, k, k] = 1.
    """

    d: int
    zeta: NDArray[np.complex128] = field(repr=False)


def state_coefficients(state: QuantumState) -> StateCoefficients:
    # rho4[m, k, m', k'] -> zeta[m, m', k, k']
    zeta = np.ascontiguousarray(state.tensor4.transpose(0, 2, 1, 3))
    zeta.setflags(write=False)
    return StateCoefficients(d=state.d, zeta=zeta)


def reconstruct_density(coefficients: StateCoefficients) -> ComplexMatrix:
    """rho = sum zeta[m, m', k, k'] |mk><m'k'|."""
    d = coefficients.d
    return coefficients.zeta.transpose(0, 2, 1, 3).reshape(d * d, d * d).copy()
