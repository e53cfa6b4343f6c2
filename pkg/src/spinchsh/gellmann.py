"""Generalized Gell-Mann basis and the general correlation matrix T_d.

Basis order is fixed: the symmetric block (E_jk + E_kj for index pairs
j < k in lexicographic order), then the antisymmetric block
(-i (E_jk - E_kj), same pair order), then the diagonal block
sqrt(2 / (l (l + 1))) (sum_{j<=l} E_jj - l E_{l+1,l+1}) for l = 1..d-1.
Every element is Hermitian, traceless and tr[L_i L_j] = 2 delta_ij.

Spin components expand as S_k = sum_i n_k[i] L_i with
n_k[i] = tr[S_k L_i] / 2, so the spin correlation matrix is the
contraction Z_ij = (n_i, T n_j).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from spinchsh.config import DEFAULT_TOLERANCES, Tolerances
from spinchsh.errors import InvalidDimensionError, NumericalInconsistencyError
from spinchsh.qudit import QuantumState, SpinOperators

logger = logging.getLogger(__name__)

BasisKind = Literal["symmetric", "antisymmetric", "diagonal"]
BlochVector = NDArray[np.float64]


@dataclass(frozen=True)
class GellMannBasis:
    """The d^2 - 1 generalized Gell-Mann operators with their block tags."""

    d: int
    lambdas: NDArray[np.complex128] = field(repr=False)  # shape (d^2 - 1, d, d)
    kinds: tuple[BasisKind, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.kinds)

    def block(self, kind: BasisKind) -> NDArray[np.intp]:
        """Indices of the basis elements in one block."""
        return np.array([i for i, k in enumerate(self.kinds) if k == kind], dtype=np.intp)


@dataclass(frozen=True)
class GeneralCorrelationMatrix:
    """T[i, j] = tr[rho (L_i ⊗ L_j)], real (d^2-1) x (d^2-1)."""

    d: int
    t: NDArray[np.float64] = field(repr=False)


def gellmann_basis(d: int) -> GellMannBasis:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    pairs = list(combinations(range(d), 2))
    mats: list[NDArray[np.complex128]] = []
    kinds: list[BasisKind] = []

    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = m[k, j] = 1.0
        mats.append(m)
        kinds.append("symmetric")

    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
        kinds.append("antisymmetric")

    for level in range(1, d):
        diag = np.zeros(d)
        diag[:level] = 1.0
        diag[level] = -level
        mats.append(np.diag(np.sqrt(2.0 / (level * (level + 1))) * diag).astype(np.complex128))
        kinds.append("diagonal")

    lambdas = np.stack(mats)
    lambdas.setflags(write=False)
    return GellMannBasis(d=d, lambdas=lambdas, kinds=tuple(kinds))


def _check_same_dimension(a: int, b: int, what: str) -> None:
    if a != b:
        raise InvalidDimensionError(f"{what}: dimension mismatch ({a} vs {b})")


def bloch_vectors_of_spin(
    ops: SpinOperators, basis: GellMannBasis
) -> tuple[BlochVector, BlochVector, BlochVector]:
    """Coordinates n_k[i] = tr[S_k L_i] / 2 of the three spin components."""
    _check_same_dimension(ops.d, basis.d, "bloch_vectors_of_spin")
    # tr[S L] = sum_ab S[a, b] L[b, a]
    traces = np.einsum("kab,iba->ki", ops.stacked, basis.lambdas)
    n = 0.5 * traces.real
    return n[0], n[1], n[2]


def general_correlation_matrix(
    state: QuantumState, basis: GellMannBasis, tol: Tolerances = DEFAULT_TOLERANCES
) -> GeneralCorrelationMatrix:
    _check_same_dimension(state.d, basis.d, "general_correlation_matrix")
    L = basis.lambdas
    # tr[rho (A ⊗ B)] = sum rho[m, k, m', k'] A[m', m] B[k', k]
    t = np.einsum("akbl,iba,jlk->ij", state.tensor4, L, L, optimize=True)
    residue = float(np.max(np.abs(t.imag))) if t.size else 0.0
    if residue > tol.t_imag:
        raise NumericalInconsistencyError("general correlation matrix", residue, tol.t_imag)
    logger.debug("T_d built for d=%d (imaginary residue %.2e)", state.d, residue)
    return GeneralCorrelationMatrix(d=state.d, t=np.ascontiguousarray(t.real))


def zs_via_theorem2(
    t: GeneralCorrelationMatrix, n1: BlochVector, n2: BlochVector, n3: BlochVector
) -> NDArray[np.float64]:
    """Z[i, j] = (n_i, T n_j) over R^{d^2 - 1}."""
    n = np.stack([n1, n2, n3])
    if n.shape[1] != t.t.shape[0]:
        raise InvalidDimensionError(
            f"Bloch vectors of length {n.shape[1]} do not match T of size {t.t.shape[0]}"
        )
    return n @ t.t @ n.T
