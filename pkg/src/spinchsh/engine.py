"""Spin-s correlation matrix, maximal CHSH value and optimal settings.

For spin observables S_a = a·S and S_b = b·S every correlation is a
bilinear form, tr[rho (S_a ⊗ S_b)] = (a, Z b), with the real 3x3 matrix
Z[i, j] = tr[rho (S_i ⊗ S_j)]. The CHSH expectation is

    (a1, Z (b1 + b2)) + (a2, Z (b1 - b2))

and its maximum over unit directions is 2 sqrt(z1^2 + z2^2), z1 >= z2 the
two largest singular values of Z. The normalized parameter
gamma = max / (2 s^2) exceeds 1 exactly when the local bound is violated.

Z can be computed three ways (see :class:`Route`); all three agree to
rounding and are cross-checked by the verification suite.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from spinchsh.config import DEFAULT_TOLERANCES, Tolerances
from spinchsh.errors import (
    InvalidDimensionError,
    InvalidDirectionError,
    NumericalInconsistencyError,
)
from spinchsh.gellmann import (
    bloch_vectors_of_spin,
    gellmann_basis,
    general_correlation_matrix,
    zs_via_theorem2,
)
from spinchsh.qudit import (
    ComplexMatrix,
    QuantumState,
    SpinOperators,
    StateCoefficients,
    UnitVector3,
    as_unit_vector,
    make_spin_components,
    spin_projection,
    state_coefficients,
    tensor,
)
from spinchsh.telemetry import traced

logger = logging.getLogger(__name__)

_AXES = np.eye(3)


class Route(str, Enum):
    """How a CHSH value was obtained."""

    DEFINITION = "definition"
    ELEMENT_FORMULAS = "element-formulas"
    THEOREM2 = "theorem2"
    CLOSED_FORM = "closed-form"
    ORACLE = "oracle"


# ---------------------------------------------------------------------------
# Correlation matrix
# ---------------------------------------------------------------------------


def _sign_canonical(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    """Flip each column so its first non-negligible component is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nonzero = np.flatnonzero(np.abs(col) > 1e-12)
        if nonzero.size and col[nonzero[0]] < 0:
            out[:, j] = -col
    return out


@dataclass(frozen=True)
class SpinCorrelationMatrix:
    """Z with its singular values (descending) and right singular vectors.

    ``right_vectors[:, i]`` is the unit eigenvector of Z^T Z belonging to
    ``singular_values[i]``.
    """

    d: int
    z: NDArray[np.float64] = field(repr=False)
    singular_values: NDArray[np.float64]
    right_vectors: NDArray[np.float64] = field(repr=False)

    @property
    def s(self) -> float:
        return (self.d - 1) / 2

    @classmethod
    def from_matrix(cls, z: ArrayLike, d: int) -> SpinCorrelationMatrix:
        """Wrap a real 3x3 matrix; singular values come from eigh(Z^T Z)."""
        zmat = np.array(z, dtype=np.float64)
        if zmat.shape != (3, 3):
            raise ValueError(f"correlation matrix must be 3x3, got {zmat.shape}")
        if d < 2:
            raise InvalidDimensionError(f"dimension must be >= 2, got {d}")
        gram = zmat.T @ zmat
        evals, evecs = np.linalg.eigh(0.5 * (gram + gram.T))
        order = np.argsort(evals, kind="stable")[::-1]
        evals = np.clip(evals[order], 0.0, None)
        evecs = _sign_canonical(evecs[:, order])
        zmat.setflags(write=False)
        return cls(d=int(d), z=zmat, singular_values=np.sqrt(evals), right_vectors=evecs)


def _check_dims(state: QuantumState, ops: SpinOperators) -> None:
    if state.d != ops.d:
        raise InvalidDimensionError(f"state has d={state.d} but operators have d={ops.d}")


def _real_or_raise(z: NDArray[np.complex128], threshold: float) -> NDArray[np.float64]:
    residue = float(np.max(np.abs(z.imag)))
    if residue > threshold:
        raise NumericalInconsistencyError("spin correlation matrix", residue, threshold)
    return np.ascontiguousarray(z.real)


def spin_correlation_matrix(
    state: QuantumState, ops: SpinOperators | None = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> SpinCorrelationMatrix:
    """Z[i, j] = tr[rho (S_i ⊗ S_j)] straight from the definition."""
    ops = ops or make_spin_components(state.d)
    _check_dims(state, ops)
    S = ops.stacked
    z = np.einsum("akbl,iba,jlk->ij", state.tensor4, S, S, optimize=True)
    return SpinCorrelationMatrix.from_matrix(_real_or_raise(z, tol.z_imag), state.d)


def spin_correlation_from_coefficients(zeta: StateCoefficients) -> SpinCorrelationMatrix:
    """Z from the explicit sums over the coefficients zeta.

    With 0-based labels, c_m = sqrt((m + 1)(d - m - 1)) for m < d - 1 and
    h_m = (d - 1 - 2m) / 2, the spin matrix elements are
    <m+1|S1|m> = <m|S1|m+1> = c_m / 2, <m+1|S2|m> = i c_m / 2,
    <m|S2|m+1> = -i c_m / 2 and <m|S3|m> = h_m. Writing
    U = zeta[m, m+1, k, k+1], X = zeta[m, m+1, k+1, k] and
    Y = zeta[m+1, m, k, k+1]:

      Z11 =  1/2 sum c_m c_k Re[U + X]     Z12 = -1/2 sum c_m c_k Im[U + Y]
      Z21 = -1/2 sum c_m c_k Im[U + X]     Z22 =  1/2 sum c_m c_k Re[X - U]
      Z13 =  sum c_m h_k Re zeta[m+1, m, k, k]
      Z23 = -sum c_m h_k Im zeta[m, m+1, k, k]
      Z31 =  sum h_m c_k Re zeta[m, m, k+1, k]
      Z32 = -sum h_m c_k Im zeta[m, m, k, k+1]
      Z33 =  sum h_m h_k Re zeta[m, m, k, k]
    """
    d = zeta.d
    zt = zeta.zeta
    lo = np.arange(d - 1)
    full = np.arange(d)
    c = np.sqrt((lo + 1.0) * (d - lo - 1.0))
    h = (d - 1 - 2.0 * full) / 2.0

    m, k = lo[:, None], lo[None, :]
    U = zt[m, m + 1, k, k + 1]
    X = zt[m, m + 1, k + 1, k]
    Y = zt[m + 1, m, k, k + 1]
    cc = np.outer(c, c)

    mf, kf = full[:, None], full[None, :]
    z = np.empty((3, 3))
    z[0, 0] = 0.5 * np.sum(cc * (U + X).real)
    z[0, 1] = -0.5 * np.sum(cc * (U + Y).imag)
    z[1, 0] = -0.5 * np.sum(cc * (U + X).imag)
    z[1, 1] = 0.5 * np.sum(cc * (X - U).real)
    z[0, 2] = np.sum(np.outer(c, h) * zt[m + 1, m, kf, kf].real)
    z[1, 2] = -np.sum(np.outer(c, h) * zt[m, m + 1, kf, kf].imag)
    z[2, 0] = np.sum(np.outer(h, c) * zt[mf, mf, k + 1, k].real)
    z[2, 1] = -np.sum(np.outer(h, c) * zt[mf, mf, k, k + 1].imag)
    z[2, 2] = np.sum(np.outer(h, h) * zt[mf, mf, kf, kf].real)
    return SpinCorrelationMatrix.from_matrix(z, d)


def spin_correlation_via_basis(
    state: QuantumState, ops: SpinOperators | None = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> SpinCorrelationMatrix:
    """Z as the contraction of T_d with the spin Bloch vectors."""
    ops = ops or make_spin_components(state.d)
    _check_dims(state, ops)
    basis = gellmann_basis(state.d)
    t = general_correlation_matrix(state, basis, tol)
    n1, n2, n3 = bloch_vectors_of_spin(ops, basis)
    return SpinCorrelationMatrix.from_matrix(zs_via_theorem2(t, n1, n2, n3), state.d)


def correlation_by_route(
    state: QuantumState,
    route: Route = Route.DEFINITION,
    ops: SpinOperators | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SpinCorrelationMatrix:
    route = Route(route)
    if route is Route.DEFINITION:
        return spin_correlation_matrix(state, ops, tol)
    if route is Route.ELEMENT_FORMULAS:
        return spin_correlation_from_coefficients(state_coefficients(state))
    if route is Route.THEOREM2:
        return spin_correlation_via_basis(state, ops, tol)
    raise ValueError(f"route {route.value!r} does not compute a correlation matrix")


# ---------------------------------------------------------------------------
# Maximal value
# ---------------------------------------------------------------------------


def max_chsh(zmat: SpinCorrelationMatrix) -> tuple[float, float, float]:
    """(2 sqrt(z1^2 + z2^2), z1, z2) from the two largest singular values."""
    z1, z2 = float(zmat.singular_values[0]), float(zmat.singular_values[1])
    return 2.0 * math.hypot(z1, z2), z1, z2


def chsh_parameter(zmat: SpinCorrelationMatrix) -> float:
    """gamma_s = sqrt(z1^2 + z2^2) / s^2."""
    z1, z2 = zmat.singular_values[0], zmat.singular_values[1]
    return math.hypot(float(z1), float(z2)) / zmat.s**2


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------


def _orthogonal_unit(v: NDArray[np.float64]) -> NDArray[np.float64]:
    """Some unit vector orthogonal to unit v."""
    axis = _AXES[int(np.argmin(np.abs(v)))]
    w = np.cross(v, axis)
    return w / np.linalg.norm(w)


def _normalize_or(
    v: NDArray[np.float64], fallback: NDArray[np.float64], floor: float
) -> tuple[NDArray[np.float64], bool]:
    norm = float(np.linalg.norm(v))
    if norm < floor:
        return fallback.copy(), True
    return v / norm, False


@dataclass(frozen=True)
class MeasurementSettings:
    """Alice's a1, a2 and Bob's b1, b2 with the frame (r1, r2, theta').

    b1 = r1 cos(theta') + r2 sin(theta'), b2 = r1 cos(theta') - r2 sin(theta').
    ``degenerate`` marks settings where some a-direction was arbitrary
    because Z (b1 ± b2) vanished.
    """

    a1: UnitVector3
    a2: UnitVector3
    b1: UnitVector3
    b2: UnitVector3
    theta_prime: float
    r1: UnitVector3
    r2: UnitVector3
    degenerate: bool = False

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "b1", "b2", "r1", "r2"):
            as_unit_vector(getattr(self, name))
        if abs(float(np.dot(self.r1, self.r2))) > DEFAULT_TOLERANCES.unit_norm:
            raise InvalidDirectionError("frame vectors r1, r2 are not orthogonal")
        if not -1e-12 <= self.theta_prime <= math.pi / 2 + 1e-12:
            raise InvalidDirectionError(f"theta' = {self.theta_prime} outside [0, pi/2]")

    @classmethod
    def from_frame(
        cls,
        r1: ArrayLike,
        r2: ArrayLike,
        theta_prime: float,
        zmat: SpinCorrelationMatrix,
        tol: Tolerances = DEFAULT_TOLERANCES,
    ) -> MeasurementSettings:
        """Bob's directions from the frame, Alice's as the best responses to them."""
        u1 = np.asarray(r1, dtype=np.float64)
        u2 = np.asarray(r2, dtype=np.float64)
        cos_t, sin_t = math.cos(theta_prime), math.sin(theta_prime)
        b1 = cos_t * u1 + sin_t * u2
        b2 = cos_t * u1 - sin_t * u2
        b1 /= np.linalg.norm(b1)
        b2 /= np.linalg.norm(b2)
        a1, deg1 = _normalize_or(zmat.z @ (b1 + b2), _AXES[0], tol.degenerate_norm)
        a2, deg2 = _normalize_or(zmat.z @ (b1 - b2), _AXES[1], tol.degenerate_norm)
        return cls(
            a1=a1, a2=a2, b1=b1, b2=b2, theta_prime=float(theta_prime),
            r1=u1, r2=u2, degenerate=deg1 or deg2,
        )

    @classmethod
    def from_directions(
        cls, a1: ArrayLike, a2: ArrayLike, b1: ArrayLike, b2: ArrayLike
    ) -> MeasurementSettings:
        """Recover (r1, r2, theta') from arbitrary unit directions.

        b1 + b2 = 2 cos(theta') r1 and b1 - b2 = 2 sin(theta') r2, which are
        orthogonal whenever |b1| = |b2|.
        """
        va1, va2 = as_unit_vector(a1), as_unit_vector(a2)
        vb1, vb2 = as_unit_vector(b1), as_unit_vector(b2)
        plus, minus = vb1 + vb2, vb1 - vb2
        n_plus, n_minus = float(np.linalg.norm(plus)), float(np.linalg.norm(minus))
        theta = math.atan2(n_minus, n_plus)
        if n_plus > 1e-9 and n_minus > 1e-9:
            r1 = plus / n_plus
            r2 = minus - np.dot(minus, r1) * r1
            r2 /= np.linalg.norm(r2)
        elif n_plus > 1e-9:
            r1 = plus / n_plus
            r2 = _orthogonal_unit(r1)
        else:
            r2 = minus / n_minus
            r1 = _orthogonal_unit(r2)
        return cls(a1=va1, a2=va2, b1=vb1, b2=vb2, theta_prime=theta, r1=r1, r2=r2)

    def as_dict(self) -> dict[str, list[float] | float | bool]:
        return {
            "a1": self.a1.tolist(),
            "a2": self.a2.tolist(),
            "b1": self.b1.tolist(),
            "b2": self.b2.tolist(),
            "theta_prime": self.theta_prime,
            "r1": self.r1.tolist(),
            "r2": self.r2.tolist(),
            "degenerate": self.degenerate,
        }


def optimal_settings(
    zmat: SpinCorrelationMatrix, tol: Tolerances = DEFAULT_TOLERANCES
) -> MeasurementSettings:
    """Settings attaining 2 sqrt(z1^2 + z2^2).

    r1, r2 are the right singular vectors of the two largest singular
    values, tan(theta') = |Z r2| / |Z r1|, and a1, a2 are the normalized
    images Z (b1 + b2), Z (b1 - b2).
    """
    r1 = zmat.right_vectors[:, 0]
    r2 = zmat.right_vectors[:, 1]
    n1 = float(np.linalg.norm(zmat.z @ r1))
    n2 = float(np.linalg.norm(zmat.z @ r2))
    if n1 < tol.degenerate_norm:
        theta = math.pi / 2
    elif n2 < tol.degenerate_norm:
        theta = 0.0
    else:
        theta = math.atan2(n2, n1)
    settings = MeasurementSettings.from_frame(r1, r2, theta, zmat, tol)
    if settings.degenerate:
        logger.debug("Degenerate optimal settings for d=%d (singular values %s)",
                     zmat.d, zmat.singular_values)
    return settings


# ---------------------------------------------------------------------------
# CHSH operator and expectation
# ---------------------------------------------------------------------------


def chsh_operator(ops: SpinOperators, settings: MeasurementSettings) -> ComplexMatrix:
    """S_a1 ⊗ (S_b1 + S_b2) + S_a2 ⊗ (S_b1 - S_b2)."""
    sa1 = spin_projection(ops, settings.a1)
    sa2 = spin_projection(ops, settings.a2)
    sb1 = spin_projection(ops, settings.b1)
    sb2 = spin_projection(ops, settings.b2)
    return tensor(sa1, sb1 + sb2) + tensor(sa2, sb1 - sb2)


def bilinear_chsh(zmat: SpinCorrelationMatrix, settings: MeasurementSettings) -> float:
    z = zmat.z
    return float(
        settings.a1 @ z @ (settings.b1 + settings.b2)
        + settings.a2 @ z @ (settings.b1 - settings.b2)
    )


def chsh_expectation(
    state: QuantumState,
    ops: SpinOperators,
    settings: MeasurementSettings,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """(a1, Z (b1 + b2)) + (a2, Z (b1 - b2))."""
    return bilinear_chsh(spin_correlation_matrix(state, ops, tol), settings)


def chsh_expectation_trace(
    state: QuantumState, ops: SpinOperators, settings: MeasurementSettings
) -> float:
    """tr[rho B_chsh], computed on the full d^2-dimensional space."""
    _check_dims(state, ops)
    return float(np.real(np.trace(state.rho @ chsh_operator(ops, settings))))


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChshReport:
    """Outcome of the maximization for one state."""

    d: int
    max_chsh: float
    gamma: float
    settings: MeasurementSettings
    route: Route
    violates_lhv: bool
    degenerate: bool
    singular_values: NDArray[np.float64] = field(repr=False)
    z: NDArray[np.float64] = field(repr=False)

    @property
    def s(self) -> float:
        return (self.d - 1) / 2


def report_from_correlation(
    zmat: SpinCorrelationMatrix, route: Route, tol: Tolerances = DEFAULT_TOLERANCES
) -> ChshReport:
    value, _, _ = max_chsh(zmat)
    gamma = value / (2.0 * zmat.s**2)
    settings = optimal_settings(zmat, tol)
    return ChshReport(
        d=zmat.d,
        max_chsh=value,
        gamma=gamma,
        settings=settings,
        route=Route(route),
        violates_lhv=bool(gamma > 1.0),
        degenerate=settings.degenerate,
        singular_values=zmat.singular_values,
        z=zmat.z,
    )


@traced("analyze_state")
def analyze_state(
    state: QuantumState,
    route: Route = Route.DEFINITION,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ChshReport:
    """State -> Z (by ``route``) -> singular values -> max CHSH, gamma, settings."""
    zmat = correlation_by_route(state, route, tol=tol)
    report = report_from_correlation(zmat, route, tol)
    logger.debug(
        "d=%d route=%s max_chsh=%.12g gamma=%.12g", state.d, Route(route).value,
        report.max_chsh, report.gamma,
    )
    return report
