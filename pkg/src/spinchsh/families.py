"""Named two-qudit state families and their closed-form CHSH values.

The closed forms serve as analytic ground truth for the engine: for every
family here, building the state and running the full pipeline must land on
the same Z and gamma.

Families:
  - GHZ            (1/sqrt(d)) sum |mm>
  - Schmidt        sum sqrt(mu_m) |mm>
  - two-term       (|kk> + |nn>) / sqrt(2), n > k + 1
  - product        |nn>
  - Werner         ((d - phi) I + (d phi - 1) V) / (d (d^2 - 1)), phi in [-1, 1]
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from spinchsh.config import DEFAULT_TOLERANCES, Tolerances
from spinchsh.errors import InvalidDimensionError, NotPureError, PreconditionError
from spinchsh.gellmann import gellmann_basis, general_correlation_matrix
from spinchsh.qudit import (
    QuantumState,
    partial_trace,
    pure_state,
    purity,
    swap_operator,
)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
FAMILIES = ("ghz", "schmidt", "two-term", "product", "werner")


def _check_dimension(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")


def _spin(d: int) -> float:
    return (d - 1) / 2


def _gamma_from_singular(values: Sequence[float], s: float) -> float:
    top = sorted((abs(v) for v in values), reverse=True)
    return math.hypot(top[0], top[1]) / s**2


# ---------------------------------------------------------------------------
# GHZ
# ---------------------------------------------------------------------------


def ghz_state(d: int) -> QuantumState:
    _check_dimension(d)
    coeffs = np.zeros(d * d, dtype=np.complex128)
    coeffs[[m * d + m for m in range(d)]] = 1.0
    return pure_state(coeffs, d, label=f"ghz(d={d})")


def ghz_closed_form(d: int) -> tuple[NDArray[np.float64], float]:
    """Z = ((d^2 - 1) / 12) diag(1, -1, 1), gamma = (sqrt(2)/3)(d + 1)/(d - 1)."""
    _check_dimension(d)
    z = (d * d - 1) / 12.0 * np.diag([1.0, -1.0, 1.0])
    return z, SQRT2 / 3.0 * (d + 1) / (d - 1)


# ---------------------------------------------------------------------------
# Schmidt-diagonal pure states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Probabilities mu_1..mu_d of a Schmidt-diagonal state sum sqrt(mu_m)|mm>."""

    mu: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.mu) < 2:
            raise PreconditionError("a Schmidt spectrum needs at least 2 entries")
        if any(not math.isfinite(p) or p < 0 for p in self.mu):
            raise PreconditionError(f"Schmidt coefficients must be nonnegative: {self.mu}")
        total = math.fsum(self.mu)
        if abs(total - 1.0) > 1e-12:
            raise PreconditionError(f"Schmidt coefficients sum to {total!r}, not 1")

    @classmethod
    def of(cls, mu: ArrayLike) -> SchmidtSpectrum:
        return cls(tuple(float(p) for p in np.asarray(mu, dtype=np.float64).reshape(-1)))

    @property
    def d(self) -> int:
        return len(self.mu)


def schmidt_state(mu: SchmidtSpectrum) -> QuantumState:
    d = mu.d
    coeffs = np.zeros(d * d, dtype=np.complex128)
    for m, p in enumerate(mu.mu):
        coeffs[m * d + m] = math.sqrt(p)
    return pure_state(coeffs, d, label=f"schmidt(d={d})")


def schmidt_closed_form(
    mu: SchmidtSpectrum, d: int | None = None
) -> tuple[float, float, float, float]:
    """(Z11, Z22, Z33, gamma) for a Schmidt-diagonal state.

    Z11 = -Z22 = sum_{k=1}^{2s} k (s - (k-1)/2) sqrt(mu_k mu_{k+1}) and
    Z33 = sum_{k=1}^{2s+1} (s - (k-1))^2 mu_k; off-diagonal entries vanish.
    """
    if d is not None and d != mu.d:
        raise InvalidDimensionError(f"spectrum has {mu.d} entries but d={d}")
    d = mu.d
    s = _spin(d)
    p = mu.mu
    z11 = math.fsum(
        k * (s - (k - 1) / 2) * math.sqrt(p[k - 1] * p[k]) for k in range(1, d)
    )
    z33 = math.fsum((s - (k - 1)) ** 2 * p[k - 1] for k in range(1, d + 1))
    return z11, -z11, z33, _gamma_from_singular((z11, z11, z33), s)


def schmidt_spectrum_for_concurrence(c: float) -> SchmidtSpectrum:
    """Two-qubit spectrum (mu1, mu2) with concurrence 2 sqrt(mu1 mu2) = c."""
    if not 0.0 <= c <= 1.0:
        raise PreconditionError(f"two-qubit concurrence must lie in [0, 1], got {c}")
    root = math.sqrt(1.0 - c * c)
    mu1 = (1.0 + root) / 2.0
    return SchmidtSpectrum((mu1, 1.0 - mu1))


def _check_level(n: int, d: int, name: str) -> None:
    if not 1 <= n <= d:
        raise PreconditionError(f"{name}={n} outside 1..{d}")


def _check_two_term(k: int, n: int, d: int) -> None:
    _check_dimension(d)
    _check_level(k, d, "k")
    _check_level(n, d, "n")
    if n <= k + 1:
        raise PreconditionError(f"two-term family requires n > k + 1, got k={k}, n={n}")


def two_term_state(k: int, n: int, d: int) -> QuantumState:
    """(|kk> + |nn>) / sqrt(2) with 1-based labels."""
    _check_two_term(k, n, d)
    coeffs = np.zeros(d * d, dtype=np.complex128)
    coeffs[(k - 1) * d + (k - 1)] = 1.0
    coeffs[(n - 1) * d + (n - 1)] = 1.0
    return pure_state(coeffs, d, label=f"two-term(k={k},n={n},d={d})")


def two_term_closed_form(k: int, n: int, d: int) -> float:
    """gamma = ((s - (k-1))^2 + (s - (n-1))^2) / (2 s^2)."""
    _check_two_term(k, n, d)
    s = _spin(d)
    return ((s - (k - 1)) ** 2 + (s - (n - 1)) ** 2) / (2 * s * s)


def product_state(n: int, d: int) -> QuantumState:
    """|nn> with a 1-based label n."""
    _check_dimension(d)
    _check_level(n, d, "n")
    coeffs = np.zeros(d * d, dtype=np.complex128)
    coeffs[(n - 1) * d + (n - 1)] = 1.0
    return pure_state(coeffs, d, label=f"product(n={n},d={d})")


def product_state_closed_form(n: int, d: int) -> float:
    """gamma = (1 - (n - 1)/s)^2."""
    _check_dimension(d)
    _check_level(n, d, "n")
    return (1.0 - (n - 1) / _spin(d)) ** 2


# ---------------------------------------------------------------------------
# Werner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WernerParameter:
    """Werner parameter phi = tr[rho V] in [-1, 1]."""

    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.phi) and -1.0 <= self.phi <= 1.0):
            raise PreconditionError(f"Werner parameter must lie in [-1, 1], got {self.phi}")

    @property
    def is_separable(self) -> bool:
        return self.phi >= 0.0


def lhv_projective_range(d: int) -> tuple[float, float]:
    """Nonseparable phi interval [-1 + (d+1)/d^2, 0) known to admit an LHV
    model under projective measurements. Reported as metadata only."""
    _check_dimension(d)
    return -1.0 + (d + 1) / (d * d), 0.0


def werner_violation_threshold() -> float:
    """For d = 2, gamma > 1 exactly when phi < 1/2 - (3/4) sqrt(2)."""
    return 0.5 - 0.75 * SQRT2


def _werner_parameter(phi: float | WernerParameter) -> WernerParameter:
    return phi if isinstance(phi, WernerParameter) else WernerParameter(float(phi))


def werner_state(d: int, phi: float | WernerParameter) -> QuantumState:
    _check_dimension(d)
    param = _werner_parameter(phi)
    norm = d * (d * d - 1)
    rho = (d - param.phi) / norm * np.eye(d * d, dtype=np.complex128) + (
        d * param.phi - 1
    ) / norm * swap_operator(d)
    return QuantumState(d=int(d), rho=rho, label=f"werner(d={d},phi={param.phi!r})")


def werner_closed_form(
    d: int, phi: float | WernerParameter
) -> tuple[NDArray[np.float64], float]:
    """Z = ((d phi - 1)/12) I, gamma = (sqrt(2)/3) |d phi - 1| / (d - 1)^2."""
    _check_dimension(d)
    param = _werner_parameter(phi)
    x = d * param.phi - 1
    return x / 12.0 * np.eye(3), SQRT2 / 3.0 * abs(x) / (d - 1) ** 2


# ---------------------------------------------------------------------------
# Entanglement and two-qubit quantities
# ---------------------------------------------------------------------------


def concurrence_pure(state: QuantumState, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """C = sqrt(2 (1 - tr[rho_A^2])) for a pure state."""
    p = purity(state)
    if abs(p - 1.0) > tol.purity:
        raise NotPureError(f"state purity {p!r} differs from 1 by more than {tol.purity}")
    reduced = partial_trace(state, keep=0)
    local_purity = float(np.real(np.trace(reduced @ reduced)))
    return math.sqrt(max(0.0, 2.0 * (1.0 - local_purity)))


def horodecki_parameter(state: QuantumState, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """sqrt(tau1^2 + tau2^2) from the two largest singular values of T_2."""
    if state.d != 2:
        raise InvalidDimensionError(f"Horodecki parameter is defined for d=2, got d={state.d}")
    t = general_correlation_matrix(state, gellmann_basis(2), tol).t
    tau = np.linalg.svd(t, compute_uv=False)
    return math.hypot(float(tau[0]), float(tau[1]))


# ---------------------------------------------------------------------------
# Random states
# ---------------------------------------------------------------------------


def random_pure_state(d: int, rng: np.random.Generator) -> QuantumState:
    """Normalized complex-normal vector in C^d ⊗ C^d."""
    _check_dimension(d)
    n = d * d
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return pure_state(psi, d, label=f"random-pure(d={d})")


def random_mixed_state(
    d: int, rng: np.random.Generator, rank: int | None = None
) -> QuantumState:
    """A A^H / tr[A A^H] with complex-normal A of shape (d^2, rank)."""
    _check_dimension(d)
    n = d * d
    cols = n if rank is None else int(rank)
    if not 1 <= cols <= n:
        raise PreconditionError(f"rank must lie in 1..{n}, got {rank}")
    a = rng.standard_normal((n, cols)) + 1j * rng.standard_normal((n, cols))
    rho = a @ a.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return QuantumState(d=int(d), rho=rho / np.trace(rho).real, label=f"random-mixed(d={d})")


# ---------------------------------------------------------------------------
# Dispatch for the command line
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    """A concrete family member: its state and closed-form Z and gamma."""

    family: str
    params: dict[str, Any]
    state: QuantumState
    z_closed: NDArray[np.float64]
    gamma_closed: float


def build_family(family: str, **params: Any) -> FamilyMember:
    """Construct a family member and its closed form from keyword parameters.

    ghz: d; schmidt: mu; two-term: k, n, d; product: n, d; werner: d, phi.
    """
    if family == "ghz":
        d = _require(params, "d")
        z, gamma = ghz_closed_form(d)
        return FamilyMember(family, {"d": d}, ghz_state(d), z, gamma)
    if family == "schmidt":
        spectrum = SchmidtSpectrum.of(_require(params, "mu"))
        z11, z22, z33, gamma = schmidt_closed_form(spectrum)
        return FamilyMember(
            family, {"mu": list(spectrum.mu)}, schmidt_state(spectrum),
            np.diag([z11, z22, z33]), gamma,
        )
    if family == "two-term":
        k, n, d = _require(params, "k"), _require(params, "n"), _require(params, "d")
        gamma = two_term_closed_form(k, n, d)
        s = _spin(d)
        z33 = ((s - (k - 1)) ** 2 + (s - (n - 1)) ** 2) / 2
        state = two_term_state(k, n, d)
        return FamilyMember(
            family, {"k": k, "n": n, "d": d}, state, np.diag([0.0, 0.0, z33]), gamma
        )
    if family == "product":
        n, d = _require(params, "n"), _require(params, "d")
        gamma = product_state_closed_form(n, d)
        z33 = (_spin(d) - (n - 1)) ** 2
        return FamilyMember(
            family, {"n": n, "d": d}, product_state(n, d), np.diag([0.0, 0.0, z33]), gamma
        )
    if family == "werner":
        d, phi = _require(params, "d"), float(_require(params, "phi"))
        z, gamma = werner_closed_form(d, phi)
        return FamilyMember(family, {"d": d, "phi": phi}, werner_state(d, phi), z, gamma)
    raise PreconditionError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def _require(params: dict[str, Any], key: str) -> Any:
    value = params.get(key)
    if value is None:
        raise PreconditionError(f"missing family parameter --{key}")
    return value
