"""Direction-space maximization of the CHSH expectation.

An independent check on the singular-value formula: it searches the four
measurement directions directly and never looks at singular values.

``alternating_ascent`` is block-coordinate ascent on the bilinear objective
(a1, Z (b1 + b2)) + (a2, Z (b1 - b2)). For fixed b the best a are the
normalized images of b1 ± b2 under Z; since the objective also equals
(b1, Z^T (a1 + a2)) + (b2, Z^T (a1 - a2)), the best b for fixed a come from
the same formula on Z^T. Each half-step can only raise the objective.

``grid_search`` scans orthonormal frames (r1, r2) given by three Euler
angles together with theta', evaluating |Z (b1 + b2)| + |Z (b1 - b2)|.
Its result is a lower bound on the true maximum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.transform import Rotation

from spinchsh.config import DEFAULT_TOLERANCES, Tolerances, default_seed
from spinchsh.engine import (
    MeasurementSettings,
    SpinCorrelationMatrix,
    bilinear_chsh,
    max_chsh,
    spin_correlation_matrix,
)
from spinchsh.qudit import QuantumState
from spinchsh.telemetry import traced

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleConfig:
    """Search budget for the oracle.

    ``grid_resolution`` is (polar, azimuthal) subdivisions: the middle Euler
    angle and theta' take polar + 1 points, the outer Euler angles take
    ``azimuthal`` points on [0, 2 pi).
    """

    multistarts: int = 20
    max_iterations: int = 200
    convergence_tol: float = 1e-10
    grid_resolution: tuple[int, int] = (24, 48)
    rng_seed: int = field(default_factory=default_seed)

    def __post_init__(self) -> None:
        if self.multistarts < 1 or self.max_iterations < 1:
            raise ValueError("multistarts and max_iterations must be positive")
        if min(self.grid_resolution) < 1:
            raise ValueError("grid_resolution entries must be positive")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")


@dataclass(frozen=True)
class OracleResult:
    best_value: float
    best_settings: MeasurementSettings
    iterations_used: int
    converged: bool
    starts_agreeing: int
    method: str = "alternating-ascent"
    history: tuple[float, ...] = ()
    degenerate_updates: int = 0


class Theorem1Check(NamedTuple):
    closed: float
    oracle: float
    abs_gap: float
    passed: bool


def _random_unit(rng: np.random.Generator) -> NDArray[np.float64]:
    while True:
        v = rng.standard_normal(3)
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            return v / norm


class _Ascent:
    """One multistart of the alternating ascent."""

    def __init__(self, z: NDArray[np.float64], rng: np.random.Generator, floor: float) -> None:
        self.z = z
        self.rng = rng
        self.floor = floor
        self.substitutions = 0

    def _unit(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        norm = float(np.linalg.norm(v))
        if norm < self.floor:
            self.substitutions += 1
            return _random_unit(self.rng)
        return v / norm

    def run(
        self, max_iterations: int, tol: float
    ) -> tuple[float, tuple[NDArray[np.float64], ...], list[float], int, bool]:
        z = self.z
        b1, b2 = _random_unit(self.rng), _random_unit(self.rng)
        history: list[float] = []
        previous = -math.inf
        a1 = a2 = b1
        converged = False
        iterations = 0
        for iterations in range(1, max_iterations + 1):
            a1 = self._unit(z @ (b1 + b2))
            a2 = self._unit(z @ (b1 - b2))
            b1 = self._unit(z.T @ (a1 + a2))
            b2 = self._unit(z.T @ (a1 - a2))
            value = float(a1 @ z @ (b1 + b2) + a2 @ z @ (b1 - b2))
            history.append(value)
            if abs(value - previous) < tol:
                converged = True
                break
            previous = value
        return value, (a1, a2, b1, b2), history, iterations, converged


@traced("alternating_ascent")
def alternating_ascent(
    zmat: SpinCorrelationMatrix,
    config: OracleConfig | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> OracleResult:
    """Best CHSH value found by multistart alternating ascent."""
    config = config or OracleConfig()
    streams = np.random.SeedSequence(config.rng_seed).spawn(config.multistarts)
    z = np.asarray(zmat.z, dtype=np.float64)

    outcomes = []
    substitutions = 0
    for stream in streams:
        ascent = _Ascent(z, np.random.default_rng(stream), tol.degenerate_norm)
        outcomes.append(ascent.run(config.max_iterations, config.convergence_tol))
        substitutions += ascent.substitutions

    best_index = max(range(len(outcomes)), key=lambda i: outcomes[i][0])
    value, directions, history, iterations, converged = outcomes[best_index]
    agreeing = sum(1 for o in outcomes if abs(o[0] - value) <= 1e-8)
    if substitutions:
        logger.warning(
            "alternating ascent substituted %d random directions for vanishing updates",
            substitutions,
        )
    logger.debug(
        "ascent best=%.15g after %d sweeps (%d/%d starts agree)",
        value, iterations, agreeing, config.multistarts,
    )
    return OracleResult(
        best_value=max(value, 0.0),
        best_settings=MeasurementSettings.from_directions(*directions),
        iterations_used=iterations,
        converged=converged,
        starts_agreeing=agreeing,
        method="alternating-ascent",
        history=tuple(history),
        degenerate_updates=substitutions,
    )


def _frames(polar: int, azimuthal: int) -> NDArray[np.float64]:
    """Rotation matrices R = Rz(alpha) Ry(beta) Rz(gamma) on the Euler grid."""
    alpha = np.arange(azimuthal) * (2 * math.pi / azimuthal)
    beta = np.linspace(0.0, math.pi, polar + 1)
    gamma = alpha
    grid = np.stack(np.meshgrid(alpha, beta, gamma, indexing="ij"), axis=-1).reshape(-1, 3)
    return Rotation.from_euler("ZYZ", grid).as_matrix()


@traced("grid_search")
def grid_search(
    zmat: SpinCorrelationMatrix,
    config: OracleConfig | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> OracleResult:
    """Exhaustive scan over frames (r1, r2) and theta' in [0, pi/2]."""
    config = config or OracleConfig()
    polar, azimuthal = config.grid_resolution
    rotations = _frames(polar, azimuthal)
    r1 = rotations[:, :, 0]
    r2 = rotations[:, :, 1]
    z = np.asarray(zmat.z, dtype=np.float64)
    n1 = np.linalg.norm(r1 @ z.T, axis=1)
    n2 = np.linalg.norm(r2 @ z.T, axis=1)
    thetas = np.linspace(0.0, math.pi / 2, polar + 1)
    # |Z (b1 + b2)| + |Z (b1 - b2)| = 2 cos(theta) |Z r1| + 2 sin(theta) |Z r2|
    values = 2.0 * (np.outer(n1, np.cos(thetas)) + np.outer(n2, np.sin(thetas)))
    frame, theta_index = np.unravel_index(int(np.argmax(values)), values.shape)
    settings = MeasurementSettings.from_frame(
        r1[frame], r2[frame], float(thetas[theta_index]), zmat, tol
    )
    value = bilinear_chsh(zmat, settings)
    logger.debug("grid best=%.15g over %d frames", value, rotations.shape[0])
    return OracleResult(
        best_value=max(value, 0.0),
        best_settings=settings,
        iterations_used=int(values.size),
        converged=True,
        starts_agreeing=int(np.count_nonzero(values >= values.max() - 1e-8)),
        method="grid",
    )


@traced("verify_theorem1")
def verify_theorem1(
    state: QuantumState,
    config: OracleConfig | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Theorem1Check:
    """Compare the singular-value maximum with the best direct search."""
    config = config or OracleConfig()
    zmat = spin_correlation_matrix(state, tol=tol)
    closed, _, _ = max_chsh(zmat)
    oracle = max(
        alternating_ascent(zmat, config, tol).best_value,
        grid_search(zmat, config, tol).best_value,
    )
    gap = abs(closed - oracle)
    passed = gap <= tol.oracle_gap and oracle <= closed + tol.soundness_slack
    if not passed:
        logger.warning("theorem check failed for %s: closed=%.15g oracle=%.15g",
                       state.label or f"d={state.d}", closed, oracle)
    return Theorem1Check(closed=closed, oracle=oracle, abs_gap=gap, passed=bool(passed))
