"""Tolerances and environment-driven settings.

Every numeric threshold used by validators and cross-checks lives in
:class:`Tolerances`; operations take an optional ``tol=`` override and fall
back to :data:`DEFAULT_TOLERANCES`.

Environment variables are read at call time, not import time, so tests and
the CLI can change them per invocation:

  - ``SPINCHSH_SEED``        default RNG seed (7)
  - ``SPINCHSH_LOG_LEVEL``   CLI log level (WARNING)
  - ``SPINCHSH_OTEL_ENDPOINT`` OTLP endpoint used when tracing is enabled
  - ``OTEL_SERVICE_NAME``    service name attached to spans ("spinchsh")
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

DEFAULT_SEED = 7
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_SERVICE_NAME = "spinchsh"
DEFAULT_OTEL_ENDPOINT = "http://localhost:4318/v1/traces"


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds shared by validators, engine and verification."""

    unit_norm: float = 1e-12
    hermitian: float = 1e-10
    unit_trace: float = 1e-10
    # Smallest eigenvalue allowed before a state counts as non-positive.
    psd_floor: float = -1e-9
    purity: float = 1e-9
    z_imag: float = 1e-10
    t_imag: float = 1e-9
    degenerate_norm: float = 1e-12
    # analyze exits 3 above route_agreement; the verify suite uses route_equality
    route_agreement: float = 1e-8
    route_equality: float = 1e-10
    achievability: float = 1e-9
    oracle_gap: float = 1e-6
    soundness_slack: float = 1e-9


DEFAULT_TOLERANCES = Tolerances()


def default_seed() -> int:
    """Return the RNG seed from ``SPINCHSH_SEED`` or the built-in default."""
    raw = os.environ.get("SPINCHSH_SEED")
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer SPINCHSH_SEED=%r, using %d", raw, DEFAULT_SEED)
        return DEFAULT_SEED


def default_log_level() -> str:
    return os.environ.get("SPINCHSH_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()


def default_otel_endpoint() -> str:
    return os.environ.get("SPINCHSH_OTEL_ENDPOINT", DEFAULT_OTEL_ENDPOINT)


def default_service_name() -> str:
    return os.environ.get("OTEL_SERVICE_NAME", DEFAULT_SERVICE_NAME)
