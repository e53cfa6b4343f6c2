"""Command-line interface.

Commands::

    spinchsh analyze STATE.json [--route all|definition|elements|theorem2] [--oracle]
                                [--json|--csv] [--timings]
    spinchsh family {ghz,schmidt,two-term,product,werner} [--d D] [--phi PHI]
                    [--mu M1,M2,...] [--k K] [--n N] [--json|--csv]
    spinchsh scan FAMILY (--phi-from A --phi-to B --steps N | --d-from A --d-to B)
    spinchsh verify [--dims 2,3,4] [--samples N] [--seed S] [--no-oracle]
                    [--quarantine PATH]

Records go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 unreadable file, 2 invalid state or parameters, 3 routes disagree,
4 verification failure.

Random states for ``verify`` are drawn per dimension from
``numpy.random.default_rng([seed, d])``: even sample indices are mixed
states A A^H / tr with complex-normal A (d^2 x d^2), odd indices are pure
states from normalized complex-normal vectors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from spinchsh import engine
from spinchsh.config import DEFAULT_TOLERANCES, Tolerances, default_log_level, default_seed
from spinchsh.engine import Route, analyze_state, bilinear_chsh
from spinchsh.errors import (
    InvalidStateError,
    NumericalInconsistencyError,
    SpinChshError,
    StateFileError,
)
from spinchsh.families import FAMILIES, build_family, random_mixed_state, random_pure_state
from spinchsh.oracle import OracleConfig, verify_theorem1
from spinchsh.qudit import QuantumState
from spinchsh.records import AnalysisRecord, format_value, read_state_file, state_payload
from spinchsh.telemetry import configure_tracing, traced

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNREADABLE = 1
EXIT_INVALID = 2
EXIT_ROUTES_DISAGREE = 3
EXIT_VERIFY_FAILED = 4

_ROUTE_FLAGS = {
    "definition": (Route.DEFINITION,),
    "elements": (Route.ELEMENT_FORMULAS,),
    "theorem2": (Route.THEOREM2,),
    "all": (Route.DEFINITION, Route.ELEMENT_FORMULAS, Route.THEOREM2),
}
SCAN_HEADER = ("param", "gamma_closed", "gamma_pipeline", "abs_dev")
VERIFY_CHECKS = ("route-equality", "norm-bound", "tsirelson", "achievability", "oracle")


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _matrix(z: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in z]


def _build_record(
    state: QuantumState,
    descriptor: str,
    routes: Sequence[Route],
    tol: Tolerances,
    timings: dict[str, float] | None = None,
) -> AnalysisRecord:
    matrices: dict[str, list[list[float]]] = {}
    zs = {}
    for route in routes:
        started = time.perf_counter()
        zmat = engine.correlation_by_route(state, route, tol=tol)
        if timings is not None:
            timings[route.value] = time.perf_counter() - started
        zs[route] = zmat
        matrices[route.value] = _matrix(zmat.z)

    primary = zs[routes[0]]
    deviation = max(
        (float(np.max(np.abs(z.z - primary.z))) for z in zs.values()), default=0.0
    )
    report = engine.report_from_correlation(primary, routes[0], tol)
    return AnalysisRecord(
        input=descriptor,
        d=state.d,
        s=float(state.s),
        routes=matrices,
        route_deviation=deviation,
        singular_values=[float(x) for x in report.singular_values],
        max_chsh=float(report.max_chsh),
        gamma=float(report.gamma),
        violates_lhv=bool(report.violates_lhv),
        degenerate=bool(report.degenerate),
        settings=report.settings.as_dict(),
    )


def _emit(record: AnalysisRecord, as_csv: bool) -> None:
    sys.stdout.write(record.to_csv() if as_csv else record.to_json() + "\n")


def _attach_oracle(record: AnalysisRecord, state: QuantumState, tol: Tolerances) -> None:
    check = verify_theorem1(state, OracleConfig(), tol)
    record.oracle = {
        "closed": float(check.closed),
        "oracle": float(check.oracle),
        "abs_gap": float(check.abs_gap),
        "passed": bool(check.passed),
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@traced("cli.analyze")
def cmd_analyze(args: argparse.Namespace, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    try:
        state = read_state_file(args.state)
    except OSError as exc:
        logger.error("cannot read %s: %s", args.state, exc)
        return EXIT_UNREADABLE
    except InvalidStateError as exc:
        logger.error("invalid state in %s: violated invariant %s (%s)",
                     args.state, exc.invariant, exc)
        return EXIT_INVALID
    except (StateFileError, SpinChshError) as exc:
        logger.error("invalid state file %s: %s", args.state, exc)
        return EXIT_INVALID

    timings: dict[str, float] | None = {} if args.timings else None
    started = time.perf_counter()
    try:
        record = _build_record(state, str(args.state), _ROUTE_FLAGS[args.route], tol, timings)
        if args.oracle:
            _attach_oracle(record, state, tol)
    except NumericalInconsistencyError as exc:
        logger.error("invalid state in %s: %s", args.state, exc)
        return EXIT_INVALID
    if timings is not None:
        timings["total"] = time.perf_counter() - started
        record.timings = timings

    _emit(record, args.csv)
    if record.route_deviation > tol.route_agreement:
        logger.error("correlation routes disagree by %.3e (limit %.1e)",
                     record.route_deviation, tol.route_agreement)
        return EXIT_ROUTES_DISAGREE
    return EXIT_OK


def _family_params(args: argparse.Namespace) -> dict[str, Any]:
    params: dict[str, Any] = {"d": args.d, "phi": args.phi, "k": args.k, "n": args.n}
    if args.mu is not None:
        params["mu"] = [float(x) for x in args.mu.split(",") if x.strip()]
    return params


@traced("cli.family")
def cmd_family(args: argparse.Namespace, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    try:
        member = build_family(args.family, **_family_params(args))
    except (SpinChshError, ValueError) as exc:
        logger.error("bad %s parameters: %s", args.family, exc)
        return EXIT_INVALID

    routes = _ROUTE_FLAGS[args.route]
    record = _build_record(member.state, member.state.label or args.family, routes, tol)
    z_pipeline = np.array(record.routes[routes[0].value])
    deviation = max(
        float(np.max(np.abs(z_pipeline - member.z_closed))),
        abs(record.gamma - member.gamma_closed),
    )
    record.closed_form = {
        "family": member.family,
        "params": member.params,
        "z": _matrix(member.z_closed),
        "gamma": float(member.gamma_closed),
        "max_abs_deviation": deviation,
    }
    if args.oracle:
        _attach_oracle(record, member.state, tol)
    _emit(record, args.csv)
    return EXIT_OK


def _scan_points(args: argparse.Namespace) -> list[tuple[str, dict[str, Any]]]:
    """(param cell, family parameters) in ascending parameter order."""
    if args.family == "werner":
        if args.phi_from is None or args.phi_to is None:
            raise ValueError("werner scans need --phi-from and --phi-to")
        if args.steps < 1 or args.phi_from > args.phi_to:
            raise ValueError("empty phi range")
        values = np.linspace(args.phi_from, args.phi_to, args.steps)
        return [(format_value(float(v)), {"d": args.d, "phi": float(v)}) for v in values]

    if args.d_from is None or args.d_to is None:
        raise ValueError(f"{args.family} scans need --d-from and --d-to")
    if args.d_from > args.d_to:
        raise ValueError("empty d range")
    points = []
    for d in range(args.d_from, args.d_to + 1):
        if args.family == "two-term":
            params = {"k": 1, "n": d, "d": d}
        elif args.family == "product":
            params = {"n": args.n or 1, "d": d}
        elif args.family == "ghz":
            params = {"d": d}
        else:
            raise ValueError(f"scan over d is not available for {args.family}")
        points.append((str(d), params))
    return points


@traced("cli.scan")
def cmd_scan(args: argparse.Namespace, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    try:
        points = _scan_points(args)
        members = [(cell, build_family(args.family, **params)) for cell, params in points]
    except (SpinChshError, ValueError) as exc:
        logger.error("bad scan range: %s", exc)
        return EXIT_INVALID

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCAN_HEADER)
    for cell, member in members:
        gamma = float(analyze_state(member.state, Route.DEFINITION, tol).gamma)
        closed = float(member.gamma_closed)
        writer.writerow([cell, format_value(closed), format_value(gamma),
                         format_value(abs(gamma - closed))])
    sys.stdout.write(buffer.getvalue())
    logger.info("scan of %s: %d points", args.family, len(members))
    return EXIT_OK


def _check_state(
    state: QuantumState, config: OracleConfig | None, tol: Tolerances
) -> dict[str, bool]:
    """Pass/fail for each verification check on one state."""
    definition = engine.correlation_by_route(state, Route.DEFINITION, tol=tol)
    elements = engine.correlation_by_route(state, Route.ELEMENT_FORMULAS, tol=tol)
    contraction = engine.correlation_by_route(state, Route.THEOREM2, tol=tol)
    worst = max(
        float(np.max(np.abs(definition.z - elements.z))),
        float(np.max(np.abs(definition.z - contraction.z))),
    )
    report = engine.report_from_correlation(definition, Route.DEFINITION, tol)
    s2 = state.s**2
    results = {
        "route-equality": worst <= tol.route_equality,
        "norm-bound": float(definition.singular_values[0]) <= s2 + tol.soundness_slack,
        "tsirelson": report.gamma <= math.sqrt(2.0) + tol.soundness_slack,
        "achievability": report.degenerate
        or abs(bilinear_chsh(definition, report.settings) - report.max_chsh)
        <= tol.achievability,
    }
    if config is not None:
        results["oracle"] = verify_theorem1(state, config, tol).passed
    return results


@traced("cli.verify")
def cmd_verify(args: argparse.Namespace, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    try:
        dims = [int(x) for x in args.dims.split(",") if x.strip()]
    except ValueError:
        logger.error("--dims must be a comma-separated list of integers")
        return EXIT_INVALID
    if not dims or min(dims) < 2 or args.samples < 1:
        logger.error("verify needs dimensions >= 2 and a positive sample count")
        return EXIT_INVALID

    seed = default_seed() if args.seed is None else args.seed
    config = None if args.no_oracle else OracleConfig(rng_seed=seed)
    checks = VERIFY_CHECKS if config is not None else VERIFY_CHECKS[:-1]
    passed = dict.fromkeys(checks, 0)
    failed = dict.fromkeys(checks, 0)
    quarantine: list[dict[str, Any]] = []

    for d in dims:
        rng = np.random.default_rng([seed, d])
        for index in range(args.samples):
            if index % 2 == 0:
                state = random_mixed_state(d, rng)
            else:
                state = random_pure_state(d, rng)
            results = _check_state(state, config, tol)
            for name, ok in results.items():
                (passed if ok else failed)[name] += 1
            bad = [name for name, ok in results.items() if not ok]
            if bad:
                quarantine.append(
                    {"seed": seed, "d": d, "index": index, "failed_checks": bad,
                     "state": state_payload(state)}
                )

    lines = [f"{'check':<16}{'passed':>8}{'failed':>8}"]
    lines += [f"{name:<16}{passed[name]:>8}{failed[name]:>8}" for name in checks]
    sys.stdout.write("\n".join(lines) + "\n")

    if quarantine:
        path = Path(args.quarantine)
        path.write_text(json.dumps(quarantine, indent=2) + "\n", encoding="utf-8")
        logger.warning("%d failing states written to %s", len(quarantine), path)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="Emit JSON (default).")
    group.add_argument("--csv", action="store_true", help="Emit a one-row CSV.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinchsh",
        description="Maximal CHSH expectation under spin-s measurements in two-qudit states.",
    )
    parser.add_argument("--log-level", default=None,
                        help="Logging level (default: SPINCHSH_LOG_LEVEL or WARNING).")
    parser.add_argument("--trace-endpoint", default=None,
                        help="Export spans to this OTLP endpoint (http://, grpc://, grpcs://).")
    parser.add_argument("--trace-console", action="store_true",
                        help="Print spans to stderr.")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="Analyze a state file.")
    analyze.add_argument("state", help="Path to a version-1 state file.")
    analyze.add_argument("--route", choices=sorted(_ROUTE_FLAGS), default="all")
    analyze.add_argument("--oracle", action="store_true",
                         help="Cross-check the maximum with the direct search.")
    analyze.add_argument("--timings", action="store_true",
                         help="Include wall-clock timings (output is then not deterministic).")
    _add_output_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    family = sub.add_parser("family", help="Analyze a named state family.")
    family.add_argument("family", choices=FAMILIES)
    family.add_argument("--d", type=int, default=None)
    family.add_argument("--phi", type=float, default=None)
    family.add_argument("--mu", default=None, help="Comma-separated Schmidt probabilities.")
    family.add_argument("--k", type=int, default=None)
    family.add_argument("--n", type=int, default=None)
    family.add_argument("--route", choices=sorted(_ROUTE_FLAGS), default="definition")
    family.add_argument("--oracle", action="store_true")
    _add_output_flags(family)
    family.set_defaults(handler=cmd_family)

    scan = sub.add_parser("scan", help="Closed form vs pipeline over a parameter range (CSV).")
    scan.add_argument("family", choices=("ghz", "two-term", "product", "werner"))
    scan.add_argument("--d", type=int, default=2, help="Dimension for Werner scans.")
    scan.add_argument("--n", type=int, default=None, help="Level for product scans.")
    scan.add_argument("--phi-from", type=float, default=None)
    scan.add_argument("--phi-to", type=float, default=None)
    scan.add_argument("--steps", type=int, default=201)
    scan.add_argument("--d-from", type=int, default=None)
    scan.add_argument("--d-to", type=int, default=None)
    scan.set_defaults(handler=cmd_scan)

    verify = sub.add_parser("verify", help="Run the invariant suite on random states.")
    verify.add_argument("--dims", default="2,3,4")
    verify.add_argument("--samples", type=int, default=50)
    verify.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: SPINCHSH_SEED or 7).")
    verify.add_argument("--no-oracle", action="store_true")
    verify.add_argument("--quarantine", default="spinchsh-quarantine.json")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or default_log_level()).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    provider = None
    if args.trace_endpoint or args.trace_console:
        provider = configure_tracing(
            endpoint=args.trace_endpoint, console=args.trace_console, batch=False
        )
    try:
        return int(args.handler(args))
    finally:
        if provider is not None:
            provider.shutdown()


if __name__ == "__main__":
    raise SystemExit(main())
