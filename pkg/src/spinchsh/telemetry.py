"""OpenTelemetry tracing for analysis pipelines.

``configure_tracing()`` is the single setup call: it creates a
TracerProvider, picks an exporter and wires a span processor. ``traced()``
wraps pipeline operations (state analysis, oracle runs, verification) in
spans so long batch runs can be inspected in any OTLP backend.

Exporter selection:
  - http:// or https:// → OTLP/HTTP exporter
  - grpc://             → OTLP/gRPC (insecure)
  - grpcs://            → OTLP/gRPC (TLS)
  - console=True        → spans printed to stderr
  - Or set protocol="http" / protocol="grpc" explicitly
"""

from __future__ import annotations

import functools
import inspect
import logging
import sys
from collections.abc import Callable
from typing import Any, Literal, TypeVar
from urllib.parse import urlparse

from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import (
    BatchSpanProcessor,
    ConsoleSpanExporter,
    SimpleSpanProcessor,
    SpanExporter,
)

from spinchsh.config import default_otel_endpoint, default_service_name

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

_TRACER_NAME = "spinchsh"
_SPAN_PREFIX = "spinchsh."

# Result fields promoted to span attributes when present on a returned object.
_RESULT_FIELDS = ("gamma", "max_chsh", "best_value", "abs_gap", "passed", "converged")


def configure_tracing(
    *,
    endpoint: str | None = None,
    protocol: Literal["http", "grpc"] | None = None,
    service_name: str | None = None,
    console: bool = False,
    exporter: SpanExporter | None = None,
    batch: bool = True,
    set_global: bool = True,
) -> TracerProvider:
    """Configure the tracing pipeline.

    Args:
        endpoint: OTLP endpoint URL. Defaults to SPINCHSH_OTEL_ENDPOINT or
            http://localhost:4318/v1/traces.
        protocol: Force "http" or "grpc". If None, inferred from URL scheme.
        service_name: Defaults to OTEL_SERVICE_NAME or "spinchsh".
        console: Print spans to stderr instead of exporting over OTLP.
        exporter: Custom SpanExporter. Overrides endpoint/protocol/console.
        batch: Use BatchSpanProcessor (True) or SimpleSpanProcessor (False).
        set_global: Set as the global TracerProvider.

    Returns:
        The configured TracerProvider.
    """
    endpoint = endpoint or default_otel_endpoint()
    name = service_name or default_service_name()

    provider = TracerProvider(resource=Resource.create({"service.name": name}))

    if exporter is None:
        if console:
            exporter = ConsoleSpanExporter(out=sys.stderr)
        else:
            exporter = _create_exporter(endpoint, protocol)

    processor = BatchSpanProcessor(exporter) if batch else SimpleSpanProcessor(exporter)
    provider.add_span_processor(processor)

    if set_global:
        trace.set_tracer_provider(provider)

    logger.info(
        "Tracing initialized: service=%s exporter=%s", name, type(exporter).__name__
    )
    return provider


def _infer_protocol(endpoint: str, protocol: str | None) -> str:
    """Determine the OTLP transport from an explicit setting or the URL scheme."""
    if protocol:
        return protocol
    scheme = urlparse(endpoint).scheme.lower()
    if scheme in ("grpc", "grpcs"):
        return "grpc"
    return "http"


def _create_exporter(endpoint: str, protocol: str | None) -> SpanExporter:
    if _infer_protocol(endpoint, protocol) == "grpc":
        from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import (
            OTLPSpanExporter as GRPCSpanExporter,
        )

        parsed = urlparse(endpoint)
        # gRPC exporter takes host:port, not a full URL
        grpc_endpoint = parsed.netloc or endpoint
        insecure = parsed.scheme.lower() not in ("grpcs", "https")
        logger.info("Using gRPC exporter: %s (insecure=%s)", grpc_endpoint, insecure)
        return GRPCSpanExporter(endpoint=grpc_endpoint, insecure=insecure)

    from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter

    logger.info("Using HTTP exporter: %s", endpoint)
    return OTLPSpanExporter(endpoint=endpoint)


def traced(name: str | None = None) -> Callable[[F], F]:
    """Trace a pipeline operation as a span named ``spinchsh.<name>``.

    Scalar arguments become ``spinchsh.arg.<param>`` attributes; scalar
    results, or the well-known fields of a result object, become
    ``spinchsh.result.<field>``. Exceptions set ERROR status and are
    re-raised.

    Example:
        @traced("verify_theorem1")
        def verify_theorem1(state, config): ...
    """

    def decorator(fn: F) -> F:
        operation = name or fn.__name__
        sig = inspect.signature(fn)

        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            # Fetched per call so a provider configured after import is honoured.
            tracer = trace.get_tracer(_TRACER_NAME)
            with tracer.start_as_current_span(_SPAN_PREFIX + operation) as span:
                span.set_attribute("spinchsh.operation.name", operation)
                _set_arguments(span, sig, args, kwargs)
                try:
                    result = fn(*args, **kwargs)
                except Exception as exc:
                    span.set_status(trace.StatusCode.ERROR, str(exc))
                    span.record_exception(exc)
                    raise
                _set_result(span, result)
                return result

        return wrapper  # type: ignore[return-value]

    return decorator


def _is_scalar(value: Any) -> bool:
    return isinstance(value, (bool, int, float, str)) and not (
        isinstance(value, str) and len(value) > 256
    )


def _set_arguments(
    span: trace.Span, sig: inspect.Signature, args: tuple, kwargs: dict
) -> None:
    try:
        bound = sig.bind(*args, **kwargs)
    except TypeError:
        return
    for key, value in bound.arguments.items():
        if _is_scalar(value):
            span.set_attribute(f"spinchsh.arg.{key}", value)
        elif hasattr(value, "d") and isinstance(value.d, int):
            span.set_attribute(f"spinchsh.arg.{key}.d", value.d)


def _set_result(span: trace.Span, result: Any) -> None:
    if result is None:
        return
    if _is_scalar(result):
        span.set_attribute("spinchsh.result.value", result)
        return
    for field_name in _RESULT_FIELDS:
        value = getattr(result, field_name, None)
        if _is_scalar(value):
            span.set_attribute(f"spinchsh.result.{field_name}", value)
