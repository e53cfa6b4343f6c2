"""Shared test fixtures for spinchsh tests.

Sets up a TracerProvider with InMemorySpanExporter so tests can assert on
the spans emitted by traced pipeline operations without a real collector.

A single TracerProvider is shared across the entire test session. The
exporter is cleared before and after every test via the autouse
_clear_spans fixture so tests never see each other's spans.

``traced`` fetches ``trace.get_tracer()`` at call time, so the global
provider set here is resolved when a decorated function runs.
"""

import numpy as np
import pytest
from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import SimpleSpanProcessor
from opentelemetry.sdk.trace.export.in_memory_span_exporter import InMemorySpanExporter

from spinchsh.families import ghz_state, random_mixed_state, random_pure_state

# Module-level singletons, initialised once per process.
_exporter = InMemorySpanExporter()
_provider = TracerProvider(
    resource=Resource.create({"service.name": "test-service"}),
)
_provider.add_span_processor(SimpleSpanProcessor(_exporter))
trace.set_tracer_provider(_provider)


@pytest.fixture(autouse=True)
def _clear_spans():
    """Clear the shared InMemorySpanExporter before and after every test."""
    _exporter.clear()
    yield
    _exporter.clear()


@pytest.fixture()
def exporter():
    """The shared InMemorySpanExporter; read spans with get_finished_spans()."""
    return _exporter


@pytest.fixture()
def rng():
    """A seeded generator so random-state tests are reproducible."""
    return np.random.default_rng(20240607)


@pytest.fixture()
def random_states(rng):
    """A small mixed/pure corpus over d = 2..4."""
    states = []
    for d in (2, 3, 4):
        states.append(random_mixed_state(d, rng))
        states.append(random_pure_state(d, rng))
    return states


@pytest.fixture()
def ghz3():
    return ghz_state(3)
