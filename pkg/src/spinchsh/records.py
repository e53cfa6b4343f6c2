"""State files and analysis records.

State file (JSON, version 1)::

    {"version": 1, "d": 3, "kind": "pure" | "mixed", "label": "...",
     "data": [[re, im], ...]}            # pure: d^2 entries
     "data": [[[re, im], ...], ...]}     # mixed: d^2 rows of d^2 entries

Records are emitted with Python's shortest round-trip float repr, so a
record read back with :meth:`AnalysisRecord.from_dict` has identical
numeric fields.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from spinchsh.errors import StateFileError
from spinchsh.qudit import QuantumState, density_state, pure_state

logger = logging.getLogger(__name__)

STATE_FILE_VERSION = 1


# ---------------------------------------------------------------------------
# State files
# ---------------------------------------------------------------------------


def _decode_complex(entry: Any, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        raise StateFileError(f"{where}: complex entries must be [re, im] number pairs")
    return complex(float(entry[0]), float(entry[1]))


def _encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def parse_state(payload: Any) -> QuantumState:
    """Build a validated QuantumState from a decoded state-file payload."""
    if not isinstance(payload, dict):
        raise StateFileError("state file must contain a JSON object")
    version = payload.get("version")
    if version != STATE_FILE_VERSION:
        raise StateFileError(f"unsupported state file version {version!r}")
    d = payload.get("d")
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise StateFileError(f"field 'd' must be an integer >= 2, got {d!r}")
    kind = payload.get("kind")
    data = payload.get("data")
    label = payload.get("label")
    if label is not None and not isinstance(label, str):
        raise StateFileError("field 'label' must be a string")
    if not isinstance(data, list):
        raise StateFileError("field 'data' must be a list")
    n = d * d

    if kind == "pure":
        if len(data) != n:
            raise StateFileError(f"pure state for d={d} needs {n} entries, got {len(data)}")
        coeffs = [_decode_complex(e, f"data[{i}]") for i, e in enumerate(data)]
        return pure_state(coeffs, d, label=label)
    if kind == "mixed":
        if len(data) != n or not all(isinstance(row, list) and len(row) == n for row in data):
            raise StateFileError(f"mixed state for d={d} needs a {n}x{n} matrix")
        rho = np.array(
            [[_decode_complex(e, f"data[{i}][{j}]") for j, e in enumerate(row)]
             for i, row in enumerate(data)],
            dtype=np.complex128,
        )
        return density_state(rho, d, label=label)
    raise StateFileError(f"field 'kind' must be 'pure' or 'mixed', got {kind!r}")


def read_state_file(path: str | Path) -> QuantumState:
    """Read and validate a state file.

    Raises:
        OSError: the file cannot be read.
        StateFileError: not UTF-8, malformed JSON or schema.
        InvalidStateError: the matrix fails a state invariant.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise StateFileError(f"{path}: not UTF-8 text (byte {exc.start})") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    state = parse_state(payload)
    if state.label is None:
        state = QuantumState(d=state.d, rho=state.rho, label=Path(path).name)
    return state


def state_payload(state: QuantumState) -> dict[str, Any]:
    """The mixed-form state-file payload of ``state``."""
    return {
        "version": STATE_FILE_VERSION,
        "d": state.d,
        "kind": "mixed",
        "label": state.label,
        "data": [[_encode_complex(z) for z in row] for row in state.rho.tolist()],
    }


def write_state_file(state: QuantumState, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_payload(state)) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Analysis records
# ---------------------------------------------------------------------------


@dataclass
class AnalysisRecord:
    """Everything ``analyze`` and ``family`` report about one state."""

    input: str
    d: int
    s: float
    routes: dict[str, list[list[float]]]
    route_deviation: float
    singular_values: list[float]
    max_chsh: float
    gamma: float
    violates_lhv: bool
    degenerate: bool
    settings: dict[str, Any]
    oracle: dict[str, Any] | None = None
    closed_form: dict[str, Any] | None = None
    timings: dict[str, float] | None = field(default=None)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        for optional in ("oracle", "closed_form", "timings"):
            if out[optional] is None:
                del out[optional]
        return out

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> AnalysisRecord:
        return cls(**payload)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_row(self) -> dict[str, Any]:
        """Flat scalar view for CSV output."""
        row: dict[str, Any] = {
            "input": self.input,
            "d": self.d,
            "s": self.s,
            "max_chsh": self.max_chsh,
            "gamma": self.gamma,
            "violates_lhv": self.violates_lhv,
            "degenerate": self.degenerate,
            "z_s": self.singular_values[0],
            "z_tilde_s": self.singular_values[1],
            "route_deviation": self.route_deviation,
        }
        if self.oracle is not None:
            row["oracle_value"] = self.oracle["oracle"]
            row["oracle_gap"] = self.oracle["abs_gap"]
        if self.closed_form is not None:
            row["gamma_closed"] = self.closed_form["gamma"]
            row["closed_max_abs_dev"] = self.closed_form["max_abs_deviation"]
        return row

    def to_csv(self) -> str:
        row = self.csv_row()
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(row.keys())
        writer.writerow([format_value(v) for v in row.values()])
        return buffer.getvalue()


def format_value(value: Any) -> str:
    """CSV cell text; floats use the same repr as the JSON output."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return float.__repr__(float(value))
    return str(value)
