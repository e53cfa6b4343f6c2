"""Tests for spinchsh.records: state files and analysis records."""

import json

import numpy as np
import pytest

from spinchsh.errors import InvalidStateError, StateFileError
from spinchsh.families import ghz_state, werner_state
from spinchsh.records import (
    AnalysisRecord,
    format_value,
    parse_state,
    read_state_file,
    state_payload,
    write_state_file,
)


def pure_payload(d=2, data=None, **overrides):
    payload = {
        "version": 1,
        "d": d,
        "kind": "pure",
        "data": data if data is not None else [[1.0, 0.0]] + [[0.0, 0.0]] * (d * d - 1),
    }
    payload.update(overrides)
    return payload


def make_record(**overrides):
    fields = {
        "input": "ghz.json",
        "d": 2,
        "s": 0.5,
        "routes": {"definition": [[0.25, 0.0, 0.0], [0.0, -0.25, 0.0], [0.0, 0.0, 0.25]]},
        "route_deviation": 0.0,
        "singular_values": [0.25, 0.25, 0.25],
        "max_chsh": 0.7071067811865476,
        "gamma": 1.4142135623730951,
        "violates_lhv": True,
        "degenerate": False,
        "settings": {"theta_prime": 0.7853981633974483},
    }
    fields.update(overrides)
    return AnalysisRecord(**fields)


class TestParseState:
    def test_pure(self):
        state = parse_state(pure_payload(data=[[1, 0], [0, 0], [0, 0], [0, 1]], label="bell"))
        np.testing.assert_allclose(state.rho, ghz_state(2).rho, atol=1e-15)
        assert state.label == "bell"

    def test_mixed(self):
        state = parse_state(state_payload(werner_state(3, -0.5)))
        np.testing.assert_allclose(state.rho, werner_state(3, -0.5).rho)

    @pytest.mark.parametrize(
        "payload, message",
        [
            ([1, 2], "JSON object"),
            (pure_payload(version=2), "version"),
            (pure_payload(d=1, data=[[1, 0]]), "'d'"),
            (pure_payload(d=True), "'d'"),
            (pure_payload(kind="density"), "'kind'"),
            (pure_payload(data=[[1, 0]] * 3), "needs 4 entries"),
            (pure_payload(data=[[1, 0, 0]] * 4), r"\[re, im\]"),
            (pure_payload(data=[["1", 0]] * 4), r"\[re, im\]"),
            (pure_payload(label=3), "'label'"),
            (pure_payload(kind="mixed", data=[[[1, 0]] * 4] * 3), "4x4"),
            (pure_payload(data="abc"), "'data'"),
        ],
    )
    def test_schema_errors(self, payload, message):
        with pytest.raises(StateFileError, match=message):
            parse_state(payload)

    def test_non_hermitian_names_invariant(self):
        payload = state_payload(werner_state(2, 0.2))
        payload["data"][0][1] = [0.3, 0.0]
        with pytest.raises(InvalidStateError) as info:
            parse_state(payload)
        assert info.value.invariant == "hermitian"

    def test_zero_pure_vector(self):
        with pytest.raises(ValueError):
            parse_state(pure_payload(data=[[0, 0]] * 4))


class TestStateFiles:
    def test_write_then_read(self, tmp_path):
        path = tmp_path / "werner.json"
        original = werner_state(3, -0.25)
        write_state_file(original, path)
        loaded = read_state_file(path)
        np.testing.assert_array_equal(loaded.rho, original.rho)
        assert loaded.label == original.label

    def test_label_defaults_to_file_name(self, tmp_path):
        path = tmp_path / "bell.json"
        path.write_text(json.dumps(pure_payload()))
        assert read_state_file(path).label == "bell.json"

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_state_file(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(StateFileError, match="not valid JSON"):
            read_state_file(path)


class TestAnalysisRecord:
    def test_optional_sections_omitted(self):
        payload = make_record().to_dict()
        assert "oracle" not in payload
        assert "closed_form" not in payload
        assert "timings" not in payload

    def test_json_reload_preserves_numbers(self):
        record = make_record(oracle={"closed": 0.1, "oracle": 0.1, "abs_gap": 0.0,
                                     "passed": True})
        reloaded = AnalysisRecord.from_dict(json.loads(record.to_json()))
        assert reloaded == record

    def test_csv(self):
        lines = make_record().to_csv().splitlines()
        assert lines[0].split(",")[:5] == ["input", "d", "s", "max_chsh", "gamma"]
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert row["gamma"] == "1.4142135623730951"
        assert row["violates_lhv"] == "true"
        assert row["degenerate"] == "false"
        assert "oracle_value" not in row

    def test_csv_with_closed_form(self):
        record = make_record(closed_form={"gamma": 1.4142135623730951, "max_abs_deviation": 0.0})
        header = record.to_csv().splitlines()[0]
        assert header.endswith("gamma_closed,closed_max_abs_dev")


class TestFormatValue:
    def test_numpy_float_uses_shortest_repr(self):
        assert format_value(np.float64(0.1)) == "0.1"
        assert format_value(np.sqrt(2.0)) == "1.4142135623730951"

    def test_booleans(self):
        assert format_value(True) == "true"
        assert format_value(False) == "false"

    def test_other_values(self):
        assert format_value(3) == "3"
        assert format_value("ghz") == "ghz"
