"""Tests for the spinchsh command line.

Commands are driven through ``main([...])`` with stdout captured by
capsys and diagnostics by caplog.
"""

import csv
import io
import json
import math

import pytest

import spinchsh.engine
from spinchsh.cli import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_ROUTES_DISAGREE,
    EXIT_UNREADABLE,
    EXIT_VERIFY_FAILED,
    SCAN_HEADER,
    main,
)
from spinchsh.engine import SpinCorrelationMatrix
from spinchsh.families import ghz_state, random_mixed_state, werner_violation_threshold
from spinchsh.qudit import maximally_mixed_state
from spinchsh.records import write_state_file


@pytest.fixture()
def ghz3_file(tmp_path):
    path = tmp_path / "ghz3.json"
    write_state_file(ghz_state(3), path)
    return path


@pytest.fixture()
def random3_file(tmp_path, rng):
    path = tmp_path / "random3.json"
    write_state_file(random_mixed_state(3, rng), path)
    return path


@pytest.fixture()
def transposed_z(monkeypatch):
    """Make the definition route return Z^T."""
    original = spinchsh.engine.spin_correlation_matrix

    def corrupted(state, ops=None, tol=spinchsh.engine.DEFAULT_TOLERANCES):
        return SpinCorrelationMatrix.from_matrix(original(state, ops, tol).z.T, state.d)

    monkeypatch.setattr(spinchsh.engine, "spin_correlation_matrix", corrupted)


def read_json(capsys):
    return json.loads(capsys.readouterr().out)


def read_csv(capsys):
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


class TestAnalyze:
    def test_ghz_qutrit(self, ghz3_file, capsys):
        assert main(["analyze", str(ghz3_file)]) == EXIT_OK
        record = read_json(capsys)
        assert record["gamma"] == pytest.approx(0.9428090415820634, abs=1e-12)
        assert record["d"] == 3
        assert record["s"] == 1.0
        assert set(record["routes"]) == {"definition", "element-formulas", "theorem2"}
        assert record["route_deviation"] < 1e-8
        assert record["violates_lhv"] is False
        assert "timings" not in record

    def test_maximally_mixed(self, tmp_path, capsys):
        path = tmp_path / "mixed.json"
        write_state_file(maximally_mixed_state(2), path)
        assert main(["analyze", str(path), "--route", "definition"]) == EXIT_OK
        record = read_json(capsys)
        assert record["gamma"] == 0.0
        assert record["violates_lhv"] is False
        assert record["degenerate"] is True
        assert list(record["routes"]) == ["definition"]

    def test_oracle_gap(self, random3_file, capsys):
        assert main(["analyze", str(random3_file), "--oracle"]) == EXIT_OK
        oracle = read_json(capsys)["oracle"]
        assert oracle["abs_gap"] < 1e-6
        assert oracle["passed"] is True

    def test_csv(self, ghz3_file, capsys):
        assert main(["analyze", str(ghz3_file), "--csv"]) == EXIT_OK
        (row,) = read_csv(capsys)
        assert float(row["gamma"]) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-12)
        assert row["violates_lhv"] == "false"

    def test_output_is_deterministic(self, random3_file, capsys):
        main(["analyze", str(random3_file)])
        first = capsys.readouterr().out
        main(["analyze", str(random3_file)])
        assert capsys.readouterr().out == first

    def test_timings_opt_in(self, ghz3_file, capsys):
        assert main(["analyze", str(ghz3_file), "--timings"]) == EXIT_OK
        timings = read_json(capsys)["timings"]
        assert {"definition", "element-formulas", "theorem2", "total"} <= set(timings)

    def test_missing_file(self, tmp_path, caplog):
        assert main(["analyze", str(tmp_path / "absent.json")]) == EXIT_UNREADABLE
        assert "cannot read" in caplog.text

    def test_invalid_state_names_invariant(self, tmp_path, caplog):
        path = tmp_path / "bad.json"
        data = [[[0.0, 0.0]] * 4 for _ in range(4)]
        for i in range(4):
            data[i][i] = [0.5, 0.0]
        path.write_text(json.dumps({"version": 1, "d": 2, "kind": "mixed", "data": data}))
        assert main(["analyze", str(path)]) == EXIT_INVALID
        assert "unit-trace" in caplog.text

    def test_malformed_file(self, tmp_path, caplog):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"version": 9}))
        assert main(["analyze", str(path)]) == EXIT_INVALID
        assert "version" in caplog.text

    def test_non_utf8_file(self, tmp_path, caplog):
        path = tmp_path / "latin.json"
        path.write_bytes(b'{"version": 1, "d": 2, "kind": "pure", "label": "\xff\xfe"}')
        assert main(["analyze", str(path)]) == EXIT_INVALID
        assert "not UTF-8" in caplog.text

    def test_non_finite_entry_names_invariant(self, tmp_path, caplog):
        path = tmp_path / "nan.json"
        data = [[[0.0, 0.0]] * 4 for _ in range(4)]
        for i in range(4):
            data[i][i] = [0.25, 0.0]
        data[1][1] = [float("nan"), 0.0]
        path.write_text(json.dumps({"version": 1, "d": 2, "kind": "mixed", "data": data}))
        assert main(["analyze", str(path)]) == EXIT_INVALID
        assert "violated invariant finite" in caplog.text

    def test_route_disagreement(self, random3_file, capsys, caplog, transposed_z):
        assert main(["analyze", str(random3_file)]) == EXIT_ROUTES_DISAGREE
        record = read_json(capsys)
        assert record["route_deviation"] > 1e-8
        assert "disagree" in caplog.text


# ---------------------------------------------------------------------------
# family
# ---------------------------------------------------------------------------


class TestFamily:
    @pytest.mark.parametrize(
        "argv, gamma",
        [
            (["ghz", "--d", "2"], 1.4142135623730951),
            (["werner", "--d", "3", "--phi", "-1"], 0.4714045207910317),
            (["product", "--d", "3", "--n", "2"], 0.0),
            (["two-term", "--d", "5", "--k", "2", "--n", "4"], 0.25),
            (["schmidt", "--mu", "0.5,0.5"], math.sqrt(2)),
        ],
    )
    def test_gamma(self, argv, gamma, capsys):
        assert main(["family", *argv]) == EXIT_OK
        record = read_json(capsys)
        assert record["gamma"] == pytest.approx(gamma, abs=1e-12)
        assert record["closed_form"]["gamma"] == pytest.approx(gamma, abs=1e-12)
        assert record["closed_form"]["max_abs_deviation"] < 1e-9

    def test_closed_form_params(self, capsys):
        main(["family", "werner", "--d", "3", "--phi", "-0.5"])
        closed = read_json(capsys)["closed_form"]
        assert closed["family"] == "werner"
        assert closed["params"] == {"d": 3, "phi": -0.5}

    @pytest.mark.parametrize(
        "argv",
        [
            ["werner", "--d", "3"],
            ["werner", "--d", "3", "--phi", "2"],
            ["two-term", "--d", "4", "--k", "1", "--n", "2"],
            ["schmidt", "--mu", "0.5,0.6"],
            ["schmidt", "--mu", "half,half"],
            ["ghz", "--d", "1"],
        ],
    )
    def test_bad_parameters(self, argv, caplog):
        assert main(["family", *argv]) == EXIT_INVALID
        assert "bad" in caplog.text

    def test_unknown_family(self):
        with pytest.raises(SystemExit):
            main(["family", "cluster"])


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


class TestScan:
    def test_werner_crossing(self, capsys):
        argv = ["scan", "werner", "--d", "2", "--phi-from", "-1", "--phi-to", "1",
                "--steps", "201"]
        assert main(argv) == EXIT_OK
        rows = read_csv(capsys)
        assert len(rows) == 201
        phis = [float(r["param"]) for r in rows]
        gammas = [float(r["gamma_pipeline"]) for r in rows]
        first_below = next(i for i, g in enumerate(gammas) if g < 1.0)
        assert phis[first_below - 1] < werner_violation_threshold() < phis[first_below]
        assert all(float(r["abs_dev"]) < 1e-9 for r in rows)

    def test_ghz_dimensions(self, capsys):
        assert main(["scan", "ghz", "--d-from", "2", "--d-to", "10"]) == EXIT_OK
        rows = read_csv(capsys)
        assert [int(r["param"]) for r in rows] == list(range(2, 11))
        for row in rows:
            d = int(row["param"])
            expected = math.sqrt(2) / 3 * (d + 1) / (d - 1)
            assert float(row["gamma_pipeline"]) == pytest.approx(expected, abs=1e-9)
            assert float(row["abs_dev"]) < 1e-9

    def test_header(self, capsys):
        main(["scan", "two-term", "--d-from", "3", "--d-to", "5"])
        header = capsys.readouterr().out.splitlines()[0]
        assert tuple(header.split(",")) == SCAN_HEADER

    def test_product_levels(self, capsys):
        assert main(["scan", "product", "--d-from", "2", "--d-to", "6", "--n", "2"]) == EXIT_OK
        rows = read_csv(capsys)
        assert all(float(r["abs_dev"]) < 1e-9 for r in rows)

    @pytest.mark.parametrize(
        "argv",
        [
            ["werner", "--phi-from", "0.5", "--phi-to", "-0.5"],
            ["werner", "--phi-from", "-1", "--phi-to", "1", "--steps", "0"],
            ["werner", "--phi-from", "-1"],
            ["ghz", "--d-from", "5", "--d-to", "3"],
            ["ghz", "--d-from", "1", "--d-to", "3"],
            ["ghz"],
        ],
    )
    def test_empty_or_invalid_range(self, argv):
        assert main(["scan", *argv]) == EXIT_INVALID


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


class TestVerify:
    def test_suite_passes(self, tmp_path, capsys):
        quarantine = tmp_path / "q.json"
        argv = ["verify", "--dims", "2", "--samples", "50", "--seed", "7", "--no-oracle",
                "--quarantine", str(quarantine)]
        assert main(argv) == EXIT_OK
        out = capsys.readouterr().out
        assert "route-equality" in out
        assert "oracle" not in out
        assert not quarantine.exists()

    def test_with_oracle(self, tmp_path, capsys):
        argv = ["verify", "--dims", "2,3", "--samples", "4", "--seed", "7",
                "--quarantine", str(tmp_path / "q.json")]
        assert main(argv) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        oracle = next(line for line in lines if line.startswith("oracle"))
        assert oracle.split()[1:] == ["8", "0"]

    def test_no_route_disagreement_on_larger_dims(self, tmp_path, capsys):
        argv = ["verify", "--dims", "2,3,4,5", "--samples", "6", "--no-oracle",
                "--quarantine", str(tmp_path / "q.json")]
        assert main(argv) == EXIT_OK
        line = next(x for x in capsys.readouterr().out.splitlines()
                    if x.startswith("route-equality"))
        assert line.split()[2] == "0"

    def test_seed_from_environment(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("SPINCHSH_SEED", "19")
        argv = ["verify", "--dims", "3", "--samples", "2", "--no-oracle",
                "--quarantine", str(tmp_path / "q.json")]
        assert main(argv) == EXIT_OK

    def test_fault_injection_quarantines(self, tmp_path, capsys, transposed_z):
        quarantine = tmp_path / "q.json"
        argv = ["verify", "--dims", "3", "--samples", "4", "--seed", "7", "--no-oracle",
                "--quarantine", str(quarantine)]
        assert main(argv) == EXIT_VERIFY_FAILED
        entries = json.loads(quarantine.read_text())
        assert entries
        first = entries[0]
        assert first["seed"] == 7
        assert first["d"] == 3
        assert "route-equality" in first["failed_checks"]
        assert first["state"]["version"] == 1
        assert len(first["state"]["data"]) == 9

    @pytest.mark.parametrize(
        "argv", [["--dims", "1,2"], ["--dims", "two"], ["--samples", "0"]]
    )
    def test_bad_arguments(self, argv, tmp_path):
        full = ["verify", *argv, "--no-oracle", "--quarantine", str(tmp_path / "q.json")]
        assert main(full) == EXIT_INVALID


class TestTracing:
    def test_commands_are_traced(self, ghz3_file, exporter, capsys):
        main(["analyze", str(ghz3_file), "--route", "definition"])
        names = [s.name for s in exporter.get_finished_spans()]
        assert "spinchsh.cli.analyze" in names
        root = next(s for s in exporter.get_finished_spans() if s.name == "spinchsh.cli.analyze")
        assert root.attributes["spinchsh.result.value"] == EXIT_OK
