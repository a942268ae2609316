"""Test the entrypoint module."""

import dataclasses
import io
import os.path
import sys
import unittest.mock

import numpy as np
import pytest  # type: ignore

import qisosm
import qisosm.entrypoint
from qisosm import codec, cqgrep


def run_main(*args):
    """Run the command line with the given arguments, return status and output."""

    with unittest.mock.patch("sys.argv", ["", *args]):
        with unittest.mock.patch("sys.stdout", new_callable=io.StringIO):
            status = qisosm.entrypoint.main()
            output = sys.stdout.getvalue()
    return status, output


def data_path(name):
    return os.path.join(os.path.dirname(qisosm.__file__), "data", name)


class TestCommands:
    def test_no_command(self):
        with unittest.mock.patch("sys.argv", [""]):
            with unittest.mock.patch("sys.stderr", new_callable=io.StringIO):
                assert 1 == qisosm.entrypoint.main()

                lines = sys.stderr.getvalue().splitlines(False)
                assert lines[0] == "No command specified."

    def test_validate(self):
        status, output = run_main("--debug", "validate")
        assert status == qisosm.entrypoint.EXIT_PASSED
        assert output.startswith("validate: passed, ")

    def test_corep_check(self):
        status, output = run_main("corep-check")
        assert status == 0
        assert output.startswith("corep-check: passed")

        path = data_path("ckm_violating_generators.json")
        status, output = run_main("corep-check", "--generators", path)
        assert status == qisosm.entrypoint.EXIT_FAILED
        assert output.startswith("corep-check: FAILED")

    def test_action(self):
        assert run_main("action", "--draws", "1", "--lambda", "5")[0] == 0
        assert run_main("action", "--draws", "1", "--product")[0] == 0
        status, _ = run_main(
            "action", "--draws", "1", "--variant", "plain", "--cutoff", "poly:1,-1"
        )
        assert status == 0

    def test_realform(self):
        assert run_main("realform", "--draws", "1")[0] == 0

    def test_commutant(self):
        assert run_main("commutant", "--draws", "1")[0] == 0


class TestInput:
    def test_invalid_arguments(self):
        assert run_main("validate", "--tol", "-1")[0] == 3
        assert run_main("validate", "--lambda", "0")[0] == 3
        assert run_main("action", "--draws", "0")[0] == 3
        assert run_main("action", "--cutoff", "cubic")[0] == 3

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"n": 3,', encoding="utf-8")
        assert run_main("validate", "--params", str(path))[0] == 3
        assert run_main("validate", "--params", str(tmp_path / "x.json"))[0] == 3

    def test_generation_mismatch(self, tmp_path):
        path = tmp_path / "generators.json"
        path.write_text(
            codec.dumps(codec.generators_to_json(cqgrep.identity_point(2))),
            encoding="utf-8",
        )
        assert run_main("corep-check", "--generators", str(path))[0] == 3

    @pytest.mark.parametrize(
        "entries",
        [
            {"upsNu": 10**400},
            {"upsNu": [1e308, 0.0], "upsE": [1e308, 0.0]},
            {"upsU": [1e200, 0.0]},
        ],
    )
    def test_out_of_range_entries(self, tmp_path, entries):
        """Entries that overflow the checks are invalid input."""

        doc = codec.bundled("sample_params_n3.json")
        for key, value in entries.items():
            doc[key][0][0] = value
        path = tmp_path / "params.json"
        path.write_text(codec.dumps(doc), encoding="utf-8")

        assert run_main("validate", "--params", str(path))[0] == 3
        assert run_main("corep-check", "--params", str(path))[0] == 3

    def test_invalid_parameters(self, tmp_path, sample_params):
        p = dataclasses.replace(
            sample_params, ups_u=np.diag([4.0, 4.0, 6.0]), ckm=None, delta_down=None
        )
        path = tmp_path / "params.json"
        path.write_text(codec.dumps(codec.yukawa_to_json(p)), encoding="utf-8")

        status, output = run_main("validate", "--params", str(path))
        assert status == 2
        assert output.startswith("validate: FAILED")

        out = str(tmp_path)
        status, _ = run_main("corep-check", "--params", str(path), "--out", out)
        assert status == 2
        doc = codec.load_file(str(tmp_path / "corep-check.json"))
        assert not doc["checks"]["params.ups_u.multiplicity_one"]["passed"]


class TestOutput:
    def test_json(self, tmp_path):
        assert run_main("validate", "--out", str(tmp_path), "--seed", "5")[0] == 0
        doc = codec.load_file(str(tmp_path / "validate.json"))
        assert doc["command"] == "validate"
        assert doc["seed"] == 5
        assert doc["passed"]
        assert doc["info"]["axioms.ko_dimension"] == 6
        assert "params.ckm.reconstruction" in doc["checks"]

    def test_csv(self, tmp_path):
        args = ("validate", "--out", str(tmp_path), "--format", "csv")
        assert run_main(*args)[0] == 0
        with open(tmp_path / "validate.csv", encoding="utf-8") as file:
            lines = file.read().splitlines()
        assert lines[0] == "name,value,limit,passed"
        assert all(line.endswith(",True") for line in lines[1:])

    def test_deterministic(self, tmp_path):
        """The same seed gives byte-identical reports."""

        texts = []
        for name in ("a", "b"):
            out = str(tmp_path / name)
            run_main("realform", "--draws", "2", "--seed", "9", "--out", out)
            with open(os.path.join(out, "realform.json"), encoding="utf-8") as file:
                texts.append(file.read())
        assert texts[0] == texts[1]


class TestCutoff:
    def test_parse(self):
        f = qisosm.entrypoint.parse_cutoff("poly:1,-1", 2.0)
        assert f.kind == "poly"
        assert f.coefficients == (1.0, -1.0)
        assert f.scale == 2.0

        f = qisosm.entrypoint.parse_cutoff("table:0:1,2:0")
        assert f.points == ((0.0, 1.0), (2.0, 0.0))
        assert qisosm.entrypoint.parse_cutoff("gaussian").kind == "gaussian"

    @pytest.mark.parametrize(
        "text", ["cubic", "gaussian:1", "poly:", "poly:a", "table:1", "table:1:0"]
    )
    def test_errors(self, text):
        with pytest.raises(qisosm.InputError):
            qisosm.entrypoint.parse_cutoff(text)
