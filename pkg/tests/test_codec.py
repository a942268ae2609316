"""Test the JSON and CSV encodings."""

import dataclasses
import math

import numpy as np
import pytest  # type: ignore

import qisosm
from qisosm import action, codec, common, cqgrep
from qisosm.smtriple import Isospin


class TestScalars:
    def test_decode_complex(self):
        assert codec.decode_complex([1, -2.5]) == 1 - 2.5j
        assert codec.decode_complex(3) == 3
        assert codec.encode_complex(1j) == [0.0, 1.0]

    @pytest.mark.parametrize("value", [True, "1", [1], [1, 2, 3], [1, None], None])
    def test_malformed(self, value):
        with pytest.raises(qisosm.InputError):
            codec.decode_complex(value)

    def test_not_finite(self):
        with pytest.raises(qisosm.InputError, match="not finite"):
            codec.decode_complex([math.nan, 0])
        with pytest.raises(qisosm.InputError, match="too large"):
            codec.decode_complex([10**400, 0])

    def test_matrix(self):
        m = codec.decode_matrix([[[1, 0], 2], [[0, 1], [0, -1]]], shape=(2, 2))
        np.testing.assert_array_equal(m, [[1, 2], [1j, -1j]])

        with pytest.raises(qisosm.InputError, match="list of rows"):
            codec.decode_matrix([1, 2])
        with pytest.raises(qisosm.InputError, match="different lengths"):
            codec.decode_matrix([[1, 2], [3]])
        with pytest.raises(qisosm.InputError, match="expected shape"):
            codec.decode_matrix([[1, 2]], shape=(2, 2))
        with pytest.raises(qisosm.InputError, match=r"m\[0\]\[1\]"):
            codec.decode_matrix([[1, "x"]], "m")


class TestParameters:
    def test_round_trip(self, sample_params):
        """Encoding a decoded document reproduces it."""

        doc = codec.bundled("sample_params_n3.json")
        text = codec.dumps(doc)
        p = codec.yukawa_from_json(codec.loads(text))
        assert codec.dumps(codec.yukawa_to_json(p)) == text
        np.testing.assert_allclose(p.ups_d, sample_params.ups_d)

    def test_ups_d(self, sample_params):
        """Without a CKM matrix Υ_d is written directly."""

        p = dataclasses.replace(sample_params, ckm=None, delta_down=None)
        doc = codec.yukawa_to_json(p)
        assert "upsD" in doc and "ckm" not in doc
        decoded = codec.yukawa_from_json(doc)
        np.testing.assert_array_equal(decoded.ups_d, p.ups_d)
        assert decoded.ckm is None

    def test_errors(self):
        doc = codec.bundled("sample_params_n3.json")

        missing = {k: v for k, v in doc.items() if k != "upsE"}
        with pytest.raises(qisosm.InputError, match="missing key"):
            codec.yukawa_from_json(missing)

        with pytest.raises(qisosm.InputError, match="schemaVersion"):
            codec.yukawa_from_json({**doc, "schemaVersion": 2})

        with pytest.raises(qisosm.InputError, match="deltaDown"):
            codec.yukawa_from_json({**doc, "deltaDown": [1.0, 2.0]})

        with pytest.raises(qisosm.InputError, match="positive integer"):
            codec.yukawa_from_json({**doc, "n": 0})

        with pytest.raises(qisosm.InputError, match="expected shape"):
            codec.yukawa_from_json({**doc, "n": 2})

        with pytest.raises(qisosm.InputError):
            codec.yukawa_from_json([doc])


class TestGenerators:
    def test_round_trip(self, half_liberated):
        """Generators survive the text representation exactly."""

        text = codec.dumps(codec.generators_to_json(half_liberated))
        g = codec.generators_from_json(codec.loads(text))
        assert (g.n, g.aux_dim) == (3, 2)
        np.testing.assert_array_equal(g.x, half_liberated.x)
        np.testing.assert_array_equal(g.t, half_liberated.t)
        np.testing.assert_array_equal(g.v, half_liberated.v)

    def test_bundled(self):
        """The shipped identity point is the trivial representation."""

        g = codec.generators_from_json(codec.bundled("identity_generators.json"))
        np.testing.assert_array_equal(g.t, cqgrep.identity_point(3).t)

    def test_errors(self):
        doc = codec.generators_to_json(cqgrep.identity_point(2, 2))

        with pytest.raises(qisosm.InputError, match="expected 3 matrices"):
            codec.generators_from_json({**doc, "x": doc["x"][:2]})

        block = {**doc["t"][0], "blockDim": 1}
        with pytest.raises(qisosm.InputError, match="blockDim"):
            codec.generators_from_json({**doc, "t": [block, doc["t"][1]]})

        with pytest.raises(qisosm.InputError, match="grid"):
            codec.generators_from_json({**doc, "v": doc["t"][0]})

        v = {k: val for k, val in doc["v"].items() if k != "data"}
        with pytest.raises(qisosm.InputError, match="missing key"):
            codec.generators_from_json({**doc, "v": v})


class TestDocuments:
    def test_loads(self):
        with pytest.raises(qisosm.InputError) as excinfo:
            codec.loads('{\n  "n": }')
        assert excinfo.value.line == 2
        assert "Malformed JSON" in str(excinfo.value)

    def test_dumps(self):
        text = codec.dumps({"b": 1, "a": [1, 2]})
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')

        with pytest.raises(ValueError):
            codec.dumps({"x": math.inf})

    def test_load_file(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"n": 3}', encoding="utf-8")
        assert codec.load_file(str(path)) == {"n": 3}

        with pytest.raises(qisosm.InputError, match="Unable to read"):
            codec.load_file(str(tmp_path / "missing.json"))


class TestReports:
    def test_jsonable(self):
        """Report values become plain JSON."""

        value = {
            "nan": math.nan,
            "inf": -np.inf,
            "z": 1 + 2j,
            "array": np.arange(2),
            "isospin": Isospin.DOWN,
            "flag": np.float64(0.5),
        }
        assert codec._jsonable(value) == {
            "nan": "NaN",
            "inf": "-Infinity",
            "z": [1.0, 2.0],
            "array": [0, 1],
            "isospin": "DOWN",
            "flag": 0.5,
        }

        with pytest.raises(TypeError):
            codec._jsonable(object())

    def test_report_to_json(self):
        report = common.CheckReport(tolerance=1e-9)
        report.add("unitary", 1e-12, 1e-9)
        report.info["n"] = 3
        doc = codec.report_to_json(report, "validate", 7)

        assert doc["command"] == "validate"
        assert doc["seed"] == 7
        assert doc["schemaVersion"] == 1
        assert doc["passed"]
        assert doc["checks"]["unitary"]["limit"] == 1e-9
        assert doc["info"] == {"n": 3}

    def test_extra_fields(self):
        """Fields of report subclasses are written to the info section."""

        report = action.ActionReport(sb=2.0, sf=1j, spectrum=[0.5])
        doc = codec.report_to_json(report, "action", 0)
        assert doc["info"] == {"sb": 2.0, "sf": [0.0, 1.0], "spectrum": [0.5]}
        codec.dumps(doc)

    def test_csv(self):
        report = common.CheckReport()
        report.add("a", 0.5, 1.0)
        report.add_condition("b", 1.0, False)
        text = codec.report_to_csv(codec.report_to_json(report, "suite", 0))
        assert text.splitlines() == [
            "name,value,limit,passed",
            "a,0.5,1.0,True",
            "b,1.0,,False",
        ]
