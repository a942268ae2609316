"""Serialization of parameters, generators and reports.

Complex scalars are two-element arrays [re, im], matrices are row-major
nested arrays of such scalars and block matrices are objects with the
keys 'blockDim', 'rows', 'cols' and 'data' (the full matrix). Every
document carries a 'schemaVersion' field.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import importlib.resources
import io
import json
import math
from typing import Any, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from . import common, cqgrep, numlin, smtriple
from .log import logger

Json = Any

# Report fields too large for a report file.
_OMITTED_FIELDS = frozenset({"tolerance", "checks", "info", "basis"})


def encode_complex(z: complex) -> list[float]:
    """Encode a complex number as [re, im]."""
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(value: Json, name: str = "value") -> complex:
    """Decode [re, im], a plain real number is accepted as well.

    :raises InputError: If the value is not of that form or not finite.
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        parts = [value, 0.0]
    elif (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        parts = value
    else:
        raise common.InputError(f"{name}: expected [re, im], got {value!r}.")
    try:
        z = complex(float(parts[0]), float(parts[1]))
    except OverflowError:
        raise common.InputError(f"{name}: entry is too large for a float.") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise common.InputError(f"{name}: entry {value!r} is not finite.")
    return z


def encode_matrix(a: npt.ArrayLike) -> list[list[list[float]]]:
    """Encode a matrix as row-major nested arrays of [re, im]."""
    m = np.asarray(a, dtype=np.complex128)
    return [[encode_complex(z) for z in row] for row in m]


def decode_matrix(
    value: Json, name: str = "matrix", shape: tuple[int, int] | None = None
) -> common.CMatrix:
    """Decode a matrix, optionally checking its shape.

    :raises InputError: If the value is malformed or has the wrong shape.
    """
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise common.InputError(f"{name}: expected a list of rows.")
    rows = len(value)
    cols = len(value[0]) if rows else 0
    if any(len(r) != cols for r in value):
        raise common.InputError(f"{name}: rows have different lengths.")
    if shape is not None and (rows, cols) != shape:
        raise common.InputError(
            f"{name}: expected shape {shape}, got {(rows, cols)}."
        )
    m = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(value):
        for j, entry in enumerate(row):
            m[i, j] = decode_complex(entry, f"{name}[{i}][{j}]")
    return m


def encode_block(b: numlin.BlockMatrix) -> dict[str, Json]:
    """Encode a block matrix."""
    return {
        "blockDim": b.block_dim,
        "rows": b.block_rows,
        "cols": b.block_cols,
        "data": encode_matrix(b.data),
    }


def decode_block(
    value: Json,
    name: str = "block",
    rows: int | None = None,
    block_dim: int | None = None,
) -> numlin.BlockMatrix:
    """Decode a block matrix, optionally checking the grid and block size.

    :raises InputError: If the value is malformed or has the wrong size.
    """
    if not isinstance(value, dict):
        raise common.InputError(f"{name}: expected an object.")
    try:
        d = _positive_integer(value["blockDim"], f"{name}.blockDim")
        r = _positive_integer(value["rows"], f"{name}.rows")
        c = _positive_integer(value["cols"], f"{name}.cols")
        data = value["data"]
    except KeyError as e:
        raise common.InputError(f"{name}: missing key {e}.")
    if rows is not None and (r, c) != (rows, rows):
        raise common.InputError(
            f"{name}: expected a {rows}x{rows} grid, got {r}x{c}."
        )
    if block_dim is not None and d != block_dim:
        raise common.InputError(
            f"{name}: expected blockDim {block_dim}, got {d}."
        )
    m = decode_matrix(data, f"{name}.data", (r * d, c * d))
    return numlin.BlockMatrix.from_matrix(m, d)


def _positive_integer(value: Json, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise common.InputError(
            f'Unable to convert "{name}" value {value!r} to a positive integer.'
        )
    return value


def _check_schema(doc: Json, kind: str) -> dict[str, Json]:
    if not isinstance(doc, dict):
        raise common.InputError(f"{kind}: expected a JSON object.")
    version = doc.get("schemaVersion", common.SCHEMA_VERSION)
    if version != common.SCHEMA_VERSION:
        raise common.InputError(
            f"{kind}: unsupported schemaVersion {version!r}, "
            f"expected {common.SCHEMA_VERSION}."
        )
    return doc


def yukawa_to_json(p: smtriple.YukawaSet) -> dict[str, Json]:
    """Encode a set of Yukawa matrices.

    If the CKM matrix is known it is written with the diagonal of δ_↓
    instead of Υ_d.
    """
    doc: dict[str, Json] = {
        "schemaVersion": common.SCHEMA_VERSION,
        "n": p.n,
        "upsNu": encode_matrix(p.ups_nu),
        "upsE": encode_matrix(p.ups_e),
        "upsU": encode_matrix(p.ups_u),
        "upsR": encode_matrix(p.ups_r),
    }
    if p.ckm is not None and p.delta_down is not None:
        doc["ckm"] = encode_matrix(p.ckm)
        doc["deltaDown"] = [float(x) for x in p.delta_down]
    else:
        doc["upsD"] = encode_matrix(p.ups_d)
    return doc


def yukawa_from_json(doc: Json) -> smtriple.YukawaSet:
    """Decode a set of Yukawa matrices.

    :raises InputError: If a field is missing or has the wrong size.
    """
    doc = _check_schema(doc, "params")
    try:
        n = _positive_integer(doc["n"], "n")
        shape = (n, n)
        mats = {
            key: decode_matrix(doc[key], key, shape)
            for key in ("upsNu", "upsE", "upsU", "upsR")
        }
        if "ckm" in doc:
            ckm = decode_matrix(doc["ckm"], "ckm", shape)
            delta = doc["deltaDown"]
            if not isinstance(delta, list) or len(delta) != n:
                raise common.InputError(
                    f"deltaDown: expected {n} entries, got {delta!r}."
                )
            values = [decode_complex(x, "deltaDown") for x in delta]
            if any(v.imag != 0 for v in values):
                raise common.InputError("deltaDown: entries must be real.")
            return smtriple.YukawaSet.from_ckm(
                mats["upsNu"],
                mats["upsE"],
                mats["upsU"],
                ckm,
                [v.real for v in values],
                mats["upsR"],
            )
        ups_d = decode_matrix(doc["upsD"], "upsD", shape)
    except KeyError as e:
        raise common.InputError(f"params: missing key {e}.")
    return smtriple.YukawaSet(
        n, mats["upsNu"], mats["upsE"], mats["upsU"], ups_d, mats["upsR"]
    )


def generators_to_json(g: cqgrep.RepresentedGenerators) -> dict[str, Json]:
    """Encode represented generators."""
    return {
        "schemaVersion": common.SCHEMA_VERSION,
        "n": g.n,
        "auxDim": g.aux_dim,
        "x": [encode_matrix(xk) for xk in g.x],
        "t": [encode_block(g.t_block(m)) for m in range(g.n)],
        "v": encode_block(g.v_block()),
    }


def generators_from_json(doc: Json) -> cqgrep.RepresentedGenerators:
    """Decode represented generators.

    :raises InputError: If a field is missing or has the wrong size.
    """
    doc = _check_schema(doc, "generators")
    try:
        n = _positive_integer(doc["n"], "n")
        d = _positive_integer(doc["auxDim"], "auxDim")
        x, t = doc["x"], doc["t"]
        if not isinstance(x, list) or len(x) != n + 1:
            raise common.InputError(f"x: expected {n + 1} matrices.")
        if not isinstance(t, list) or len(t) != n:
            raise common.InputError(f"t: expected {n} block matrices.")
        xs = [decode_matrix(xk, f"x[{k}]", (d, d)) for k, xk in enumerate(x)]
        ts = [decode_block(tm, f"t[{m}]", 3, d) for m, tm in enumerate(t)]
        v = decode_block(doc["v"], "v", n, d)
    except KeyError as e:
        raise common.InputError(f"generators: missing key {e}.")
    return cqgrep.RepresentedGenerators.from_blocks(xs, ts, v)


def _jsonable(value: Any) -> Json:
    """Convert report values into plain JSON values.

    Non-finite floats become the strings "NaN", "Infinity" and "-Infinity".
    """
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, enum.Enum):
        return value.name
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return x
    if isinstance(value, (complex, np.complexfloating)):
        return [_jsonable(complex(value).real), _jsonable(complex(value).imag)]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _jsonable(dataclasses.asdict(value))
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, Sequence):
        return [_jsonable(v) for v in value]
    raise TypeError(f"Value of type {type(value).__name__} is not serializable.")


def report_to_json(
    report: common.CheckReport, command: str, seed: int
) -> dict[str, Json]:
    """Encode a report together with the command and seed it came from."""
    doc = report.to_dict()
    extra = {
        f.name: getattr(report, f.name)
        for f in dataclasses.fields(report)
        if f.name not in _OMITTED_FIELDS
    }
    if extra:
        doc["info"] = {**doc["info"], **extra}
    doc.update(
        {"schemaVersion": common.SCHEMA_VERSION, "command": command, "seed": seed}
    )
    return _jsonable(doc)


def report_to_csv(doc: Mapping[str, Json]) -> str:
    """One row per check, columns name, value, limit and passed."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["name", "value", "limit", "passed"])
    for name, check in doc["checks"].items():
        limit = "" if check["limit"] is None else check["limit"]
        writer.writerow([name, check["value"], limit, check["passed"]])
    return out.getvalue()


def dumps(doc: Json) -> str:
    """Serialize with sorted keys and two-space indent, ending in a newline."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads(text: str) -> Json:
    """Parse a JSON document.

    :raises InputError: With line and column if the text is malformed.
    """
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise common.InputError(f"Malformed JSON: {e.msg}", e.lineno, e.colno)


def load_file(path: str) -> Json:
    """Read and parse a JSON file.

    :raises InputError: If the file can not be read or parsed.
    """
    logger.debug(f"Reading '{path}'...")
    try:
        with open(path, encoding="utf-8") as file:
            text = file.read()
    except OSError as e:
        raise common.InputError(f"Unable to read '{path}': {e}")
    return loads(text)


def bundled(name: str) -> Json:
    """Parse one of the fixtures shipped in the package's data directory."""
    resource = importlib.resources.files("qisosm") / "data" / name
    return loads(resource.read_text(encoding="utf-8"))
