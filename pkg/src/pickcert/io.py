"""JSON and CSV interchange formats.

Complex numbers are always written as ``{"re": x, "im": y}``. Python's
``json`` writes floats with ``repr``, so finite doubles round-trip
bit-exactly. Loaders check structure with JSON Schema and then rebuild the
objects through their validating constructors.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import jsonschema

from .errors import SchemaError
from .geometry import NodeConfig, generate_nodes
from .pick import PickProblem
from .polynomial import MultiPoly
from .rif import OneVarRational, is_inner_1d, make_rif

CSV_VERSION = 1

COMPLEX = {
    "type": "object",
    "required": ["re", "im"],
    "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
    "additionalProperties": False,
}

POLY_SCHEMA = {
    "type": "object",
    "required": ["nvars", "terms"],
    "properties": {
        "nvars": {"type": "integer", "minimum": 1},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exp", "re", "im"],
                "properties": {
                    "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "re": {"type": "number"},
                    "im": {"type": "number"},
                },
                "additionalProperties": False,
            },
        },
    },
}

RIF_SCHEMA = {
    "type": "object",
    "required": ["tau", "d", "q"],
    "properties": {
        "tau": COMPLEX,
        "d": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "q": POLY_SCHEMA,
    },
}

GRID_SCHEMA = {
    "type": "object",
    "required": ["N", "n", "tau_table", "base_points", "nodes"],
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "tau_table": {"type": "array", "items": {"type": "array", "items": COMPLEX}},
        "base_points": {"type": "array", "items": {"type": "array", "items": COMPLEX}},
        "nodes": {"type": "array", "items": {"type": "array", "items": COMPLEX}},
    },
}

PICK_SCHEMA = {
    "type": "object",
    "required": ["nodes", "targets"],
    "properties": {
        "nodes": {"type": "array", "items": COMPLEX},
        "targets": {"type": "array", "items": COMPLEX},
    },
}

ONEVAR_SCHEMA = {
    "type": "object",
    "required": ["num", "den"],
    "properties": {"num": POLY_SCHEMA, "den": POLY_SCHEMA, "inner": {"type": "boolean"}},
}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["schema", "version", "semantics", "N", "n", "tolerances", "per_disc", "cross_checks", "overall"],
    "properties": {
        "schema": {"const": "pickcert.certificate"},
        "version": {"type": "integer"},
        "N": {"type": "integer"},
        "n": {"type": "integer"},
        "overall": {"type": "boolean"},
        "per_disc": {"type": "array", "items": {"type": "object", "required": ["disc", "eigenvalues", "passed"]}},
        "cross_checks": {"type": "array"},
    },
}


def _validate(obj, schema):
    validator = jsonschema.Draft202012Validator(schema)
    err = next(iter(sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))), None)
    if err is not None:
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise SchemaError(err.message, path)


def c2j(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def j2c(obj) -> complex:
    return complex(obj["re"], obj["im"])


def poly_to_json(p: MultiPoly) -> dict:
    return {
        "nvars": p.nvars,
        "terms": [{"exp": list(e), "re": c.real, "im": c.imag} for e, c in p.sorted_terms()],
    }


def poly_from_json(obj) -> MultiPoly:
    _validate(obj, POLY_SCHEMA)
    n = obj["nvars"]
    table = {}
    for i, term in enumerate(obj["terms"]):
        exp = tuple(term["exp"])
        if len(exp) != n:
            raise SchemaError(f"exponent length {len(exp)} != nvars {n}", f"$.terms[{i}].exp")
        if exp in table:
            raise SchemaError("duplicate exponent", f"$.terms[{i}].exp")
        table[exp] = complex(term["re"], term["im"])
    return MultiPoly(n, table)


def rif_to_json(f) -> dict:
    return {"tau": c2j(f.tau), "d": list(f.d), "q": poly_to_json(f.q)}


def rif_from_json(obj):
    _validate(obj, RIF_SCHEMA)
    return make_rif(j2c(obj["tau"]), obj["d"], poly_from_json(obj["q"]))


def onevar_to_json(g: OneVarRational) -> dict:
    return {"num": poly_to_json(g.num), "den": poly_to_json(g.den), "inner": g.inner}


def onevar_from_json(obj) -> OneVarRational:
    _validate(obj, ONEVAR_SCHEMA)
    num, den = poly_from_json(obj["num"]), poly_from_json(obj["den"])
    return OneVarRational(num, den, is_inner_1d(num, den))


def grid_to_json(grid) -> dict:
    return {
        "N": grid.N,
        "n": grid.n,
        "tau_table": [[c2j(c) for c in row] for row in grid.tau_table],
        "base_points": [[c2j(z) for z in row] for row in grid.base_points],
        "nodes": [[c2j(z) for z in node] for node in grid.nodes],
    }


def grid_from_json(obj):
    """Rebuild a grid from its multipliers and base points and check the stored nodes."""
    _validate(obj, GRID_SCHEMA)
    config = NodeConfig(
        tau_table=tuple(tuple(j2c(c) for c in row) for row in obj["tau_table"]),
        base_points=tuple(tuple(j2c(z) for z in row) for row in obj["base_points"]),
    )
    grid = generate_nodes(obj["N"], obj["n"], config)
    stored = [tuple(j2c(z) for z in node) for node in obj["nodes"]]
    if len(stored) != len(grid.nodes):
        raise SchemaError(f"expected {len(grid.nodes)} nodes, found {len(stored)}", "$.nodes")
    for i, (a, b) in enumerate(zip(stored, grid.nodes)):
        if len(a) != len(b) or max(abs(x - y) for x, y in zip(a, b)) > 1e-14:
            raise SchemaError("node is not the image of its base point under its disc", f"$.nodes[{i}]")
    return grid


def pick_problem_to_json(p: PickProblem) -> dict:
    return {"nodes": [c2j(z) for z in p.nodes], "targets": [c2j(w) for w in p.targets]}


def pick_problem_from_json(obj) -> PickProblem:
    _validate(obj, PICK_SCHEMA)
    return PickProblem(tuple(j2c(z) for z in obj["nodes"]), tuple(j2c(w) for w in obj["targets"]))


def verdict_to_json(pm, verdict) -> dict:
    return {
        "verdict": verdict.label,
        "solvable": verdict.solvable,
        "unique": verdict.unique,
        "min_eigenvalue": verdict.min_eigenvalue,
        "smallest_relative_eigenvalue": verdict.smallest_relative_eigenvalue,
        "rank_estimate": pm.rank_estimate,
        "spectrum": [float(x) for x in pm.eigenvalues],
        "tolerances": {"tol_psd": verdict.tolerances.tol_psd, "tol_rank": verdict.tolerances.tol_rank},
    }


def certificate_to_json(cert, f=None, grid=None) -> dict:
    out = cert.to_dict()
    if f is not None:
        out["rif"] = rif_to_json(f)
    if grid is not None:
        out["grid"] = grid_to_json(grid)
    return out


def validate_certificate_json(obj) -> dict:
    _validate(obj, CERTIFICATE_SCHEMA)
    if "rif" in obj:
        rif_from_json(obj["rif"])
    if "grid" in obj:
        grid_from_json(obj["grid"])
    return obj


def certificate_csv(cert) -> str:
    buf = _io.StringIO()
    buf.write(f"# pickcert certificate csv v{CSV_VERSION}: disc,eigenvalues,residual\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["disc", "eigenvalues", "residual"])
    for disc, evals, resid in cert.csv_rows():
        writer.writerow([disc, ";".join(repr(float(x)) for x in evals), "" if resid is None else repr(resid)])
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "$") from exc
