"""Textual scalar form, operator JSON files, and TSV tables.

The scalar form is ``p^v*d`` with v the decimal valuation and d the
unit's base-p digits, little-endian; digits are packed for p < 10 and
dot-separated otherwise.  Zero prints as ``0``.  Printing then parsing
reproduces the stored value bit for bit, with the file-level precision
applying to all scalars inside an operator file.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .errors import ParseError
from .scalars import DEFAULT_PRECISION, Padic

_SCALAR_RE = re.compile(r"^(\d+)\^(-?\d+)\*([0-9.]+)$")


def scalar_to_text(x: Padic) -> str:
    if x.is_zero:
        return "0"
    p = x.prime
    digits = []
    u = x.unit
    while u:
        u, r = divmod(u, p)
        digits.append(r)
    if p < 10:
        body = "".join(str(d) for d in digits)
    else:
        body = ".".join(str(d) for d in digits)
    return f"{p}^{x.valuation}*{body}"


def scalar_from_text(text: str, prime: int, precision: int = DEFAULT_PRECISION) -> Padic:
    text = text.strip()
    if text == "0":
        return Padic.zero(prime)
    m = _SCALAR_RE.match(text)
    if not m:
        raise ParseError(f"bad scalar text {text!r}")
    p = int(m.group(1))
    if p != prime:
        raise ParseError(f"scalar prime {p} does not match file prime {prime}")
    val = int(m.group(2))
    body = m.group(3)
    if p < 10:
        if "." in body:
            raise ParseError(f"dot-separated digits need p >= 10: {text!r}")
        digits = [int(ch) for ch in body]
    else:
        digits = [int(part) for part in body.split(".")]
    if any(d >= p for d in digits):
        raise ParseError(f"digit out of range for base {p}: {text!r}")
    unit = 0
    for d in reversed(digits):
        unit = unit * p + d
    if unit == 0 or unit % p == 0:
        raise ParseError(f"unit part must be a p-adic unit: {text!r}")
    if unit >= p**precision:
        raise ParseError(f"unit exceeds the file precision window: {text!r}")
    return Padic(prime, val, unit, precision)


# -- operator files ----------------------------------------------------


def _node_to_obj(op) -> dict[str, Any]:
    from . import operators as ops

    if isinstance(op, ops.FiniteMatrix):
        entries = sorted(op.entries.items())
        return {"kind": "finite", "entries": [[i, j, scalar_to_text(v)] for (i, j), v in entries]}
    if isinstance(op, ops.Diagonal):
        return {
            "kind": "diagonal",
            "entries": [[i, scalar_to_text(v)] for i, v in sorted(op.entries.items())],
            "default": scalar_to_text(op.default),
        }
    if isinstance(op, ops.Identity):
        return {"kind": "identity"}
    if isinstance(op, ops.IndexMap):
        if callable(op.dest):
            raise ParseError("callable-backed index maps have no file form")
        return {
            "kind": "indexmap",
            "dest": [[j, d] for j, d in sorted(op.dest.items())],
            "coeff": [[j, scalar_to_text(v)] for j, v in sorted(op.coeff.items())],
            "default_coeff": scalar_to_text(op.default_coeff),
        }
    if isinstance(op, ops.Sum):
        return {"kind": "sum", "terms": [_node_to_obj(t) for t in op.terms]}
    if isinstance(op, ops.Product):
        return {"kind": "product", "factors": [_node_to_obj(f) for f in op.factors]}
    if isinstance(op, ops.ScalarMul):
        return {"kind": "scalar", "scalar": scalar_to_text(op.scalar), "operand": _node_to_obj(op.operand)}
    if isinstance(op, ops.Adjoint):
        return {"kind": "adjoint", "operand": _node_to_obj(op.operand)}
    raise ParseError(f"cannot serialize operator of type {type(op).__name__}")


def operator_to_obj(op, precision: int | None = None) -> dict[str, Any]:
    obj = {"p": op.prime, "precision": precision if precision is not None else DEFAULT_PRECISION}
    obj.update(_node_to_obj(op))
    return obj


def operator_to_json(op, precision: int | None = None) -> str:
    return json.dumps(operator_to_obj(op, precision), indent=2)


def _obj_to_node(obj: dict[str, Any], prime: int, precision: int):
    from . import operators as ops

    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("operator node must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "finite":
            entries = {}
            for i, j, text in obj.get("entries", []):
                entries[(int(i), int(j))] = scalar_from_text(text, prime, precision)
            return ops.FiniteMatrix(prime, entries)
        if kind == "diagonal":
            entries = {int(i): scalar_from_text(text, prime, precision) for i, text in obj.get("entries", [])}
            default = scalar_from_text(obj.get("default", "0"), prime, precision)
            return ops.Diagonal(prime, entries, default)
        if kind == "identity":
            return ops.Identity(prime, precision)
        if kind == "indexmap":
            dest = {int(j): int(d) for j, d in obj.get("dest", [])}
            coeff = {int(j): scalar_from_text(text, prime, precision) for j, text in obj.get("coeff", [])}
            default = scalar_from_text(obj.get("default_coeff", "0"), prime, precision)
            return ops.IndexMap(prime, dest, coeff, default)
        if kind == "sum":
            return ops.Sum([_obj_to_node(t, prime, precision) for t in obj["terms"]])
        if kind == "product":
            return ops.Product([_obj_to_node(f, prime, precision) for f in obj["factors"]])
        if kind == "scalar":
            return ops.ScalarMul(scalar_from_text(obj["scalar"], prime, precision), _obj_to_node(obj["operand"], prime, precision))
        if kind == "adjoint":
            return ops.Adjoint(_obj_to_node(obj["operand"], prime, precision))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind!r} node: {exc}") from exc
    raise ParseError(f"unknown operator kind {kind!r}")


def operator_from_obj(obj: dict[str, Any]):
    if not isinstance(obj, dict):
        raise ParseError("operator file must hold a JSON object")
    try:
        prime = int(obj["p"])
        precision = int(obj["precision"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed p/precision header: {exc}") from exc
    if precision <= 0:
        raise ParseError("precision must be positive")
    return _obj_to_node(obj, prime, precision)


def operator_from_json(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return operator_from_obj(obj)


# -- Mahler expansions -------------------------------------------------


def mahler_to_obj(fn, prime: int, precision: int | None = None) -> dict[str, Any]:
    return {
        "p": prime,
        "precision": precision if precision is not None else DEFAULT_PRECISION,
        "kind": "mahler",
        "coefficients": [scalar_to_text(c) for c in fn.coefficients],
        "tail_exponent": fn.tail_bound.exponent,
    }


def mahler_from_obj(obj: dict[str, Any]):
    from .mahler import MahlerFunction
    from .scalars import ValuationBound

    try:
        prime = int(obj["p"])
        precision = int(obj["precision"])
        coeffs = tuple(scalar_from_text(t, prime, precision) for t in obj["coefficients"])
        tail = obj.get("tail_exponent")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed mahler object: {exc}") from exc
    bound = ValuationBound(None if tail is None else int(tail))
    return MahlerFunction(prime, coeffs, bound)


# -- tables ------------------------------------------------------------


def tsv_table(header: list[str], rows: list[list[Any]]) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(str(c) for c in row))
    return "\n".join(lines) + "\n"


def exponent_str(bound) -> str:
    """Norm exponent for tables: integer, or 'inf' for the zero norm."""
    return "inf" if bound.exponent is None else str(bound.exponent)
