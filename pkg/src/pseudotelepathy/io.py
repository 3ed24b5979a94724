"""JSON documents for games, Bell expressions, strategies and reports.

Game document::

    {
      "m_A": 2,
      "m_B": 2,
      "n_A": 2,
      "n_B": 2,
      "winning": [
        [0, 0, 0, 0],
        [0, 0, 1, 1]
      ]
    }

Winning quadruples are ``[x, y, a, b]``; unlisted quadruples lose. The
canonical form has exactly these keys in this order, quadruples sorted and
de-duplicated, one per line, two-space indentation and a final newline.

Expression document::

    {
      "params": [3, 3, 4, 4],
      "bound": "8/1",
      "terms": [
        [0, 0, 0, 0, "1/1"]
      ]
    }

Rationals are written ``"p/q"``; plain integers are accepted on input.
Floats are written with 17 significant digits.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bell import BellExpression
from .errors import FormatError
from .games import GameRelation
from .polytope import FacetCertificate, PolytopeParams
from .quantum import ProjectiveMeasurement, QuantumStrategy, StateVector

GAME_KEYS = ("m_A", "m_B", "n_A", "n_B", "winning")
EXPRESSION_KEYS = ("params", "bound", "terms")


def format_fraction(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def parse_fraction(v) -> Fraction:
    if isinstance(v, bool):
        raise ValueError(f"not a rational: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise ValueError(f"not a rational: {v!r}")


def format_float(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite float {v}")
    return format(v, ".17g")


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return json.dumps(format_fraction(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _is_scalar(v) -> bool:
    return not isinstance(v, (dict, list, tuple, np.ndarray))


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with exact rationals as ``"p/q"`` and floats at 17 digits.

    Lists of scalars stay on one line.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(_is_scalar(v) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    return _scalar(obj)


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from None


def _locate(text: str, key: str, index: int | None = None) -> tuple[int | None, int | None]:
    """Best-effort line/column of a top-level field, or of element ``index`` of its list."""
    pos = text.find(json.dumps(key))
    if pos < 0:
        return None, None
    if index is not None:
        start = text.find("[", pos)
        depth, seen = 0, -1
        for i in range(start, len(text)):
            ch = text[i]
            if ch == "[":
                depth += 1
                if depth == 2:
                    seen += 1
                    if seen == index:
                        pos = i
                        break
            elif ch == "]":
                depth -= 1
                if depth == 0:
                    break
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column


def _fail(text: str, message: str, key: str, index: int | None = None):
    raise FormatError(message, *_locate(text, key, index))


def _int_field(text: str, doc: dict, key: str, minimum: int = 0) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        _fail(text, f"field {key!r} must be an integer >= {minimum}, got {v!r}", key)
    return v


# -- games -----------------------------------------------------------------

def parse_game(text: str) -> GameRelation:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise FormatError("game document must be a JSON object", 1, 1)
    unknown = set(doc) - set(GAME_KEYS)
    if unknown:
        _fail(text, f"unknown fields {sorted(unknown)}", sorted(unknown)[0])
    m_a, m_b, n_a, n_b = (_int_field(text, doc, k, 1) for k in GAME_KEYS[:4])
    winning = doc.get("winning")
    if not isinstance(winning, list):
        _fail(text, "field 'winning' must be a list of [x, y, a, b]", "winning")
    quads = []
    for i, q in enumerate(winning):
        if not (isinstance(q, list) and len(q) == 4 and all(isinstance(v, int) and not isinstance(v, bool) for v in q)):
            _fail(text, f"winning[{i}] must be four integers, got {q!r}", "winning", i)
        x, y, a, b = q
        if not (0 <= x < m_a and 0 <= y < m_b and 0 <= a < n_a and 0 <= b < n_b):
            _fail(text, f"winning[{i}] = {q} is out of range", "winning", i)
        quads.append(q)
    return GameRelation.from_quadruples(m_a, m_b, n_a, n_b, quads)


def serialize_game(game: GameRelation) -> str:
    doc = {
        "m_A": game.m_a,
        "m_B": game.m_b,
        "n_A": game.n_a,
        "n_B": game.n_b,
        "winning": [list(q) for q in game.quadruples()],
    }
    return dumps(doc) + "\n"


def load_game(path) -> GameRelation:
    return parse_game(Path(path).read_text())


# -- expressions -----------------------------------------------------------

def parse_expression(text: str) -> BellExpression:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise FormatError("expression document must be a JSON object", 1, 1)
    unknown = set(doc) - set(EXPRESSION_KEYS)
    if unknown:
        _fail(text, f"unknown fields {sorted(unknown)}", sorted(unknown)[0])
    params = doc.get("params")
    if not (isinstance(params, list) and len(params) == 4 and all(isinstance(v, int) and v >= 1 for v in params)):
        _fail(text, f"field 'params' must be four positive integers, got {params!r}", "params")
    params = PolytopeParams(*params)
    try:
        bound = parse_fraction(doc.get("bound"))
    except (ValueError, ZeroDivisionError) as exc:
        _fail(text, f"field 'bound': {exc}", "bound")
    terms = doc.get("terms")
    if not isinstance(terms, list):
        _fail(text, "field 'terms' must be a list of [x, y, a, b, value]", "terms")
    parsed = []
    for i, t in enumerate(terms):
        if not (isinstance(t, list) and len(t) == 5 and all(isinstance(v, int) for v in t[:4])):
            _fail(text, f"terms[{i}] must be [x, y, a, b, value], got {t!r}", "terms", i)
        if not all(0 <= v < n for v, n in zip(t[:4], params.shape)):
            _fail(text, f"terms[{i}] = {t} is out of range", "terms", i)
        try:
            parsed.append((*t[:4], parse_fraction(t[4])))
        except (ValueError, ZeroDivisionError) as exc:
            _fail(text, f"terms[{i}]: {exc}", "terms", i)
    return BellExpression.from_terms(params, parsed, bound)


def serialize_expression(expr: BellExpression) -> str:
    doc = {
        "params": list(expr.params.shape),
        "bound": expr.local_bound,
        "terms": [[x, y, a, b, v] for x, y, a, b, v in expr.terms()],
    }
    return dumps(doc) + "\n"


def load_expression(path) -> BellExpression:
    return parse_expression(Path(path).read_text())


# -- certificates and matrices ---------------------------------------------

def certificate_document(expr: BellExpression, cert: FacetCertificate, name: str | None = None) -> dict:
    return {
        "expression": name if name is not None else "custom",
        "params": list(expr.params.shape),
        "bound": expr.local_bound,
        "vertex_count": cert.vertex_count,
        "rank": cert.rank,
        "dimension": cert.dimension,
        "total_vertices": cert.total_vertices,
        "verdict": cert.verdict,
        "reason": cert.reason,
    }


def format_integer_matrix(matrix) -> str:
    """One row per line, entries separated by single spaces."""
    return "".join(" ".join(str(int(v)) for v in row) + "\n" for row in matrix)


def parse_integer_matrix(text: str) -> list[list[int]]:
    return [[int(v) for v in line.split()] for line in text.splitlines() if line.strip()]


# -- quantum strategies ----------------------------------------------------

def _complex_pairs(arr) -> list:
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return [[float(v.real), float(v.imag)] for v in arr]
    return [_complex_pairs(row) for row in arr]


def _label(v):
    return list(v) if isinstance(v, tuple) else v


def strategy_document(strategy: QuantumStrategy) -> dict:
    def measurement(m: ProjectiveMeasurement):
        return {"outcomes": [{"label": _label(lab), "projector": _complex_pairs(p)} for lab, p in m.outcomes]}

    return {
        "state": {"dims": list(strategy.state.dims), "amplitudes": _complex_pairs(strategy.state.amplitudes)},
        "alice": [measurement(m) for m in strategy.alice],
        "bob": [measurement(m) for m in strategy.bob],
    }


def parse_strategy(text: str) -> QuantumStrategy:
    doc = _load_json(text)

    def cplx(pairs):
        arr = np.asarray(pairs, dtype=float)
        return arr[..., 0] + 1j * arr[..., 1]

    def label(v):
        return tuple(v) if isinstance(v, list) else v

    def measurement(m):
        return ProjectiveMeasurement(tuple((label(o["label"]), cplx(o["projector"])) for o in m["outcomes"]))

    try:
        state = StateVector(cplx(doc["state"]["amplitudes"]), tuple(doc["state"]["dims"]))
        return QuantumStrategy(state, [measurement(m) for m in doc["alice"]], [measurement(m) for m in doc["bob"]])
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"malformed strategy document: {exc!r}") from None
