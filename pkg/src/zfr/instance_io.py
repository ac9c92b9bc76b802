"""Reading and writing instance files.

Format::

    {"name": "zeta_chi_-4", "degree": 2, "conductor": 4,
     "kappas": [[0, 0], [1, 0]], "pole_order": 1, "root_number": [1, 0],
     "coeff_source": {"type": "product", "factors": [
         {"type": "zeta"}, {"type": "kronecker", "discriminant": -4}]}}

Sources: ``zeta``; ``dirichlet`` (``modulus``, ``index``); ``kronecker``
(``discriminant``); ``product`` (``factors``); ``satake`` (``primes``, a map
from prime to a list of ``[re, im]`` pairs).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from jsonschema import Draft202012Validator

from .dirichlet_chars import CharacterError, DirichletCharacter, kronecker_character
from .lfunc_model import (
    CharacterSource,
    ClassAxiomError,
    LFunctionInstance,
    ProductSource,
    SatakeSource,
    ZetaSource,
)

__all__ = ["InstanceParseError", "instance_from_dict", "instance_to_dict", "parse_instance", "write_instance"]

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}


def _variant(kind: str, props: dict, required: list[str]) -> dict:
    return {
        "if": {"properties": {"type": {"const": kind}}, "required": ["type"]},
        "then": {
            "properties": {"type": {}, **props},
            "required": required,
            "additionalProperties": False,
        },
    }


SOURCE_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["zeta", "dirichlet", "kronecker", "product", "satake"]}},
    "allOf": [
        _variant("zeta", {}, []),
        _variant(
            "dirichlet",
            {"modulus": {"type": "integer", "minimum": 1}, "index": {"type": "array", "items": {"type": "integer"}}},
            ["modulus", "index"],
        ),
        _variant("kronecker", {"discriminant": {"type": "integer"}}, ["discriminant"]),
        _variant("product", {"factors": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/source"}}}, ["factors"]),
        _variant(
            "satake",
            {
                "primes": {
                    "type": "object",
                    "minProperties": 1,
                    "propertyNames": {"pattern": "^[0-9]+$"},
                    "additionalProperties": {"type": "array", "minItems": 1, "items": _PAIR},
                }
            },
            ["primes"],
        ),
    ],
}

INSTANCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "degree", "conductor", "kappas", "pole_order", "root_number", "coeff_source"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "degree": {"type": "integer", "minimum": 1},
        "conductor": {"type": "integer", "minimum": 1},
        "kappas": {"type": "array", "items": _PAIR},
        "pole_order": {"type": "integer"},
        "root_number": _PAIR,
        "coeff_source": {"$ref": "#/$defs/source"},
    },
    "$defs": {"source": SOURCE_SCHEMA},
}

_VALIDATOR = Draft202012Validator(INSTANCE_SCHEMA)


class InstanceParseError(ValueError):
    """Instance file rejected; ``errors`` holds (json pointer, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]], source: str = ""):
        self.errors = errors
        where = f"{source}: " if source else ""
        super().__init__(where + "; ".join(f"{p or '/'}: {m}" for p, m in errors))


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def _build_source(node: dict, ptr: str):
    kind = node["type"]
    try:
        if kind == "zeta":
            return ZetaSource()
        if kind == "dirichlet":
            return CharacterSource(DirichletCharacter(node["modulus"], tuple(node["index"])))
        if kind == "kronecker":
            return CharacterSource(kronecker_character(node["discriminant"]))
        if kind == "product":
            return ProductSource(tuple(_build_source(x, f"{ptr}/factors/{i}") for i, x in enumerate(node["factors"])))
        if kind == "satake":
            return SatakeSource(tuple((int(p), tuple(complex(*a) for a in al)) for p, al in node["primes"].items()))
    except CharacterError as exc:
        raise InstanceParseError([(ptr, str(exc))]) from exc
    except ValueError as exc:
        if isinstance(exc, InstanceParseError):
            raise
        raise InstanceParseError([(ptr, str(exc))]) from exc
    raise InstanceParseError([(ptr + "/type", f"unknown source type {kind!r}")])


def _implied_conductor(src) -> int | None:
    if isinstance(src, ZetaSource):
        return 1
    if isinstance(src, CharacterSource):
        return src.chi.conductor
    if isinstance(src, ProductSource):
        parts = [_implied_conductor(f) for f in src.factors]
        return None if None in parts else math.prod(parts)
    return None


def instance_from_dict(data, source: str = "") -> LFunctionInstance:
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise InstanceParseError([(_pointer(e.absolute_path), e.message) for e in errors], source)
    problems = []
    for i, (re, im) in enumerate(data["kappas"]):
        if not re > -1:
            problems.append((f"/kappas/{i}", f"Langlands parameter real part must exceed -1 (got {re})"))
    if data["pole_order"] not in (0, 1):
        problems.append(
            ("/pole_order", f"pole_order {data['pole_order']} rejected: the zero-free region argument allows at most a simple pole at s = 1")
        )
    if len(data["kappas"]) != data["degree"]:
        problems.append(("/kappas", f"{len(data['kappas'])} Langlands parameters for degree {data['degree']}"))
    if problems:
        raise InstanceParseError(problems, source)
    src = _build_source(data["coeff_source"], "/coeff_source")
    implied = _implied_conductor(src)
    if implied is not None and implied != data["conductor"]:
        raise InstanceParseError([("/conductor", f"conductor {data['conductor']} differs from the source's {implied}")], source)
    try:
        return LFunctionInstance(
            name=data["name"],
            degree=data["degree"],
            conductor=data["conductor"],
            kappas=tuple(complex(*k) for k in data["kappas"]),
            pole_order=data["pole_order"],
            root_number=complex(*data["root_number"]),
            coeff_source=src,
        )
    except ClassAxiomError as exc:
        raise InstanceParseError([("", str(exc))], source) from exc


def parse_instance(path) -> LFunctionInstance:
    """Load and strictly validate an instance file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError([("", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")], str(path)) from exc
    return instance_from_dict(data, str(path))


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _source_to_dict(src) -> dict:
    if isinstance(src, ZetaSource):
        return {"type": "zeta"}
    if isinstance(src, CharacterSource):
        return {"type": "dirichlet", "modulus": src.chi.modulus, "index": list(src.chi.index)}
    if isinstance(src, ProductSource):
        return {"type": "product", "factors": [_source_to_dict(f) for f in src.factors]}
    if isinstance(src, SatakeSource):
        return {"type": "satake", "primes": {str(p): [_pair(a) for a in al] for p, al in src.primes}}
    raise TypeError(src)


def instance_to_dict(f: LFunctionInstance) -> dict:
    return {
        "name": f.name,
        "degree": f.degree,
        "conductor": f.conductor,
        "kappas": [_pair(k) for k in f.kappas],
        "pole_order": f.pole_order,
        "root_number": _pair(f.root_number),
        "coeff_source": _source_to_dict(f.coeff_source),
    }


def write_instance(f: LFunctionInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(f), indent=2, sort_keys=True) + "\n", encoding="utf-8")
