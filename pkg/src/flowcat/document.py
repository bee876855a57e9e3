"""Versioned JSON documents wrapping categories, parameterizations and charts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .category import FlowCategory, category_from_json, category_to_json, validate_category
from .chains import ChainComplex
from .config import TOLERANCE
from .kuranishi import PLChart, validate_chart
from .params import EParam, SemiFreeParam, is_free
from .report import Report

FORMAT_VERSION = "1"
KINDS = ("flow_category", "eparam", "semifree_param", "chart", "chain_complex")


class DocumentError(ValueError):
    """Malformed or schema-invalid document."""


@dataclass
class Document:
    kind: str
    payload: Any
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "payload": _encode(self.kind, self.payload),
            "provenance": dict(self.provenance),
        }

    def dumps(self) -> str:
        return dumps(self.to_json())


def dumps(data: Mapping) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _encode(kind: str, obj: Any) -> dict:
    if kind == "flow_category":
        return category_to_json(obj)
    return obj.to_json()


def _decode(kind: str, data: Mapping) -> Any:
    if kind == "flow_category":
        return category_from_json(data)
    if kind == "eparam":
        return EParam.from_json(data)
    if kind == "semifree_param":
        return SemiFreeParam.from_json(data)
    if kind == "chart":
        return PLChart.from_json(data)
    if kind == "chain_complex":
        return ChainComplex.from_json(data)
    raise DocumentError(f"unknown document kind {kind!r}")


def kind_of(obj: Any) -> str:
    if isinstance(obj, FlowCategory):
        return "flow_category"
    if isinstance(obj, EParam):
        return "eparam"
    if isinstance(obj, SemiFreeParam):
        return "semifree_param"
    if isinstance(obj, PLChart):
        return "chart"
    if isinstance(obj, ChainComplex):
        return "chain_complex"
    raise TypeError(f"no document kind for {type(obj).__name__}")


def make_document(obj: Any, generator: str = "", seed: int | None = None) -> Document:
    prov: dict = {"generator": generator}
    if seed is not None:
        prov["seed"] = int(seed)
    return Document(kind_of(obj), obj, prov)


def loads(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DocumentError("document root must be an object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"unknown document kind {kind!r}")
    if "payload" not in data:
        raise DocumentError("document has no payload")
    try:
        payload = _decode(kind, data["payload"])
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise DocumentError(f"malformed {kind} payload: {exc!r}") from exc
    prov = data.get("provenance", {})
    if not isinstance(prov, dict):
        raise DocumentError("provenance must be an object")
    return Document(kind, payload, prov)


def validate_document(doc: Document, tol: float = TOLERANCE, seed: int = 0) -> Report:
    obj = doc.payload
    if doc.kind == "flow_category":
        return validate_category(obj, tol, seed)
    if doc.kind == "eparam":
        return obj.validate(tol)
    if doc.kind == "semifree_param":
        rep = obj.free.validate(tol)
        if rep.ok and not is_free(obj.free).free:
            rep.add("not-semifree", "free part is not free")
        return rep
    if doc.kind == "chart":
        return validate_chart(obj, tol)
    if doc.kind == "chain_complex":
        rep = Report()
        for x, z, v in obj.d_squared_violations():
            rep.add("d-squared", f"d^2 has coefficient {v} from {x} to {z}", x, z)
        return rep
    raise DocumentError(f"unknown document kind {doc.kind!r}")
