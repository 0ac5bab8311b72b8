"""JSON documents for Hecke elements, series and reports.

Every document carries ``schema`` and ``engine`` fields.  Terms are listed in
the canonical key order, so a document is a deterministic function of the
element it describes.
"""

from __future__ import annotations

import json
from typing import Any

from . import __version__
from .core import CosetSystem, HeckeElement, TruncSeries
from .global_hecke import GlobalElement, GlobalThetaElement, local_system

ELEMENT_SCHEMA = "heisenhecke.element/1"
SERIES_SCHEMA = "heisenhecke.series/1"
REPORT_SCHEMA = "heisenhecke.report/1"
GLOBAL_SCHEMA = "heisenhecke.global-element/1"


def system_family(system: CosetSystem) -> str:
    return "heis" if system.tag == "heis" else "gl"


def render_key(system: CosetSystem, key) -> Any:
    if system.tag == "heis":
        return system.key_to_json(key)
    rep = system.representative(key)
    return {"exponents": list(key), "matrix": [list(r) for r in rep]}


def parse_key(system: CosetSystem, data: Any):
    if system.tag == "heis":
        return system.key_from_json(data)
    return system.key_from_json(data["exponents"])


def element_doc(x: HeckeElement) -> dict[str, Any]:
    S = x.system
    doc: dict[str, Any] = {"schema": ELEMENT_SCHEMA, "engine": __version__, "system": system_family(S), "p": S.p}
    if doc["system"] == "gl":
        doc["r"] = S.r
    doc["terms"] = [{"key": render_key(S, k), "coeff": c} for k, c in x.items()]
    return doc


def element_from_doc(doc: dict[str, Any]) -> HeckeElement:
    from .gl import gl_system
    from .heisenberg import heis_system

    if doc.get("schema") != ELEMENT_SCHEMA:
        raise ValueError(f"unexpected schema {doc.get('schema')!r}")
    if doc["system"] == "heis":
        S = heis_system(int(doc["p"]))
    elif doc["system"] == "gl":
        S = gl_system(int(doc["r"]), int(doc["p"]))
    else:
        raise ValueError(f"unknown system {doc['system']!r}")
    terms: dict = {}
    for t in doc["terms"]:
        k = parse_key(S, t["key"])
        terms[k] = terms.get(k, 0) + int(t["coeff"])
    return HeckeElement(S, terms)


def series_doc(s: TruncSeries) -> dict[str, Any]:
    return {
        "schema": SERIES_SCHEMA,
        "engine": __version__,
        "N": s.N,
        "coefficients": [element_doc(c) for c in s.coeffs],
    }


def global_doc(x: GlobalElement) -> dict[str, Any]:
    terms = []
    for key, c in x.items():
        parts = [{"p": p, "key": render_key(local_system(x.tag, p), k)} for p, k in key]
        terms.append({"key": parts, "coeff": c})
    return {"schema": GLOBAL_SCHEMA, "engine": __version__, "system": x.tag, "terms": terms}


def theta_doc(q: GlobalThetaElement) -> dict[str, Any]:
    terms = []
    for (key, exps), c in sorted(q.terms.items(), key=lambda kv: (kv[0][1], repr(kv[0][0]))):
        parts = [{"p": p, "key": render_key(local_system("gl2", p), k)} for p, k in key]
        terms.append({"key": parts, "theta": [{"p": p, "exp": j} for p, j in exps], "coeff": c})
    return {"schema": GLOBAL_SCHEMA, "engine": __version__, "system": "gl2[theta]", "terms": terms}


def render(value: Any) -> Any:
    """Render report details (elements, lists of elements) as documents."""
    if isinstance(value, HeckeElement):
        return element_doc(value)
    if isinstance(value, GlobalElement):
        return global_doc(value)
    if isinstance(value, GlobalThetaElement):
        return theta_doc(value)
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    if value is None or isinstance(value, (int, str, bool)):
        return value
    return repr(value)


def dumps(doc: Any, compact: bool = False) -> str:
    if compact:
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return json.dumps(doc, sort_keys=True, indent=2)
