"""JSON curve documents, report documents and DOT export."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Union

import jsonschema

from . import __version__
from .certify import CertificateReport, TypeCensus, certificate_form
from .degeneration_model import (
    Anchor, EdgeRole, LabeledCurve, Scenario, ScenarioError, check_labeled, classify_edges,
    make_scenario,
)
from .errors import TropicertError
from .graph_core import Edge, Graph, GraphError
from .moduli import DeformationSpace, DimensionReport
from .obstruction import ObstructionReport
from .rational_kernel import primitive
from .tropical_curve import CurveError, TropicalCurve

FORMAT_VERSION = "1"


class ParseError(TropicertError):
    def __init__(self, line: int | None, path: str, reason: str):
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}{path}: {reason}")
        self.line, self.path, self.reason = line, path, reason


class InvariantViolation(TropicertError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path, self.reason = path, reason


@dataclass(frozen=True)
class CurveDocument:
    curve: TropicalCurve
    scenario: Scenario | None = None
    roles: Mapping[int, EdgeRole] | None = None
    anchors: Mapping[int, Anchor] = field(default_factory=dict)
    transversal: bool = True

    def labeled(self) -> LabeledCurve:
        scenario = self.scenario
        if scenario is None:
            n = self.curve.ambient_dim + 1
            try:
                scenario = make_scenario(n, n)
            except ScenarioError as exc:
                raise InvariantViolation("$.scenario", str(exc)) from None
        try:
            lc = classify_edges(self.curve, scenario)
        except ScenarioError as exc:
            raise InvariantViolation("$.edges", str(exc)) from None
        return LabeledCurve(lc.curve, scenario, lc.roles, dict(self.anchors), self.transversal)


Serializable = Union[LabeledCurve, TropicalCurve, CurveDocument]


# --------------------------------------------------------------------------
# rationals

def rat_to_json(x: Fraction) -> int | str:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _line_of(text: str, token: str) -> int | None:
    i = text.find(token)
    return None if i < 0 else text.count("\n", 0, i) + 1


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, path: str, reason: str, token: str | None = None):
        raise ParseError(_line_of(self.text, token) if token else None, path, reason)

    def obj(self, x, path) -> dict:
        if not isinstance(x, dict):
            self.fail(path, "expected an object")
        return x

    def arr(self, x, path) -> list:
        if not isinstance(x, list):
            self.fail(path, "expected an array")
        return x

    def int_(self, x, path) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            self.fail(path, f"expected an integer, got {x!r}")
        return x

    def rat(self, x, path) -> Fraction:
        if isinstance(x, bool):
            self.fail(path, "expected a rational")
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            try:
                return Fraction(x)
            except (ValueError, ZeroDivisionError):
                self.fail(path, f"malformed rational {x!r}", json.dumps(x))
        self.fail(path, f"expected an integer or a \"p/q\" string, got {x!r}")

    def intvec(self, x, path, m) -> tuple[int, ...]:
        xs = self.arr(x, path)
        if len(xs) != m:
            raise InvariantViolation(path, f"expected {m} entries, got {len(xs)}")
        return tuple(self.int_(v, f"{path}[{i}]") for i, v in enumerate(xs))


def parse_document(text: str) -> CurveDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, "$", exc.msg) from None
    r = _Reader(text)
    data = r.obj(data, "$")
    if data.get("format_version") != FORMAT_VERSION:
        r.fail("$.format_version", f"expected \"{FORMAT_VERSION}\"")
    m = r.int_(data.get("ambient_dim"), "$.ambient_dim")
    if m < 1:
        raise InvariantViolation("$.ambient_dim", "must be positive")

    positions = []
    for i, v in enumerate(r.arr(data.get("vertices"), "$.vertices")):
        path = f"$.vertices[{i}]"
        v = r.obj(v, path)
        if r.int_(v.get("id"), f"{path}.id") != i:
            raise InvariantViolation(f"{path}.id", "vertex ids must be 0, 1, 2, ... in order")
        pos = r.arr(v.get("pos"), f"{path}.pos")
        if len(pos) != m:
            raise InvariantViolation(f"{path}.pos", f"expected {m} coordinates")
        positions.append(tuple(r.rat(x, f"{path}.pos[{k}]") for k, x in enumerate(pos)))

    edges, leaf_dirs = [], {}
    for i, e in enumerate(r.arr(data.get("edges"), "$.edges")):
        path = f"$.edges[{i}]"
        e = r.obj(e, path)
        if r.int_(e.get("id"), f"{path}.id") != i:
            raise InvariantViolation(f"{path}.id", "edge ids must be 0, 1, 2, ... in order")
        w = r.int_(e.get("weight", 1), f"{path}.weight")
        if w < 1:
            raise InvariantViolation(f"{path}.weight", "weight must be at least 1")
        kind = e.get("kind")
        if kind == "bounded":
            ends = r.arr(e.get("endpoints"), f"{path}.endpoints")
            if len(ends) != 2:
                raise InvariantViolation(f"{path}.endpoints", "a bounded edge has two endpoints")
            ends = tuple(r.int_(x, f"{path}.endpoints[{k}]") for k, x in enumerate(ends))
        elif kind == "leaf":
            ends = (r.int_(e.get("vertex"), f"{path}.vertex"),)
            u = r.intvec(e.get("direction"), f"{path}.direction", m)
            if not any(u):
                raise InvariantViolation(f"{path}.direction", "zero direction")
            if primitive(u)[0] != u:
                raise InvariantViolation(f"{path}.direction", f"{list(u)} is not primitive")
            leaf_dirs[i] = u
        else:
            r.fail(f"{path}.kind", f"expected \"bounded\" or \"leaf\", got {kind!r}")
        for k, v in enumerate(ends):
            if not 0 <= v < len(positions):
                raise InvariantViolation(f"{path}", f"unknown vertex {v}")
        edges.append(Edge(i, ends, w))

    try:
        graph = Graph(len(positions), tuple(edges))
        if not graph.is_connected():
            raise InvariantViolation("$.edges", "graph is not connected")
        curve = TropicalCurve(graph, m, tuple(positions), leaf_dirs)
    except (GraphError, CurveError) as exc:
        raise InvariantViolation("$.edges", str(exc)) from None

    scenario = None
    if data.get("scenario") is not None:
        s = r.obj(data["scenario"], "$.scenario")
        free = s.get("free_dirs")
        if free is not None:
            free = [r.intvec(u, f"$.scenario.free_dirs[{k}]", m)
                    for k, u in enumerate(r.arr(free, "$.scenario.free_dirs"))]
        try:
            scenario = make_scenario(r.int_(s.get("n"), "$.scenario.n"),
                                     r.int_(s.get("d"), "$.scenario.d"), free)
        except ScenarioError as exc:
            raise InvariantViolation("$.scenario", str(exc)) from None
        if scenario.n - 1 != m:
            raise InvariantViolation("$.scenario.n", f"n must equal ambient_dim + 1 = {m + 1}")

    roles = None
    if data.get("roles") is not None:
        roles = {}
        for k, v in r.obj(data["roles"], "$.roles").items():
            try:
                roles[int(k)] = EdgeRole(v)
            except ValueError:
                r.fail(f"$.roles.{k}", f"unknown role {v!r}")

    anchors = {}
    for i, a in enumerate(r.arr(data.get("anchors") or [], "$.anchors")):
        path = f"$.anchors[{i}]"
        a = r.obj(a, path)
        edge = r.int_(a.get("edge"), f"{path}.edge")
        base = tuple(r.rat(x, f"{path}.basepoint[{k}]")
                     for k, x in enumerate(r.arr(a.get("basepoint"), f"{path}.basepoint")))
        if len(base) != m:
            raise InvariantViolation(f"{path}.basepoint", f"expected {m} coordinates")
        normals = tuple(r.intvec(c, f"{path}.normals[{k}]", m)
                        for k, c in enumerate(r.arr(a.get("normals"), f"{path}.normals")))
        try:
            anchors[edge] = Anchor(edge, base, r.intvec(a.get("direction"), f"{path}.direction", m),
                                   normals)
        except ScenarioError as exc:
            raise InvariantViolation(path, str(exc)) from None

    transversal = data.get("transversal", True)
    if not isinstance(transversal, bool):
        r.fail("$.transversal", "expected a boolean")
    doc = CurveDocument(curve, scenario, roles, anchors, transversal)
    if roles is not None or anchors:
        lc = doc.labeled()
        if roles is not None and dict(roles) != dict(lc.roles):
            raise InvariantViolation("$.roles", "roles disagree with the scenario classification")
        try:
            check_labeled(lc)
        except ScenarioError as exc:
            raise InvariantViolation("$.anchors", str(exc)) from None
    return doc


def parse_curve(text: str) -> LabeledCurve:
    return parse_document(text).labeled()


def curve_to_dict(obj: Serializable) -> dict[str, Any]:
    if isinstance(obj, LabeledCurve):
        curve, scenario, roles, anchors, transversal = (
            obj.curve, obj.scenario, obj.roles, obj.anchors, obj.transversal)
    elif isinstance(obj, CurveDocument):
        curve, scenario, roles, anchors, transversal = (
            obj.curve, obj.scenario, obj.roles, obj.anchors, obj.transversal)
    else:
        curve, scenario, roles, anchors, transversal = obj, None, None, {}, True
    g = curve.graph
    out: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "ambient_dim": curve.ambient_dim,
        "vertices": [{"id": v, "pos": [rat_to_json(x) for x in curve.positions[v]]}
                     for v in g.vertices],
        "edges": [],
    }
    for e in g.edges:
        if e.is_leaf:
            out["edges"].append({"id": e.id, "kind": "leaf", "vertex": e.ends[0],
                                 "weight": e.weight, "direction": list(curve.leaf_directions[e.id])})
        else:
            out["edges"].append({"id": e.id, "kind": "bounded", "endpoints": list(e.ends),
                                 "weight": e.weight})
    if scenario is not None:
        out["scenario"] = {"n": scenario.n, "d": scenario.d,
                           "free_dirs": [list(u) for u in scenario.free_dirs]}
    if roles is not None:
        out["roles"] = {str(k): roles[k].value for k in sorted(roles)}
    if anchors:
        out["anchors"] = [{"edge": a.edge, "basepoint": [rat_to_json(x) for x in a.basepoint],
                           "direction": list(a.direction), "normals": [list(c) for c in a.normals]}
                          for _, a in sorted(anchors.items())]
    if not transversal:
        out["transversal"] = False
    return out


def serialize_curve(obj: Serializable) -> str:
    return json.dumps(curve_to_dict(obj), indent=2) + "\n"


# --------------------------------------------------------------------------
# reports

_VEC = {"type": "array", "items": {"type": ["integer", "string"]}}


def _schema(kind: str, props: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "properties": {"kind": {"const": kind}, "version": {"type": "string"}, **props},
        "required": ["kind", *required],
    }


_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}
_OBSTRUCTION_PROPS = {
    "verdict": {"enum": ["vanishes", "inconclusive"]},
    "degrees": {"type": "object", "additionalProperties": {"type": "array", "items": _INT}},
    "dual_dims": {"type": "object", "additionalProperties": _INT},
    "trace": {"type": "array", "items": _INT},
    "oracle_dim": {"type": ["integer", "null"]},
}

REPORT_SCHEMAS = {
    "dimension": _schema("dimension", {
        "curve_degree": _INT, "n": _INT, "d": _INT, "moduli": _INT, "incidence": _INT,
        "expected": _INT, "threshold": _INT, "sweeps": _BOOL, "bound_incidence": _INT,
        "bound_expected": _INT, "minimal_sweeping_degree": {"type": ["integer", "null"]},
        "ci_degrees": {"type": ["array", "null"], "items": _INT},
        "ambient": {"type": ["integer", "null"]},
    }, ["curve_degree", "n", "d", "moduli", "incidence", "expected", "threshold", "sweeps"]),
    "obstruction": _schema("obstruction", _OBSTRUCTION_PROPS, ["verdict", "trace", "dual_dims"]),
    "certificate": _schema("certificate", {
        "verdict": {"enum": ["certificate", "not-certificate"]},
        "reason": {"type": ["string", "null"]},
        "balanced": _BOOL, "immersive": _BOOL, "realizable": _BOOL,
        "obstruction": {"type": ["object", "null"]},
        "oracle_dim": {"type": ["integer", "null"]},
        "deformation_dim": _INT, "expected_deformation_dim": _INT,
        "mobility": _INT, "mobility_vertex": {"type": ["integer", "null"]},
        "profile_counts": {"type": "object", "additionalProperties": _INT},
        "transversality_assumed": _BOOL,
        "curve": {"type": "object"},
    }, ["verdict", "balanced", "immersive", "realizable", "mobility", "curve"]),
    "census": _schema("census", {
        "n": _INT, "degree": _INT, "d": _INT, "trees_generated": _INT, "types_examined": _INT,
        "contracted": _INT, "realizable": _INT, "certificates": _INT, "capped": _BOOL,
        "certificate_forms": {"type": "array", "items": {"type": "string"}},
        "verdicts": {"type": "object", "additionalProperties": _INT},
        "representatives": {"type": "array", "items": {"type": "object"}},
    }, ["n", "degree", "types_examined", "certificates", "capped"]),
    "deformation": _schema("deformation", {
        "dimension": _INT, "expected_count": _INT, "feasible": _BOOL, "base_satisfied": _BOOL,
        "anchors": {"type": "string"}, "anchor_kind": {"type": "string"},
        "basis": {"type": "array", "items": {"type": "array", "items": _VEC}},
        "mobility": {"type": "object", "additionalProperties": _INT},
    }, ["dimension", "expected_count", "feasible"]),
    "info": _schema("info", {
        "degree_map": {"type": "array"}, "e": _INT, "genus": _INT, "trivalent": _BOOL,
        "immersive": _BOOL, "balanced": _BOOL,
        "residues": {"type": "object"},
        "projective_degree": {"type": ["integer", "null"]},
    }, ["degree_map", "genus", "trivalent", "immersive", "balanced"]),
    "validation": _schema("validation", {
        "ok": _BOOL, "vertices": _INT, "edges": _INT,
    }, ["ok"]),
    "error": _schema("error", {"error": {"type": "string"}, "message": {"type": "string"}},
                     ["error", "message"]),
}


def obstruction_dict(rep: ObstructionReport, oracle: int | None = None) -> dict:
    return {
        "verdict": rep.verdict,
        "degrees": {str(v): list(d) for v, d in sorted(rep.degrees.items())},
        "dual_dims": {str(v): k for v, k in sorted(rep.dual_dims.items())},
        "trace": list(rep.trace),
        "oracle_dim": oracle,
    }


def report_document(obj, **extra) -> dict:
    """Wrap a report object as a ``kind``-tagged, schema-checked JSON document."""
    if isinstance(obj, DimensionReport):
        doc = {"kind": "dimension", "curve_degree": obj.curve_degree, "n": obj.n, "d": obj.d,
               "moduli": obj.moduli, "incidence": obj.incidence, "expected": obj.expected,
               "threshold": obj.threshold, "sweeps": obj.sweeps,
               "bound_incidence": obj.bound_incidence, "bound_expected": obj.bound_expected,
               "minimal_sweeping_degree": obj.minimal_sweeping_degree,
               "ci_degrees": list(obj.ci_degrees) if obj.ci_degrees else None,
               "ambient": obj.ambient}
    elif isinstance(obj, ObstructionReport):
        doc = {"kind": "obstruction", **obstruction_dict(obj, extra.pop("oracle_dim", None))}
    elif isinstance(obj, CertificateReport):
        doc = {"kind": "certificate", "verdict": obj.verdict, "reason": obj.reason,
               "balanced": obj.balanced, "immersive": obj.immersive,
               "realizable": obj.realizable,
               "obstruction": obstruction_dict(obj.obstruction, obj.oracle_dim)
               if obj.obstruction else None,
               "oracle_dim": obj.oracle_dim, "deformation_dim": obj.deformation_dim,
               "expected_deformation_dim": obj.expected_deformation_dim,
               "mobility": obj.mobility, "mobility_vertex": obj.mobility_vertex,
               "profile_counts": obj.profile_counts,
               "transversality_assumed": obj.curve.transversal,
               "curve": curve_to_dict(obj.curve)}
    elif isinstance(obj, TypeCensus):
        doc = {"kind": "census", "n": obj.n, "degree": obj.degree, "d": obj.d,
               "trees_generated": obj.trees_generated, "types_examined": obj.types_examined,
               "contracted": obj.contracted, "realizable": obj.realizable,
               "certificates": obj.certificates, "capped": obj.capped,
               "certificate_forms": list(obj.certificate_forms), "verdicts": obj.verdicts,
               "representatives": [curve_to_dict(lc) for lc in obj.representatives]}
    elif isinstance(obj, DeformationSpace):
        doc = {"kind": "deformation", "dimension": obj.dimension,
               "expected_count": obj.expected_count, "feasible": obj.feasible,
               "base_satisfied": obj.base_satisfied,
               "basis": [[[rat_to_json(x) for x in vel] for vel in b] for b in obj.basis]}
    elif isinstance(obj, dict) and "kind" in obj:
        doc = dict(obj)
    else:
        raise TypeError(f"no report form for {type(obj).__name__}")
    doc.update(extra)
    jsonschema.validate(doc, REPORT_SCHEMAS[doc["kind"]])
    return doc


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# DOT

def _decimal(x: Fraction, places: int = 4) -> str:
    # rounded fixed-point without going through float
    scale = 10 ** places
    q = (abs(x) * scale * 2 + 1) // 2
    sign = "-" if x < 0 and q else ""
    whole, frac = divmod(int(q), scale)
    return f"{sign}{whole}.{frac:0{places}d}".rstrip("0").rstrip(".")


def export_dot(obj: Union[LabeledCurve, TropicalCurve]) -> str:
    """Graphviz text: nodes solid, non-free leaves open arrowheads, free leaves filled dots."""
    if isinstance(obj, LabeledCurve):
        curve, roles = obj.curve, obj.roles
    else:
        curve = obj
        try:
            roles = CurveDocument(curve).labeled().roles
        except InvariantViolation:
            roles = {}
    g = curve.graph
    planar = curve.ambient_dim == 2
    lines = ["graph tropical_curve {", "  node [shape=circle, fontsize=10];"]

    def pos(p):
        return f', pos="{_decimal(p[0])},{_decimal(p[1])}!"' if planar else ""

    for v in g.vertices:
        p = curve.positions[v]
        label = f"V{v}" if planar else f"V{v} (" + ", ".join(_decimal(x) for x in p) + ")"
        lines.append(f'  v{v} [label="{label}"{pos(p)}];')
    for e in g.leaf_edges():
        role = roles.get(e.id)
        tip = tuple(x + y for x, y in zip(curve.positions[e.ends[0]], curve.leaf_directions[e.id]))
        if role is EdgeRole.FREE:
            style = 'shape=point, style=filled, fillcolor=black, width=0.12'
        else:
            style = 'shape=point, style=invis, width=0.01'
        lines.append(f"  t{e.id} [{style}{pos(tip)}];")
    for e in g.edges:
        role = roles.get(e.id)
        w = f', label="{e.weight}"' if e.weight > 1 else ""
        if e.is_leaf:
            end = f"t{e.id}"
            if role is EdgeRole.NONFREE:
                attrs = "style=solid, dir=forward, arrowhead=empty"
            elif role is EdgeRole.FREE:
                attrs = "style=solid"
            else:
                attrs = "style=dashed"
            lines.append(f"  v{e.ends[0]} -- {end} [{attrs}{w}];")
        else:
            a, b = e.ends
            lines.append(f"  v{a} -- v{b} [style=solid{w}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def header() -> str:
    return f"tropicert {__version__}"


__all__ = [
    "CurveDocument", "ParseError", "InvariantViolation", "parse_document", "parse_curve",
    "serialize_curve", "curve_to_dict", "report_document", "dump_report", "export_dot",
    "REPORT_SCHEMAS", "certificate_form",
]
