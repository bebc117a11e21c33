import json
import re

import jsonschema
import pytest

from conftest import FIXTURES, fixture_text, make_tripod
from tropicert.certify import canonical_certificate, enumerate_types
from tropicert.cli_io import (
    REPORT_SCHEMAS, CurveDocument, InvariantViolation, ParseError, _decimal, export_dot,
    parse_curve, parse_document, report_document, serialize_curve,
)
from tropicert.degeneration_model import EdgeRole, classify_edges, make_scenario
from tropicert.moduli import deformation_space, expected_dim
from tropicert.obstruction import propagate_vanishing
from tropicert.tropical_curve import check_balancing

ALL_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.json"))


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_round_trip_fixture(name):
    text = fixture_text(name)
    doc = parse_document(text)
    assert serialize_curve(doc) == text
    assert parse_document(serialize_curve(doc)) == doc


def test_round_trip_labeled(conic):
    assert parse_curve(serialize_curve(conic)) == conic
    assert check_balancing(parse_curve(serialize_curve(conic)).curve).balanced


@pytest.mark.parametrize("n", [3, 4, 5])
def test_round_trip_canonical(n):
    lc = canonical_certificate(n).curve
    assert parse_curve(serialize_curve(lc)) == lc


def _conic_dict(conic):
    return json.loads(serialize_curve(conic))


def test_non_primitive_direction(conic):
    d = _conic_dict(conic)
    leaf = next(e for e in d["edges"] if e["kind"] == "leaf" and e["direction"] == [1, 1])
    leaf["direction"] = [2, 2]
    with pytest.raises(InvariantViolation) as exc:
        parse_document(json.dumps(d))
    assert "primitive" in exc.value.reason
    assert exc.value.path.startswith("$.edges[")


def test_zero_denominator_is_a_parse_error(conic):
    d = _conic_dict(conic)
    d["vertices"][1]["pos"][0] = "3/0"
    text = json.dumps(d, indent=2)
    with pytest.raises(ParseError) as exc:
        parse_document(text)
    assert exc.value.path == "$.vertices[1].pos[0]"
    assert exc.value.line == text.splitlines().index('        "3/0",') + 1


def test_json_syntax_error_has_a_line():
    with pytest.raises(ParseError) as exc:
        parse_document('{\n  "format_version": "1",\n  "ambient_dim": 2,,\n}')
    assert exc.value.line == 3


@pytest.mark.parametrize("mutate, err", [
    (lambda d: d.update(format_version="2"), ParseError),
    (lambda d: d["edges"][0].update(weight=0), InvariantViolation),
    (lambda d: d["edges"][0].update(endpoints=[0, 9]), InvariantViolation),
    (lambda d: d["edges"][0].update(kind="ray"), ParseError),
    (lambda d: d["vertices"][0].update(pos=[0]), InvariantViolation),
    (lambda d: d["vertices"][0].update(pos=[0.5, 0]), ParseError),
    (lambda d: d.update(edges=[e for e in d["edges"] if e["id"] != 1]), InvariantViolation),
    (lambda d: d["roles"].update({"3": "nonfree"}), InvariantViolation),
    (lambda d: d["scenario"].update(d=7), InvariantViolation),
])
def test_invalid_documents(conic, mutate, err):
    d = _conic_dict(conic)
    mutate(d)
    with pytest.raises(err):
        parse_document(json.dumps(d))


def test_disconnected_rejected(conic):
    d = _conic_dict(conic)
    d["edges"] = [e for e in d["edges"] if e["id"] != 1]
    for i, e in enumerate(d["edges"]):
        e["id"] = i
    d.pop("roles"), d.pop("anchors")
    with pytest.raises(InvariantViolation) as exc:
        parse_document(json.dumps(d))
    assert "connected" in exc.value.reason


def test_rationals_in_lowest_terms(conic):
    d = _conic_dict(conic)
    d.pop("anchors")
    d["vertices"][0]["pos"] = ["0/4", 0]
    assert json.loads(serialize_curve(parse_document(json.dumps(d))))["vertices"][0]["pos"] == [0, 0]
    doc = parse_document(fixture_text("conic.json"))
    assert all(isinstance(x, int) for v in json.loads(serialize_curve(doc))["vertices"]
               for x in v["pos"])


def test_roles_derivable(conic):
    d = _conic_dict(conic)
    d.pop("roles")
    assert parse_curve(json.dumps(d)).roles == conic.roles


def _dot_counts(text):
    nodes = len(re.findall(r"^  v\d+ \[", text, re.M))
    edges = text.count(" -- ")
    filled = text.count("style=filled")
    terminals = len(re.findall(r"^  t\d+ \[", text, re.M))
    return nodes, edges, filled, terminals


def test_dot_conic(conic):
    text = export_dot(conic)
    assert _dot_counts(text) == (4, 9, 2, 6)
    assert text.count("arrowhead=empty") == 4
    assert 'v2 [label="V2", pos="2,3!"]' in text
    assert export_dot(conic) == text


def test_dot_tripod():
    lc = classify_edges(make_tripod(), make_scenario(3, 2))
    assert _dot_counts(export_dot(lc))[0] == 1
    assert _dot_counts(export_dot(lc))[3] == 3


def test_dot_unlabeled_defaults_to_scenario(conic):
    assert export_dot(conic.curve) == export_dot(conic)


def test_dot_higher_dimension():
    text = export_dot(canonical_certificate(4).curve)
    assert "pos=" not in text and 'label="V0 (0, 0, 0)"' in text


def test_decimal_formatting():
    from fractions import Fraction as F
    assert [_decimal(x) for x in (F(1, 3), F(-1, 2), F(2), F(-1, 100000), F(5, 8))] == \
        ["0.3333", "-0.5", "2", "0", "0.625"]


def test_reports_validate(conic):
    docs = [
        report_document(expected_dim(2, 6, 6)),
        report_document(propagate_vanishing(conic, 3), oracle_dim=0),
        report_document(canonical_certificate(3)),
        report_document(enumerate_types(3, 1)),
        report_document(deformation_space(conic)),
    ]
    assert [d["kind"] for d in docs] == ["dimension", "obstruction", "certificate", "census",
                                         "deformation"]
    for d in docs:
        jsonschema.validate(json.loads(json.dumps(d)), REPORT_SCHEMAS[d["kind"]])
    assert docs[0]["expected"] == 4 and docs[0]["sweeps"]


def test_report_schema_rejects_bad_documents():
    with pytest.raises(jsonschema.ValidationError):
        report_document({"kind": "validation", "ok": "yes"})
