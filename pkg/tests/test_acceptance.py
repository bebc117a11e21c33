"""Acceptance gate: one check per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary and also when this file is run as a script.
"""
from __future__ import annotations

import io
import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import FIXTURES, make_conic, random_role_tree, random_tree_edges  # noqa: E402
from tropicert.certify import (  # noqa: E402
    _tree_graph, canonical_certificate, certificate_form, enumerate_types, verify_certificate,
)
from tropicert.cli import run_cli  # noqa: E402
from tropicert.cli_io import parse_curve, parse_document, serialize_curve  # noqa: E402
from tropicert.degeneration_model import projective_directions  # noqa: E402
from tropicert.errors import Infeasible  # noqa: E402
from tropicert.moduli import (  # noqa: E402
    NotFano, ci_expected, deformation_space, expected_dim, mobility, residual_mobility,
)
from tropicert.obstruction import (  # noqa: E402
    VertexProfile, dual_degrees, h0_dim, propagate_vanishing, section_space_dim,
)
from tropicert.tropical_curve import (  # noqa: E402
    Contracted, check_balancing, degree_map, global_leaf_sum, infer_directions, is_trivalent,
    realize,
)

RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"[acceptance {number}] {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[number]


def _timed(fn, repeat=1):
    best, out = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return out, best


# 1 ---------------------------------------------------------------------------

def test_vertex_table():
    types = {1: VertexProfile(1, 1, 1), 2: VertexProfile(2, 1, 0),
             3: VertexProfile(2, 0, 1), 4: VertexProfile(1, 0, 2)}

    def run():
        bad = []
        for n in range(4, 11):
            want = {1: 0, 2: n - 3, 3: n - 2, 4: 1}
            for t, p in types.items():
                got = sum(h0_dim(d) for d in dual_degrees(p, n))
                if got != want[t]:
                    bad.append((n, t, got))
        return bad

    run()  # warm up imports and caches
    bad, dt = _timed(run)
    record(1, not bad and dt < 1e-3,
           f"dual dims (0, n-3, n-2, 1) for n=4..10; mismatches={bad}; {dt * 1e3:.3f} ms (< 1 ms)")


# 2 ---------------------------------------------------------------------------

def test_dimension_identities():
    def run():
        bad = []
        for n in range(3, 65):
            for d in range(2, n + 1):
                r = expected_dim(d, n, d)
                # the displayed identity charges every one of the n-1 divisors
                if r.bound_expected != n + d - 4:
                    bad.append(("identity", n, d))
                if d == n and r.expected != n + d - 4:
                    bad.append(("diagonal", n, d))
                if r.expected - r.bound_expected != d * (n - d):
                    bad.append(("gap", n, d))
            c = expected_dim(2, n, n)
            if not (c.expected == n - 2 == c.threshold and c.sweeps):
                bad.append(("conics", n))
        return bad

    bad, dt = _timed(run)
    record(2, not bad and dt < 1.0,
           f"dn+n-4-d(n-1) = n+d-4 on 3<=n<=64, 2<=d<=n; conics at d=n give n-2 = threshold; "
           f"mismatches={bad[:3]}; {dt:.3f} s (< 1 s)")


# 3 ---------------------------------------------------------------------------

def _certify_json(n):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(["certify", "--n", str(n), "--json"], stdout=out, stderr=err)
    return code, json.loads(out.getvalue())


_CERT_RUNS: dict[int, bool] = {}


@pytest.mark.parametrize("n", range(3, 11))
def test_certify_desk_scale(n):
    (code, doc), dt = _timed(lambda: _certify_json(n))
    ob = doc["obstruction"]
    ok = (code == 0 and doc["verdict"] == "certificate" and doc["balanced"] and doc["immersive"]
          and doc["realizable"] and ob["verdict"] == "vanishes" and doc["oracle_dim"] == 0
          and doc["mobility"] == n - 2 and dt < 5.0)
    _CERT_RUNS[n] = ok
    runs = ", ".join(f"n={k} {'ok' if v else 'FAILED'}" for k, v in sorted(_CERT_RUNS.items()))
    RESULTS[3] = (f"[acceptance 3] {'PASS' if all(_CERT_RUNS.values()) else 'FAIL'}  "
                  f"certify N=3..10 is a certificate with oracle 0 and mobility N-2 (< 5 s each): {runs}")
    assert ok, (f"certify --n {n}: verdict {doc['verdict']}, obstruction {ob['verdict']}, "
                f"oracle {doc['oracle_dim']}, mobility {doc['mobility']}, {dt:.2f} s")


# 4 ---------------------------------------------------------------------------

def test_lines_regime():
    bad = []
    for n in range(3, 65):
        for d in range(2, n + 1):
            r = expected_dim(1, n, d)
            if (r.expected >= n - 2) != (d <= n - 1) or r.sweeps != (d <= n - 1):
                bad.append((n, d))
    record(4, not bad, f"lines sweep iff d <= n-1 on 3<=n<=64; mismatches={bad[:5]}")


# 5 ---------------------------------------------------------------------------

def _degree_tuples(k, total_max):
    def rec(prefix, k):
        if k == 0:
            yield tuple(prefix)
            return
        lo = prefix[-1] if prefix else 2
        for x in range(lo, total_max - sum(prefix) - 2 * (k - 1) + 1):
            yield from rec(prefix + [x], k - 1)
    yield from rec([], k)


def test_complete_intersections():
    bad, checked, not_fano = [], 0, 0
    for k in range(1, 5):
        for n in range(3, 11 - k):
            ambient = k + n - 1
            if ambient > 9:
                continue
            for degrees in _degree_tuples(k, 2 * ambient):
                d = sum(degrees)
                if d > ambient:
                    try:
                        ci_expected(degrees, n, 1)
                        bad.append(("fano", degrees, n))
                    except NotFano:
                        not_fano += 1
                    continue
                checked += 1
                lines = ci_expected(degrees, n, 1)
                conics = ci_expected(degrees, n, 2)
                if lines.sweeps != (d < ambient):
                    bad.append(("lines", degrees, n))
                if (lines.minimal_sweeping_degree == 2) != (d == ambient):
                    bad.append(("quadrics", degrees, n))
                if d == ambient and not conics.sweeps:
                    bad.append(("conics", degrees, n))
    record(5, not bad and checked > 0,
           f"{checked} tuples (k<=4, n_i>=2, ambient <= P^9): quadrics iff d = k+n-1, lines iff "
           f"d < k+n-1; {not_fano} non-Fano tuples rejected; mismatches={bad[:3]}")


# 6 ---------------------------------------------------------------------------

def test_census_n3_conics():
    census, dt = _timed(lambda: enumerate_types(3, 2, keep=10 ** 6))
    again = enumerate_types(3, 2, keep=10 ** 6)
    reps_ok = all(verify_certificate(lc).is_certificate and verify_certificate(lc).oracle_dim == 0
                  for lc in census.representatives)
    ok = (dt < 60 and not census.capped and census == again and census.certificates >= 1
          and len(census.representatives) == census.certificates and reps_ok
          # pinned after the first verified run
          and (census.types_examined, census.certificates) == (23, 4)
          and certificate_form(make_conic()) in census.certificate_forms
          and certificate_form(canonical_certificate(3).curve) in census.certificate_forms)
    record(6, ok, f"{census.types_examined} types, {census.certificates} certificates (pinned 23/4), "
                  f"all re-verified with oracle 0: {reps_ok}, deterministic: {census == again}, "
                  f"{dt:.2f} s (< 60 s)")


# 7 ---------------------------------------------------------------------------

def test_oracle_soundness_fuzz():
    def run():
        rng = random.Random(20240607)
        violations, vanished = 0, 0
        for _ in range(1000):
            leaves = rng.randint(3, 14)  # at most 12 vertices
            t = random_role_tree(rng, leaves)
            n = rng.randint(3, 6)
            order = list(t.graph.vertices)
            rng.shuffle(order)
            if propagate_vanishing(t, n, order=order).vanishes:
                vanished += 1
                if section_space_dim(t, n) != 0:
                    violations += 1
        return violations, vanished

    (violations, vanished), dt = _timed(run)
    record(7, violations == 0 and dt < 60,
           f"1000 random labeled trees (<= 12 vertices, n <= 6), {vanished} vanishing verdicts, "
           f"{violations} oracle violations, {dt:.2f} s (< 60 s)")


# 8 ---------------------------------------------------------------------------

def test_mobility_uniqueness():
    lc = make_conic()
    ds = deformation_space(lc)
    first = mobility(ds, 0, (-1, 0))
    rest = residual_mobility(ds, 3, (-1, 0), given=[(0, (-1, 0))])
    # the lexicographically first caterpillar has its free leaves on V0 and V1
    lc2 = canonical_certificate(3).curve
    ds2 = deformation_space(lc2)
    (v, u), (w, x) = lc2.free_vertices()
    first2, rest2 = mobility(ds2, v, u), residual_mobility(ds2, w, x, given=[(v, u)])
    ok = (ds.dimension, first, rest) == (1, 1, 0) and (ds2.dimension, first2, rest2) == (1, 1, 0)
    record(8, ok, f"conic: dim {ds.dimension}, mobility(V1) {first}, residual of the other free "
                  f"vertex {rest}; search conic: dim {ds2.dimension}, {first2}, {rest2}")


# 9 ---------------------------------------------------------------------------

def test_infrastructure_properties():
    rng = random.Random(99)
    bad = []
    for _ in range(300):
        n, delta = rng.randint(3, 6), rng.randint(1, 2)
        labels = [u for u in projective_directions(n) for _ in range(delta)]
        rng.shuffle(labels)
        e = len(labels)
        g, leaf_dirs = _tree_graph(random_tree_edges(rng, e), e, labels)
        if g.n_vertices != e - 2 or len(g.bounded_edges()) != e - 3 or g.first_betti() != 0:
            bad.append("euler")
        try:
            ct = infer_directions(g, leaf_dirs)
        except Contracted:
            continue
        if not check_balancing(ct).balanced or global_leaf_sum(ct) != (0,) * (n - 1):
            bad.append("balancing")
        if degree_map(ct).e != e or not is_trivalent(ct):
            bad.append("degree")
        try:
            realize(ct)
        except Infeasible:
            pass
    trips = 0
    for path in sorted(FIXTURES.glob("*.json")):
        text = path.read_text(encoding="utf-8")
        doc = parse_document(text)
        trips += 1
        if serialize_curve(doc) != text or parse_document(serialize_curve(doc)) != doc:
            bad.append(f"round-trip {path.name}")
    for n in range(3, 7):
        lc = canonical_certificate(n).curve
        trips += 1
        if parse_curve(serialize_curve(lc)) != lc:
            bad.append(f"round-trip n={n}")
    record(9, not bad, f"300 random trees: local balancing gives global, e-2 vertices, e-3 bounded "
                       f"edges, genus 0; {trips} documents round-trip; failures={bad[:3]}")


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
