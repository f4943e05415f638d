"""Acceptance criteria 1-8, each at its stated tolerance and time limit.

Every test prints ``criterion <n> PASS|FAIL ...`` and the same lines are
repeated in the pytest terminal summary.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
import pytest

from conftest import ACCEPTANCE, FIGURE_EIGHT_CODE, TREFOIL_CODE
from oracles import brute_force_colorings, central_difference, dense_double_points
from reidemeister import models
from reidemeister.curve import IsotopyFamily
from reidemeister.diagram import extract_diagram, fox_colorings, parse_gauss, random_move_sequence
from reidemeister.errors import EndpointNotGeneric, NotAnIsotopy, ResolutionConflict, UnclassifiedEvent
from reidemeister.genericity import find_double_points
from reidemeister.tracer import DEFAULT_TRACER, trace


@dataclass
class _Note:
    detail: str = ""


@contextmanager
def criterion(n, title, limit=None):
    note = _Note()
    start = time.perf_counter()
    ok = False
    try:
        yield note
        ok = True
    finally:
        secs = time.perf_counter() - start
        if ok and limit is not None and secs >= limit:
            ok = False
            note.detail = f"over time limit {limit} s"
        ACCEPTANCE[n] = (ok, title, secs, note.detail)
        print(f"criterion {n} {'PASS' if ok else 'FAIL'} {title} ({secs:.1f} s) {note.detail}".rstrip())
    assert secs < limit if limit is not None else True, f"criterion {n} took {secs:.1f} s, limit {limit} s"


def _cdist(a, b):
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def test_1_double_points_match_dense_oracle():
    with criterion(1, "double points vs dense polyline oracle", limit=30) as note:
        worst = 0.0
        total = 0
        for seed in range(20):
            loop = models.random_loop(np.random.default_rng(seed), max_degree=6)
            locs, _ = dense_double_points(loop, m=4096)
            dps = find_double_points(loop)
            assert len(dps) == len(locs), f"seed {seed}: {len(dps)} vs oracle {len(locs)}"
            mine = np.array([dp.location for dp in dps]).reshape(-1, 2)
            for p in locs:
                worst = max(worst, float(np.min(np.linalg.norm(mine - p, axis=1))))
            for q in mine:
                worst = max(worst, float(np.min(np.linalg.norm(locs - q, axis=1))) if len(locs) else 0.0)
            total += len(dps)
        assert worst < 1e-4, f"largest location error {worst:.2e}"
        note.detail = f"crossings={total} max_error={worst:.1e}"


def test_2_standard_knots():
    with criterion(2, "trefoil and figure-eight", limit=5) as note:
        loop = models.trefoil()
        dps = find_double_points(loop)
        assert len(dps) == 3
        assert min(dp.transversality for dp in dps) > 0.1
        d = extract_diagram(loop, dps)
        assert fox_colorings(d, 3) == 9 == brute_force_colorings(d.visits, 3)
        f8 = parse_gauss(FIGURE_EIGHT_CODE)
        assert fox_colorings(f8, 3) == 3 == brute_force_colorings(f8.visits, 3)
        assert fox_colorings(f8, 5) == 25 == brute_force_colorings(f8.visits, 5)
        loop8 = models.figure_eight_knot()
        d8 = extract_diagram(loop8, find_double_points(loop8))
        assert (fox_colorings(d8, 3), fox_colorings(d8, 5)) == (3, 25)
        note.detail = f"min_transversality={min(dp.transversality for dp in dps):.3f}"


def _writhe_step(site):
    if site.kind == "R1_add":
        return 1 if site.variant[1] == "+" else -1
    if site.kind == "R1_remove":
        return -1 if site.variant == "+" else 1
    return 0


def test_3_moves_preserve_colorings():
    with criterion(3, "random move sequences preserve colorings", limit=10) as note:
        rng = np.random.default_rng(3)
        starts = [parse_gauss(TREFOIL_CODE), parse_gauss(FIGURE_EIGHT_CODE)]
        moves = 0
        for k in range(100):
            d = starts[k % 2]
            base = {n: fox_colorings(d, n) for n in (2, 3, 5, 7)}
            for site, nxt in random_move_sequence(d, int(rng.integers(1, 11)), rng):
                assert nxt.writhe - d.writhe == _writhe_step(site), site
                assert {n: fox_colorings(nxt, n) for n in (2, 3, 5, 7)} == base
                d = nxt
                moves += 1
        note.detail = f"moves={moves}"


@pytest.mark.parametrize(
    "name,make,kind,delta",
    [
        ("cusp", models.cusp_family, "Cusp", 1),
        ("tangency", models.tangency_family, "Tangency", 2),
        ("triple", models.triple_family, "Triple", 0),
    ],
)
def test_4_event_fixtures(name, make, kind, delta):
    key = {"cusp": 4.1, "tangency": 4.2, "triple": 4.3}[name]
    with criterion(key, f"{name} model family", limit=20) as note:
        script = trace(make())
        assert len(script.events) == 1
        ev = script.events[0]
        assert ev.kind == kind and abs(ev.delta_crossings) == delta
        assert script.verifications[0].checks["diagram_diff"]
        assert script.ok
        note.detail = f"t={ev.t:.9f} variant={ev.variant}"


def test_5_curl_removal():
    with criterion(5, "curl removal traces to one R1", limit=10) as note:
        script = trace(models.curl_removal_family())
        assert [e.move for e in script.events] == ["R1"]
        assert script.intervals[-1].diagram.num_crossings == 0
        assert all(a == b for a, b in script.invariants.values())
        assert script.ok
        note.detail = f"t={script.events[0].t:.9f}"


def _random_rotation_isotopy(rng):
    """Seeded rotation family; redrawn from the same stream until it is admissible."""
    for _ in range(50):
        loop = models.random_loop(rng, max_degree=4, min_degree=2)
        family = models.rotation_family(loop, rng.normal(size=3), rng.uniform(0.3, 1.5))
        try:
            return family, trace(family)
        except (EndpointNotGeneric, NotAnIsotopy):
            continue
    raise AssertionError("no admissible family in 50 draws")


def test_6_genericity_statistics():
    with criterion(6, "100 random isotopies", limit=300) as note:
        conflicts = unclassified = failed = events = 0
        min_sep = np.inf
        for seed in range(100):
            try:
                _, script = _random_rotation_isotopy(np.random.default_rng(seed))
            except ResolutionConflict:
                conflicts += 1
                continue
            except UnclassifiedEvent:
                unclassified += 1
                continue
            events += len(script.events)
            failed += not script.ok
            ts = [e.t for e in script.events]
            if len(ts) > 1:
                min_sep = min(min_sep, float(np.min(np.diff(ts))))
        note.detail = (f"events={events} conflicts={conflicts} unclassified={unclassified} "
                       f"failed_verification={failed} min_separation={min_sep:.2e}")
        assert conflicts == 0 and unclassified == 0
        assert min_sep > DEFAULT_TRACER.isolation_factor * DEFAULT_TRACER.bisect_tol
        assert failed == 0


def test_7_mirror_rejected():
    with criterion(7, "trefoil to mirror is not an isotopy", limit=30) as note:
        family = models.mirror_family()
        with pytest.raises(NotAnIsotopy) as exc:
            trace(family)
        w = exc.value.details
        p = family.at(w["t"]).eval(np.array([w["u1"], w["u2"]]))
        gap = float(np.linalg.norm(p[0] - p[1]))
        assert gap < 1e-6 and _cdist(w["u1"], w["u2"]) > 0.1
        note.detail = f"t={w['t']:.6f} u1={w['u1']:.6f} u2={w['u2']:.6f} gap={gap:.1e}"


def test_8_derivatives_match_finite_differences():
    with criterion(8, "analytic derivatives vs finite differences") as note:
        rng = np.random.default_rng(8)
        worst = 0.0
        loop = models.random_loop(rng, max_degree=6, min_degree=6)
        u = rng.uniform(0, 2 * np.pi, 100)
        for order in (1, 2, 3):
            lower = (lambda s: loop.derivative(s, order - 1)) if order > 1 else loop.eval
            fd = central_difference(lower, u)
            worst = max(worst, float(np.max(np.abs(loop.derivative(u, order) - fd))))
        family = IsotopyFamily([(t, models.random_loop(rng, 4, 4)) for t in (0.0, 0.3, 0.7, 1.0)])
        u = rng.uniform(0, 2 * np.pi, 100)
        t = rng.uniform(0.01, 0.99, 100)
        checks = {"f_u": [], "f_t": [], "f_uu": [], "f_ut": [], "f_uuu": []}
        for ui, ti in zip(u, t):
            p = family.partials(ui, ti)
            ev = lambda s, tt=ti: family.partials(s, tt)  # noqa: E731
            evt = lambda tt, s=ui: family.partials(s, tt)  # noqa: E731
            checks["f_u"].append(p.f_u - central_difference(lambda s: ev(s).f, ui))
            checks["f_uu"].append(p.f_uu - central_difference(lambda s: ev(s).f_u, ui))
            checks["f_uuu"].append(p.f_uuu - central_difference(lambda s: ev(s).f_uu, ui))
            checks["f_t"].append(p.f_t - central_difference(lambda s: evt(s).f, ti, 1e-6))
            checks["f_ut"].append(p.f_ut - central_difference(lambda s: evt(s).f_u, ti, 1e-6))
        errs = {k: float(np.max(np.abs(v))) for k, v in checks.items()}
        worst = max(worst, *errs.values())
        note.detail = f"max_error={worst:.1e}"
        assert worst < 1e-5, errs
