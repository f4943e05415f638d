import math

import numpy as np
import pytest

from oracles import dense_double_points
from reidemeister import models
from reidemeister.errors import NotEmbedded, PerturbationFailed
from reidemeister.genericity import (
    DEFAULT_CONFIG,
    GenericityConfig,
    check_embedded,
    check_immersion,
    check_no_triple,
    find_double_points,
    perturb_to_generic,
    require_embedded,
    validate,
)


def _cdist(a, b):
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def test_circle_margins():
    rep = validate(models.circle())
    assert rep.ok and rep.crossings == 0
    assert rep.margins["embedded"] == pytest.approx(1.0, abs=1e-9)
    assert rep.margins["immersion"] == pytest.approx(1.0, abs=1e-12)
    assert math.isinf(rep.margins["no_triple"]) and math.isinf(rep.margins["transverse"])


def test_circle_has_no_double_points():
    assert find_double_points(models.circle()) == []


def test_trefoil_double_points(trefoil):
    dps = find_double_points(trefoil)
    assert len(dps) == 3
    assert all(dp.transversality > 0.1 for dp in dps)
    assert [dp.u1 for dp in dps] == sorted(dp.u1 for dp in dps)
    for dp in dps:
        a, b = trefoil(dp.u1), trefoil(dp.u2)
        assert np.hypot(*(a - b)[:2]) < 1e-9
        assert abs(dp.z_gap) > 0.1


def test_figure_eight_matches_oracle():
    loop = models.figure_eight_knot()
    locs, _ = dense_double_points(loop)
    dps = find_double_points(loop)
    assert len(dps) == len(locs)


def test_vertical_tangent_is_an_immersion_offender():
    chk = check_immersion(models.vertical_tangent_loop())
    assert not chk.ok
    assert len(chk.offenders) == 1
    u = chk.offenders[0]
    assert min(u, 2 * np.pi - u) < 1e-6
    assert not validate(models.vertical_tangent_loop()).verdicts["immersion"]


def test_plane_figure_eight_is_not_embedded():
    loop = models.figure_eight_plane_curve()
    chk = check_embedded(loop)
    assert not chk.ok
    u1, u2 = sorted(_cdist(u, 0.0) for u in chk.offenders[0])
    assert u1 < 1e-6 and abs(u2 - np.pi) < 1e-6
    with pytest.raises(NotEmbedded):
        require_embedded(loop)
    assert not validate(loop).verdicts["embedded"]


def test_embedded_ratio_is_scale_free(trefoil):
    a = check_embedded(trefoil).margin
    b = check_embedded(trefoil.with_coeffs(trefoil.coeffs * 7.0)).margin
    assert b == pytest.approx(7.0 * a, rel=1e-6)


def test_concurrent_strands_fail_no_triple():
    loop = models.concurrent_triple_loop()
    rep = validate(loop)
    assert not rep.verdicts["no_triple"]
    assert rep.offenders["no_triple"]


def test_triple_check_clusters():
    dps = find_double_points(models.triple_point_loop(1.02))
    assert len(dps) == 3
    near = check_no_triple(dps, tau=1.0)
    far = check_no_triple(dps, tau=1e-6)
    assert near.clusters and not far.clusters


def test_grid_minimum():
    loop = models.trefoil()
    with pytest.raises(ValueError):
        find_double_points(loop, grid=8)
    with pytest.raises(ValueError):
        GenericityConfig(grid=8).grid_for(loop)


def test_perturb_passes_generic_input_through(trefoil):
    assert perturb_to_generic(trefoil, seed=5) is trefoil


def test_perturb_is_seeded_and_small():
    loop = models.concurrent_triple_loop()
    a = perturb_to_generic(loop, seed=3)
    b = perturb_to_generic(loop, seed=3)
    assert a == b and a != loop
    assert validate(a).ok
    assert np.max(np.abs(a.coeffs - loop.coeffs)) < 0.2 * loop.scale


def test_perturb_gives_up():
    with pytest.raises(PerturbationFailed):
        perturb_to_generic(models.concurrent_triple_loop(), seed=0, attempts=1)


def test_perturb_refuses_self_intersecting_input():
    with pytest.raises(NotEmbedded):
        perturb_to_generic(models.figure_eight_plane_curve())


@pytest.mark.parametrize("seed", range(10))
def test_random_loops_against_oracle(seed):
    rng = np.random.default_rng(seed)
    loop = models.random_loop(rng, max_degree=5)
    locs, _ = dense_double_points(loop)
    dps = find_double_points(loop)
    assert len(dps) == len(locs)
    mine = np.array([dp.location for dp in dps]).reshape(-1, 2)
    for p in locs:
        assert np.min(np.linalg.norm(mine - p, axis=1)) < 1e-4


def test_report_formats(trefoil):
    rep = validate(trefoil)
    kv = rep.to_kv()
    assert "crossings=3" in kv and "verdict=PASS" in kv
    text = rep.to_text()
    assert "verdict: PASS" in text and text.count("u1=") == 3


def test_thresholds_follow_config(trefoil):
    strict = GenericityConfig(tau_transverse=0.99)
    assert not validate(trefoil, strict).verdicts["transverse"]
    assert validate(trefoil, DEFAULT_CONFIG).verdicts["transverse"]
