import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import central_difference
from reidemeister import models
from reidemeister.curve import (
    FourierLoop,
    IsotopyFamily,
    format_family,
    format_loop,
    parse_family,
    parse_loop,
    project,
)
from reidemeister.errors import SpecParseError

coeff = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def loops(draw, max_degree=5):
    n = draw(st.integers(1, max_degree))
    return FourierLoop(draw(arrays(float, (3, 2 * n + 1), elements=coeff)))


def test_explicit_terms():
    loop = FourierLoop.from_terms(2, x={0: 1.0, (1, "cos"): 2.0}, y={(2, "sin"): 3.0}, z={(1, "sin"): -1.0})
    u = np.linspace(0, 6, 7)
    expect = np.stack([1 + 2 * np.cos(u), 3 * np.sin(2 * u), -np.sin(u)], axis=-1)
    np.testing.assert_allclose(loop(u), expect, atol=1e-14)
    np.testing.assert_allclose(loop.eval(0.5), expect[0] * 0 + [1 + 2 * np.cos(0.5), 3 * np.sin(1.0), -np.sin(0.5)])


def test_circle_is_unit_speed():
    u = np.linspace(0, 2 * np.pi, 50)
    np.testing.assert_allclose(np.linalg.norm(project(models.circle().derivative(u)), axis=-1), 1.0)


@given(loops(), st.floats(0, 2 * np.pi), st.integers(1, 5))
def test_derivative_matches_finite_difference(loop, u, order):
    lower = (lambda v: loop.eval(v)) if order == 1 else (lambda v: loop.derivative(v, order - 1))
    fd = central_difference(lower, u)
    exact = loop.derivative(u, order)
    scale = max(1.0, loop.scale) * (loop.degree ** (order + 2))
    np.testing.assert_allclose(exact, fd, atol=1e-5 * scale)


def test_periodicity():
    loop = models.trefoil()
    u = np.linspace(0, 1, 5)
    np.testing.assert_allclose(loop(u), loop(u + 2 * np.pi), atol=1e-12)


def test_bad_shapes_and_cap():
    with pytest.raises(ValueError):
        FourierLoop(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        FourierLoop(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        FourierLoop(np.zeros((3, 2 * 65 + 1)))
    with pytest.raises(ValueError):
        FourierLoop([[np.nan, 0, 0]] * 3)
    with pytest.raises(ValueError):
        models.trefoil().derivative(0.0, 0)


def test_mirror_and_transform():
    loop = models.trefoil()
    u = np.linspace(0, 6, 9)
    m = loop.mirrored()(u)
    np.testing.assert_allclose(m[:, :2], loop(u)[:, :2])
    np.testing.assert_allclose(m[:, 2], -loop(u)[:, 2])
    r = models.rotation_matrix((0, 0, 1), 0.7)
    np.testing.assert_allclose(loop.transformed(r, (1, 2, 3))(u), loop(u) @ r.T + [1, 2, 3], atol=1e-12)


@given(loops())
def test_loop_text_round_trip(loop):
    assert parse_loop(format_loop(loop)) == loop


def test_family_text_round_trip():
    fam = models.cusp_then_tangency_family()
    back = parse_family(format_family(fam))
    assert back.keyframes == fam.keyframes


def test_comments_and_blank_lines():
    text = "# a circle\n\ndegree 1  # one term\nx: 0 1 0\ny: 0 0 1\nz: 0 0 0\n"
    assert parse_loop(text) == models.circle()


@pytest.mark.parametrize(
    "text, line",
    [
        ("degree 2\nx: 0 1 0 0 0\ny: 0 0 1\n", 3),
        ("degree 1\nx: 0 1 0\ny: 0 0 1\n", 4),  # missing row: first line past the end
        ("degree two\n", 1),
        ("degree 1\nx: 0 1 zero\ny: 0 0 1\nz: 0 0 0\n", 2),
        ("degree 1\nx: 0 1 0\nw: 0 0 1\nz: 0 0 0\n", 3),
        ("degree 99\n", 1),
        ("", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(SpecParseError) as exc:
        parse_loop(text)
    assert exc.value.details["line"] == line


def test_family_parse_errors():
    loop = format_loop(models.circle())
    with pytest.raises(SpecParseError):
        parse_family(f"keyframe t=0\n{loop}keyframe t=abc\n{loop}")
    with pytest.raises((SpecParseError, ValueError)):
        parse_family(f"keyframe t=0\n{loop}keyframe t=0.5\n{loop}")


# --- isotopies ---------------------------------------------------------------


def _family(rng, frames=4, degree=3):
    times = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 0.9, frames - 2)), [1.0]])
    return IsotopyFamily([(t, FourierLoop(rng.normal(size=(3, 2 * degree + 1)))) for t in times])


def test_family_hits_keyframes(rng):
    fam = _family(rng)
    for t, loop in fam.keyframes:
        assert fam.at(t) == loop


def test_family_time_partials(rng):
    fam = _family(rng)
    for _ in range(50):
        u, t = rng.uniform(0, 2 * np.pi), rng.uniform(0.01, 0.99)
        p = fam.partials(u, t)
        np.testing.assert_allclose(p.f_t, central_difference(lambda s: fam.at(s).eval(u), t, 1e-6), atol=1e-5)
        np.testing.assert_allclose(
            p.f_ut, central_difference(lambda s: fam.at(s).derivative(u, 1), t, 1e-6), atol=1e-5
        )
        np.testing.assert_allclose(p.f_uu, fam.at(t).derivative(u, 2))


def test_family_is_c1_across_knots(rng):
    fam = _family(rng, frames=5)
    for t in fam.times[1:-1]:
        lo, hi = fam.coefficients(t - 1e-9), fam.coefficients(t + 1e-9)
        np.testing.assert_allclose(lo[0], hi[0], atol=1e-7)
        np.testing.assert_allclose(lo[1], hi[1], atol=1e-6)


def test_family_end_slopes_vanish(rng):
    fam = _family(rng)
    for t in (0.0, 1.0):
        np.testing.assert_allclose(fam.coefficients(t)[1], 0.0, atol=1e-12)


def test_family_validation():
    c = models.circle()
    with pytest.raises(ValueError):
        IsotopyFamily([(0.0, c)])
    with pytest.raises(ValueError):
        IsotopyFamily([(0.1, c), (1.0, c)])
    with pytest.raises(ValueError):
        IsotopyFamily([(0.0, c), (1.0, models.trefoil())])
    fam = IsotopyFamily.constant(c)
    with pytest.raises(ValueError):
        fam.at(1.5)
    assert fam.at(0.3) == c
