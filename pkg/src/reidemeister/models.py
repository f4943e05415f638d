"""Standard loops and isotopies used by the tests, the CLI data files and
the benchmarks.

Every model is an exact trigonometric polynomial, so fitting it by FFT at
more than ``2N`` samples reproduces it to rounding error.
"""

import numpy as np

from .curve import TWO_PI, FourierLoop, IsotopyFamily


def fourier_fit(fx, fy, fz, degree):
    """Coefficients of the degree-``degree`` trigonometric interpolant of (fx, fy, fz)."""
    m = 4 * degree + 8
    u = np.arange(m) * TWO_PI / m
    rows = []
    for f in (fx, fy, fz):
        spec = np.fft.rfft(np.broadcast_to(f(u), u.shape)) / m
        row = [spec[0].real]
        for k in range(1, degree + 1):
            row += [2 * spec[k].real, -2 * spec[k].imag]
        rows.append(row)
    c = np.array(rows)
    c = np.round(c, 13) + 0.0  # models have short decimal coefficients; drop FFT noise
    return FourierLoop(c)


def circle():
    return fourier_fit(np.cos, np.sin, lambda u: 0.0 * u, 1)


def trefoil():
    """x = sin u + 2 sin 2u, y = cos u - 2 cos 2u, z = -sin 3u."""
    return fourier_fit(
        lambda u: np.sin(u) + 2 * np.sin(2 * u),
        lambda u: np.cos(u) - 2 * np.cos(2 * u),
        lambda u: -np.sin(3 * u),
        3,
    )


def figure_eight_knot():
    """x = (2 + cos 2u) cos 3u, y = (2 + cos 2u) sin 3u, z = sin 4u."""
    return fourier_fit(
        lambda u: (2 + np.cos(2 * u)) * np.cos(3 * u),
        lambda u: (2 + np.cos(2 * u)) * np.sin(3 * u),
        lambda u: np.sin(4 * u),
        5,
    )


def figure_eight_plane_curve():
    """Planar lemniscate x = sin 2u, y = sin u with z = 0: meets itself at u = 0, pi."""
    return fourier_fit(lambda u: np.sin(2 * u), np.sin, lambda u: 0.0 * u, 2)


def vertical_tangent_loop():
    """Closed curve that is (u^2/2, u^3/2, u) to leading order at u = 0.

    The projected tangent vanishes only at u = 0.
    """
    return fourier_fit(
        lambda u: 1 - np.cos(u),
        lambda u: np.sin(u) * (1 - np.cos(u)),
        np.sin,
        2,
    )


def concurrent_triple_loop(z_phase=0.3):
    """Three strands through the origin: e^{iu} + e^{-2iu}, heights sin(u + phase)."""
    return triple_point_loop(1.0, z_phase=z_phase)


def triple_point_loop(k, z_levels=None, z_phase=0.3):
    """Projection e^{iu} + k e^{-2iu}; triangle of three crossings for k near 1.

    ``z_levels`` assigns heights to the three strands through the origin at
    k = 1 (parameters pi/3, pi, 5pi/3) via a degree-one interpolant.
    """
    if z_levels is None:
        fz = lambda u: np.sin(u + z_phase)  # noqa: E731
    else:
        nodes = np.array([np.pi / 3, np.pi, 5 * np.pi / 3])
        a = np.column_stack([np.ones(3), np.cos(nodes), np.sin(nodes)])
        c0, c1, s1 = np.linalg.solve(a, np.asarray(z_levels, dtype=float))
        fz = lambda u: c0 + c1 * np.cos(u) + s1 * np.sin(u)  # noqa: E731
    return fourier_fit(
        lambda u: np.cos(u) + k * np.cos(2 * u),
        lambda u: np.sin(u) - k * np.sin(2 * u),
        fz,
        2,
    )


def limacon(b, a=1.0, height=0.5):
    """r = b + a cos u in the plane, z = height * sin u.

    For a > b the projection has one inner curl; a = b is the cardioid cusp.
    """
    r = lambda u: b + a * np.cos(u)  # noqa: E731
    return fourier_fit(lambda u: r(u) * np.cos(u), lambda u: r(u) * np.sin(u), lambda u: height * np.sin(u), 2)


def dented_circle(h, opposite=True, height=0.5):
    """Unit circle whose top (and, if ``opposite``, bottom) is pushed in by ``h``.

    One-sided dents touch at h = 2 with both arcs curving the same way; the
    two-sided version touches at h = 1 with the arcs curving apart.
    """
    if opposite:
        fy = lambda u: np.sin(u) - h * (1 + np.sin(u)) ** 3 / 8 + h * (1 - np.sin(u)) ** 3 / 8  # noqa: E731
    else:
        fy = lambda u: np.sin(u) - h * (1 + np.sin(u)) ** 3 / 8  # noqa: E731
    return fourier_fit(np.cos, fy, lambda u: height * np.sin(u), 3)


# ---------------------------------------------------------------------------
# isotopies


def cusp_family(reverse=False, height=0.5):
    """Limaçon losing its curl (b: 0.7 -> 1.3); event at t = 0.5."""
    ends = [limacon(0.7, height=height), limacon(1.3, height=height)]
    if reverse:
        ends.reverse()
    return IsotopyFamily([(0.0, ends[0]), (1.0, ends[1])])


def curl_removal_family():
    """One-curl unknot straightened to a round circle (limaçon -> circle)."""
    return IsotopyFamily([(0.0, limacon(0.6, 1.0)), (1.0, limacon(1.0, 0.0))])


def tangency_family(opposite=True, reverse=False, height=0.5):
    """Two arcs pushed through each other, creating two crossings."""
    lo, hi = (0.8, 1.2) if opposite else (1.8, 2.2)
    ends = [dented_circle(lo, opposite, height), dented_circle(hi, opposite, height)]
    if reverse:
        ends.reverse()
    return IsotopyFamily([(0.0, ends[0]), (1.0, ends[1])])


def triple_family(z_levels=(1.0, 0.0, -1.0), reverse=False):
    """Triangle of crossings collapsing through a triple point at t = 0.5."""
    ends = [triple_point_loop(0.9, z_levels), triple_point_loop(1.1, z_levels)]
    if reverse:
        ends.reverse()
    return IsotopyFamily([(0.0, ends[0]), (1.0, ends[1])])


def cusp_then_tangency_family():
    """Curl removed first (R1), then the round circle is dented through itself (R2)."""
    return IsotopyFamily([
        (0.0, limacon(0.6, 1.0).padded(3)),
        (0.4, limacon(1.0, 0.0).padded(3)),
        (0.6, dented_circle(0.8)),
        (1.0, dented_circle(1.2)),
    ])


def mirror_family(loop=None):
    """Straight-line interpolation from a knot to its mirror image."""
    loop = trefoil() if loop is None else loop
    return IsotopyFamily([(0.0, loop), (1.0, loop.mirrored())])


def rotation_matrix(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def rotation_family(loop, axis=(0.0, 0.0, 1.0), angle=np.pi / 2, keyframes=9):
    """Keyframes R(s * angle) f for s in [0, 1]; nearly rigid between keyframes."""
    ts = np.linspace(0.0, 1.0, keyframes)
    return IsotopyFamily([(float(t), loop.transformed(rotation_matrix(axis, t * angle))) for t in ts])


def perturbed_family(loop, seed=0, magnitude=1e-3, keyframes=3):
    rng = np.random.default_rng(seed)
    amp = magnitude * loop.scale
    frames = [(0.0, loop)]
    for t in np.linspace(0.0, 1.0, keyframes)[1:]:
        frames.append((float(t), loop.with_coeffs(loop.coeffs + rng.uniform(-amp, amp, loop.coeffs.shape))))
    return IsotopyFamily(frames)


def random_loop(rng, max_degree=6, min_degree=2):
    n = int(rng.integers(min_degree, max_degree + 1))
    return FourierLoop(rng.uniform(-1.0, 1.0, size=(3, 2 * n + 1)))
