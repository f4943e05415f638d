"""Follow an isotopy through time and turn its singular moments into
Reidemeister moves.

The pipeline:

1. ``check_injectivity_through_time`` rejects families whose loops collide
   in R^3 at some time.
2. ``localize_events`` samples the diagram on a time grid, brackets every
   change of the (canonical) Gauss word, bisects each bracket down to
   ``bisect_tol`` and then solves the square system that defines the event:

   * cusp: ``p f_u(u, t) = 0`` (2 equations, unknowns u, t)
   * tangency: ``p f(u1) = p f(u2)``, ``p f_u(u1) x p f_u(u2) = 0`` (3 / 3)
   * triple point: ``p f(u1) = p f(u2) = p f(u3)`` (4 / 4)

3. ``classify_*`` read the local Taylor data at the solved point and predict
   the move (kind, variant, creation or annihilation).
4. ``trace`` extracts the diagram on every interval between events and
   checks each prediction against the diagrams on both sides.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .curve import TWO_PI, project
from .diagram import (
    Diagram,
    Visit,
    apply_move,
    canonical_diagram,
    enumerate_move_sites,
    extract_diagram,
    fox_colorings,
    isomorphic,
)
from .errors import (
    DegenerateCusp,
    DegenerateTangency,
    DegenerateTriple,
    EndpointNotGeneric,
    KnotError,
    NotAnIsotopy,
    ResolutionConflict,
    UnclassifiedEvent,
)
from .genericity import (
    DEFAULT_CONFIG,
    GenericityConfig,
    check_immersion,
    check_no_triple,
    find_double_points,
    thresholds_for,
    validate,
)


@dataclass(frozen=True)
class TracerConfig:
    t_grid: int = 512
    bisect_tol: float = 1e-8
    genericity: GenericityConfig = DEFAULT_CONFIG
    injectivity_grid: int = 128
    injectivity_tol: float = 1e-9  # x scale; refined 3D collision residual
    newton_tol: float = 1e-12
    degenerate_tol: float = 1e-6  # x scale; classification data below this is refused
    angle_tol: float = 1e-6  # |sin| between strands at a triple point
    isolation_factor: float = 10.0
    grid_factor: int = 4  # sampled diagrams lag true events by ~h^2; refine h
    near_gap: float = 1e-3  # closer than this to an event, diagrams are sampled on a finer grid
    max_grid: int = 16384
    coloring_moduli: tuple = (3, 5)


DEFAULT_TRACER = TracerConfig()


def _grid(family_or_loop, config):
    loop = family_or_loop.loops[0] if hasattr(family_or_loop, "loops") else family_or_loop
    return config.genericity.grid_for(loop) * config.grid_factor


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _perp(v):
    return np.array([-v[1], v[0]])


def _cyclic_mid(a, b):
    return float(a + 0.5 * (((b - a) + np.pi) % TWO_PI - np.pi))


def _cyclic_dist(a, b):
    d = abs((a - b) % TWO_PI)
    return min(d, TWO_PI - d)


# ---------------------------------------------------------------------------
# 3D injectivity


@dataclass(frozen=True)
class InjectivityResult:
    margin: float
    worst_t: float
    worst_pair: tuple


def _refine_collision_3d(family, u1, u2, t, tol, max_iter=60):
    x = np.array([u1, u2, t], dtype=float)
    for _ in range(max_iter):
        x[2] = min(max(x[2], 0.0), 1.0)
        p1 = family.partials(x[0], x[2])
        p2 = family.partials(x[1], x[2])
        g = p1.f - p2.f
        if np.linalg.norm(g) < tol:
            return x, float(np.linalg.norm(g))
        jac = np.column_stack([p1.f_u, -p2.f_u, p1.f_t - p2.f_t])
        try:
            step = np.linalg.solve(jac, g)
        except np.linalg.LinAlgError:
            break
        if np.linalg.norm(step) > 0.5:
            step *= 0.5 / np.linalg.norm(step)
        x -= step
    p1 = family.partials(x[0], min(max(x[2], 0.0), 1.0))
    p2 = family.partials(x[1], min(max(x[2], 0.0), 1.0))
    return x, float(np.linalg.norm(p1.f - p2.f))


def check_injectivity_through_time(family, t_grid=None, u_grid=None, tol=None, config=DEFAULT_TRACER):
    """Scan the chord ratio over (u1, u2) on a time grid; refine the lowest dips.

    Raises :class:`NotAnIsotopy` with a refined witness ``(t, u1, u2)`` when a
    genuine 3D collision is found.
    """
    t_grid = t_grid or config.t_grid
    m = u_grid or config.injectivity_grid
    m = max(m, 4 * family.degree)
    scale = max(loop.scale for loop in family.loops)
    tol = tol if tol is not None else config.injectivity_tol * scale
    ts = np.linspace(0.0, 1.0, t_grid)
    u = np.arange(m) * TWO_PI / m
    mins = np.empty(t_grid)
    pairs = []
    for k, t in enumerate(ts):
        pts = np.ascontiguousarray(family.at(t).eval(u))
        val, i, j = kernels.min_pair_ratio(pts)
        mins[k] = val
        pairs.append((u[i], u[j]))
    k_best = int(np.argmin(mins))
    local = [k for k in range(t_grid)
             if mins[k] <= mins[max(k - 1, 0)] and mins[k] <= mins[min(k + 1, t_grid - 1)]]
    local.sort(key=lambda k: mins[k])
    for k in local[:8]:
        x, res = _refine_collision_3d(family, pairs[k][0], pairs[k][1], ts[k], tol)
        if res < tol and 0.0 <= x[2] <= 1.0 and _cyclic_dist(x[0], x[1]) > 1e-3:
            u1, u2 = sorted((float(x[0] % TWO_PI), float(x[1] % TWO_PI)))
            raise NotAnIsotopy("strands pass through each other in R^3", t=float(x[2]), u1=u1, u2=u2)
    result = InjectivityResult(float(mins[k_best]), float(ts[k_best]), pairs[k_best])
    if result.margin <= config.genericity.tau_embedded * scale:
        raise NotAnIsotopy("3D separation margin below threshold", t=result.worst_t,
                           u1=float(pairs[k_best][0]), u2=float(pairs[k_best][1]))
    return result


# ---------------------------------------------------------------------------
# margins and sampled diagrams


def margin_functions(family, t, config=DEFAULT_TRACER):
    """Immersion, triple-separation and transversality margins of the loop at t."""
    loop = family.at(t)
    gcfg = config.genericity
    m = gcfg.grid_for(loop)
    th = thresholds_for(loop, gcfg)
    m1 = check_immersion(loop, m, th["immersion"]).margin
    try:
        dps = find_double_points(loop, m, gcfg.newton_tol * max(loop.scale, 1.0), gcfg.band)
    except KnotError:
        return {"m1": m1, "m2": 0.0, "m3": 0.0}
    m2 = check_no_triple(dps, th["no_triple"]).margin
    m3 = min((dp.transversality for dp in dps), default=math.inf)
    return {"m1": m1, "m2": m2, "m3": m3}


@dataclass(frozen=True)
class _Sample:
    t: float
    key: tuple
    count: int
    u1: np.ndarray
    u2: np.ndarray
    loc: np.ndarray
    sine: np.ndarray


def _sample(family, t, m, band):
    """Gauss word of the sampled polyline (no Newton refinement)."""
    loop = family.at(t)
    h = TWO_PI / m
    u = np.arange(m) * h
    pts = loop.eval(u)
    i, j, s, r = kernels.segment_crossings(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), band)
    nxt_i, nxt_j = (i + 1) % m, (j + 1) % m
    di = pts[nxt_i, :2] - pts[i, :2]
    dj = pts[nxt_j, :2] - pts[j, :2]
    z1 = pts[i, 2] * (1 - s) + pts[nxt_i, 2] * s
    z2 = pts[j, 2] * (1 - r) + pts[nxt_j, 2] * r
    cr = _cross(di, dj)
    sine = cr / (np.linalg.norm(di, axis=1) * np.linalg.norm(dj, axis=1) + 1e-300)
    loc = pts[i, :2] + s[:, None] * di
    passages = []
    for k in range(len(i)):
        first_over = bool(z1[k] > z2[k])
        sign = 1 if (cr[k] > 0) == first_over else -1
        passages.append(((i[k] + s[k]) * h, k, first_over, sign))
        passages.append(((j[k] + r[k]) * h, k, not first_over, sign))
    passages.sort()
    d = Diagram((Visit(k, o, sg) for _, k, o, sg in passages), check=False)
    return _Sample(t, d.canonical, len(i), (i + s) * h, (j + r) * h, loc, sine)


# ---------------------------------------------------------------------------
# Newton solves for the defining systems


def _newton(fun, x0, tol, max_iter=60, t_index=None):
    x = np.array(x0, dtype=float)
    for _ in range(max_iter):
        if t_index is not None:
            x[t_index] = min(max(x[t_index], 0.0), 1.0)
        g, jac = fun(x)
        if np.linalg.norm(g) < tol:
            return x
        try:
            step = np.linalg.solve(jac, g)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        norm = np.linalg.norm(step)
        if norm > 0.2:
            step *= 0.2 / norm
        x = x - step
    g, _ = fun(x)
    return x if np.linalg.norm(g) < tol else None


def _cusp_system(family):
    def fun(x):
        u, t = x
        p = family.partials(u, t)
        g = project(p.f_u)
        jac = np.column_stack([project(p.f_uu), project(p.f_ut)])
        return g, jac
    return fun


def _tangency_system(family):
    def fun(x):
        u1, u2, t = x
        a, b = family.partials(u1, t), family.partials(u2, t)
        ta, tb = project(a.f_u), project(b.f_u)
        g = np.concatenate([project(a.f - b.f), [_cross(ta, tb)]])
        jac = np.array([
            [ta[0], -tb[0], a.f_t[0] - b.f_t[0]],
            [ta[1], -tb[1], a.f_t[1] - b.f_t[1]],
            [_cross(project(a.f_uu), tb), _cross(ta, project(b.f_uu)),
             _cross(project(a.f_ut), tb) + _cross(ta, project(b.f_ut))],
        ])
        return g, jac
    return fun


def _triple_system(family):
    def fun(x):
        u1, u2, u3, t = x
        a, b, c = (family.partials(v, t) for v in (u1, u2, u3))
        g = np.concatenate([project(a.f - b.f), project(a.f - c.f)])
        ta, tb, tc = project(a.f_u), project(b.f_u), project(c.f_u)
        jac = np.zeros((4, 4))
        jac[0:2, 0] = ta
        jac[0:2, 1] = -tb
        jac[0:2, 3] = project(a.f_t - b.f_t)
        jac[2:4, 0] = ta
        jac[2:4, 2] = -tc
        jac[2:4, 3] = project(a.f_t - c.f_t)
        return g, jac
    return fun


# ---------------------------------------------------------------------------
# localisation

CONDITION_OF_KIND = {"Cusp": 1, "Triple": 2, "Tangency": 3}


@dataclass(frozen=True)
class EventLocation:
    t: float
    kind: str  # Cusp | Tangency | Triple
    locations: tuple
    bracket: tuple
    sampled_delta: int  # crossing-count change of the sampled polyline across the bracket

    @property
    def condition(self):
        return CONDITION_OF_KIND[self.kind]


def _endpoint_check(family, config):
    for t in (0.0, 1.0):
        rep = validate(family.at(t), config.genericity)
        if not rep.ok:
            bad = [c for c, v in rep.verdicts.items() if not v]
            raise EndpointNotGeneric(f"loop at t={t:g} is not generic", t=t, failed=",".join(bad))


def _seed_cusp(family, t, m, sides=()):
    """Midpoints of the shortest curls seen on either side, then minima of |p f_u|."""
    seeds = []
    for side in sides:
        if side.count == 0:
            continue
        span = (side.u2 - side.u1) % TWO_PI
        span = np.minimum(span, TWO_PI - span)
        k = int(np.argmin(span))
        lo, hi = side.u1[k], side.u2[k]
        mid = 0.5 * (lo + hi) if hi - lo <= np.pi else 0.5 * (lo + hi) + np.pi
        seeds.append(float(mid % TWO_PI))
    u = np.arange(4 * m) * TWO_PI / (4 * m)
    speed = np.linalg.norm(project(family.at(t).derivative(u, 1)), axis=-1)
    picked = []
    for k in np.argsort(speed):
        if all(_cyclic_dist(u[k], s) > 0.05 for s in picked):
            picked.append(u[k])
        if len(picked) == 3:
            break
    return seeds + picked


def _seed_tangency(sample, limit=4):
    """Bigons (two crossings of the same pair of strands) first, then shallow crossings."""
    pairs = []
    for a, b in combinations(range(sample.count), 2):
        d1 = _cyclic_dist(sample.u1[a], sample.u1[b]) + _cyclic_dist(sample.u2[a], sample.u2[b])
        d2 = _cyclic_dist(sample.u1[a], sample.u2[b]) + _cyclic_dist(sample.u2[a], sample.u1[b])
        if min(d1, d2) < 0.5:
            ua, ub = (sample.u1[b], sample.u2[b]) if d1 <= d2 else (sample.u2[b], sample.u1[b])
            pairs.append((min(d1, d2), (_cyclic_mid(sample.u1[a], ua), _cyclic_mid(sample.u2[a], ub))))
    pairs.sort()
    order = np.argsort(np.abs(sample.sine))
    return [p for _, p in pairs[:limit]] + [(sample.u1[k], sample.u2[k]) for k in order[:limit]]


def _seed_triple(sample, limit=6):
    """Pairs of nearby crossings that share a strand give (shared, other, other)."""
    n = sample.count
    cands = []
    for a, b in combinations(range(n), 2):
        pa = (sample.u1[a], sample.u2[a])
        pb = (sample.u1[b], sample.u2[b])
        for i in range(2):
            for j in range(2):
                if _cyclic_dist(pa[i], pb[j]) < 0.25 and _cyclic_dist(pa[1 - i], pb[1 - j]) > 0.25:
                    gap = float(np.linalg.norm(sample.loc[a] - sample.loc[b]))
                    cands.append((gap, (_cyclic_mid(pa[i], pb[j]), float(pa[1 - i]), float(pb[1 - j]))))
    cands.sort()
    return [c for _, c in cands[:limit]]


def _solve_event(family, kind, sa, sb, config, m, window):
    """Solutions of one defining system seeded near the bracket, nearest first."""
    tm = 0.5 * (sa.t + sb.t)
    tol = config.newton_tol * max(max(lp.scale for lp in family.loops), 1.0)
    sep = 0.25 * TWO_PI / m  # the tangency and triple systems also vanish on a cusp with u1 = u2
    sols = []

    def keep(t, us):
        us = tuple(sorted(float(v % TWO_PI) for v in us))
        if abs(t - tm) > window:
            return
        if any(_cyclic_dist(us[i], us[j]) <= sep for i, j in combinations(range(len(us)), 2)):
            return
        sols.append((float(t), us, kind))

    sides = sorted((sa, sb), key=lambda s: -s.count)
    if kind == "Cusp":
        for u0 in _seed_cusp(family, tm, m, sides):
            x = _newton(_cusp_system(family), [u0, tm], tol, t_index=1)
            if x is not None:
                keep(x[1], x[:1])
    elif kind == "Tangency":
        for side in sides:
            for u1, u2 in _seed_tangency(side):
                x = _newton(_tangency_system(family), [u1, u2, tm], tol, t_index=2)
                if x is not None:
                    keep(x[2], x[:2])
    else:
        for side in sides:
            for us in _seed_triple(side):
                x = _newton(_triple_system(family), [*us, tm], tol, t_index=3)
                if x is not None:
                    keep(x[3], x[:3])
    sols.sort(key=lambda x: abs(x[0] - tm))
    return sols


_KIND_BY_DELTA = {1: "Cusp", 2: "Tangency", 0: "Triple"}


def _flicker(family, sa, sb, step, config):
    """True if the refined diagrams on both sides of a bracket agree (polyline artefact)."""
    try:
        lo = diagram_at(family, max(sa.t - step, 0.0), config)
        hi = diagram_at(family, min(sb.t + step, 1.0), config)
    except KnotError:
        return False
    return isomorphic(lo, hi)


def localize_events(family, config=DEFAULT_TRACER, check_endpoints=True):
    """Events sorted by time, each solved to the defining system's tolerance."""
    if check_endpoints:
        _endpoint_check(family, config)
    gcfg = config.genericity
    m = _grid(family, config)
    band = gcfg.band
    ts = np.linspace(0.0, 1.0, config.t_grid)
    samples = [_sample(family, t, m, band) for t in ts]
    brackets = []

    def resolve(sa, sb, depth=0):
        a, b = sa.t, sb.t
        while b - a > config.bisect_tol:
            sm = _sample(family, 0.5 * (a + b), m, band)
            if sm.key == sa.key:
                sa, a = sm, sm.t
            elif sm.key == sb.key:
                sb, b = sm, sm.t
            else:
                if depth > 40:
                    raise ResolutionConflict("diagram changes too often inside one bracket", t=0.5 * (a + b))
                resolve(sa, sm, depth + 1)
                resolve(sm, sb, depth + 1)
                return
        brackets.append((sa, sb))

    for s0, s1 in zip(samples, samples[1:]):
        if s0.key != s1.key:
            resolve(s0, s1)

    step = 1.0 / (config.t_grid - 1)
    events = []
    for sa, sb in brackets:
        dc = sb.count - sa.count
        if abs(dc) > 2:
            raise ResolutionConflict(
                f"crossing count jumps by {dc} inside one bracket", t_a=sa.t, t_b=sb.t
            )
        # near a tangency the sampled polyline can lose one crossing of the
        # pair, so the count change only suggests which system to try first
        first = _KIND_BY_DELTA[abs(dc)]
        sols = _solve_event(family, first, sa, sb, config, m, 4 * step)
        if not sols:
            sols = sorted((x for k in ("Cusp", "Tangency", "Triple") if k != first
                           for x in _solve_event(family, k, sa, sb, config, m, 4 * step)),
                          key=lambda x: abs(x[0] - 0.5 * (sa.t + sb.t)))
        sol = sols[0] if sols else None
        if sol is None:
            if _flicker(family, sa, sb, step, config):
                continue
            raise UnclassifiedEvent(
                "diagram changes but no singular configuration solves nearby",
                t_a=sa.t, t_b=sb.t, delta_crossings=dc,
            )
        t_star, locs, kind = sol
        ev = EventLocation(t_star, kind, locs, (sa.t, sb.t), dc)
        dup = any(
            e.kind == ev.kind and abs(e.t - ev.t) < 1e-7
            and all(_cyclic_dist(p, q) < 1e-5 for p, q in zip(e.locations, ev.locations))
            for e in events
        )
        if not dup:
            events.append(ev)
    events.sort(key=lambda e: e.t)
    for e0, e1 in zip(events, events[1:]):
        if e1.t - e0.t <= config.isolation_factor * config.bisect_tol:
            raise ResolutionConflict("two events closer than the resolution", t1=e0.t, t2=e1.t)
    return events


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class SingularEvent:
    t: float
    kind: str
    locations: tuple
    data: dict
    move: str  # R1 | R2 | R3
    variant: str
    direction: str  # creation | annihilation | slide
    delta_crossings: int
    delta_writhe: int

    def line(self):
        extras = " ".join(f"{k}={_fmt(v)}" for k, v in self.data.items() if not isinstance(v, (tuple, list)))
        locs = ",".join(f"{u:.9f}" for u in self.locations)
        return (f"event t={self.t:.10f} kind={self.move} variant={self.variant} direction={self.direction} "
                f"delta_crossings={self.delta_crossings:+d} singularity={self.kind} u=({locs}) {extras}")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _degenerate_tol(family, config):
    return config.degenerate_tol * max(max(lp.scale for lp in family.loops), 1e-300)


def classify_cusp(family, t, u, config=DEFAULT_TRACER):
    """R1 from the cusp normal form.

    In the frame where ``p f_uu = (b_x, 0)`` with ``b_x > 0`` the projected
    curve near (u, t) is ``(b_x e^2/2 + d_x s, c_y e^3/6 + e_y e s + d_y s)``
    (e = u - u*, s = t - t*).  The two branches meet at ``e^2 = -6 e_y s / c_y``,
    so the curl exists for ``s`` of sign ``-sign(e_y c_y)``; the later branch
    (e > 0) is on top iff ``a_z > 0`` and the curl's crossing sign is
    ``sign(a_z c_y)``.
    """
    p = family.partials(u, t)
    tol = _degenerate_tol(family, config)
    a_z = float(p.f_u[2])
    bvec = project(p.f_uu)
    b_x = float(np.linalg.norm(bvec))
    if b_x <= tol:
        raise DegenerateCusp("second derivative projects to zero", t=t, u=u, b_x=b_x)
    ex = bvec / b_x
    ey = _perp(ex)
    c_y = float(project(p.f_uuu) @ ey)
    e_y = float(project(p.f_ut) @ ey)
    d_x = float(project(p.f_t) @ ex)
    d_y = float(project(p.f_t) @ ey)
    for name, val in (("a_z", a_z), ("c_y", c_y), ("e_y", e_y)):
        if abs(val) <= tol:
            raise DegenerateCusp(f"{name} vanishes at the cusp", t=t, u=u, **{name: val})
    creation = e_y * c_y < 0
    sign = 1 if a_z * c_y > 0 else -1
    first = "U" if a_z > 0 else "O"
    delta = 1 if creation else -1
    data = {"a_z": a_z, "b_x": b_x, "c_y": c_y, "d_x": d_x, "d_y": d_y, "e_y": e_y,
            "curl_sign": sign, "curl_side": "after" if creation else "before"}
    return SingularEvent(t, "Cusp", (u,), data, "R1", f"{first}{'+' if sign > 0 else '-'}",
                         "creation" if creation else "annihilation", delta, sign * delta)


def classify_tangency(family, t, u1, u2, config=DEFAULT_TRACER):
    """R2 from two osculating parabolas ``y_i = b_i x^2`` and their relative drift."""
    tol = _degenerate_tol(family, config)
    pa, pb = family.partials(u1, t), family.partials(u2, t)
    t1, t2 = project(pa.f_u), project(pb.f_u)
    ex = t1 / np.linalg.norm(t1)
    ey = _perp(ex)
    b1 = float(_cross(ex, project(pa.f_uu)) / (2 * (t1 @ ex) ** 2))
    b2 = float(_cross(ex, project(pb.f_uu)) / (2 * (t2 @ ex) ** 2))
    drift = float(ey @ project(pa.f_t - pb.f_t))
    if abs(b1 - b2) <= tol:
        raise DegenerateTangency("parabolas have equal curvature", t=t, b1=b1, b2=b2)
    if abs(drift) <= tol:
        raise DegenerateTangency("no relative drift across the tangency", t=t, drift=drift)
    creation = drift * (b1 - b2) < 0
    z_gap = float(pa.f[2] - pb.f[2])
    if abs(z_gap) <= tol:
        raise DegenerateTangency("strands at equal height", t=t, z_gap=z_gap)
    config_tag = "opposite" if b1 * b2 < 0 else "same"
    over = 1 if z_gap > 0 else 2
    data = {"b1": b1, "b2": b2, "drift": drift, "z_gap": z_gap, "parabolas": config_tag,
            "parallel": "same" if t1 @ t2 > 0 else "anti"}
    delta = 2 if creation else -2
    return SingularEvent(t, "Tangency", (u1, u2), data, "R2", f"strand{over}_over_{config_tag}",
                         "creation" if creation else "annihilation", delta, 0)


def classify_triple(family, t, u1, u2, u3, config=DEFAULT_TRACER):
    """R3 from three lines ``m + s w_i + e v_i`` through a common point.

    For each strand the crossing of the other two moves with velocity ``q``;
    its normal speed relative to the strand, ``v_i x (q - w_i) / |v_i|``, says
    from which side that crossing is swept across.
    """
    tol = _degenerate_tol(family, config)
    ps = [family.partials(u, t) for u in (u1, u2, u3)]
    v = [project(p.f_u) for p in ps]
    w = [project(p.f_t) for p in ps]
    z = [float(p.f[2]) for p in ps]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        s = _cross(v[i], v[j]) / (np.linalg.norm(v[i]) * np.linalg.norm(v[j]))
        if abs(s) <= config.angle_tol:
            raise DegenerateTriple("two strands nearly parallel at the triple point", t=t, pair=(i + 1, j + 1))
    sweep = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        # w_j + a v_j = w_k + b v_k
        mat = np.column_stack([v[j], -v[k]])
        a, _ = np.linalg.solve(mat, w[k] - w[j])
        q = w[j] + a * v[j]
        sweep.append(float(_cross(v[i], q - w[i]) / np.linalg.norm(v[i])))
    if min(abs(s) for s in sweep) <= tol:
        raise DegenerateTriple("relative drift is tangent to a strand", t=t, sweep=tuple(sweep))
    order = sorted(range(3), key=lambda i: -z[i])
    if min(abs(z[order[0]] - z[order[1]]), abs(z[order[1]] - z[order[2]])) <= tol:
        raise DegenerateTriple("two strands at equal height", t=t)
    mover = int(np.argmax(np.abs(sweep)))
    variant = "top{}_mid{}_bot{}".format(*(i + 1 for i in order))
    data = {"sweep1": sweep[0], "sweep2": sweep[1], "sweep3": sweep[2], "moving_strand": mover + 1,
            "z1": z[0], "z2": z[1], "z3": z[2]}
    return SingularEvent(t, "Triple", (u1, u2, u3), data, "R3", variant, "slide", 0, 0)


def classify(family, loc, config=DEFAULT_TRACER):
    if loc.kind == "Cusp":
        return classify_cusp(family, loc.t, *loc.locations, config=config)
    if loc.kind == "Tangency":
        return classify_tangency(family, loc.t, *loc.locations, config=config)
    return classify_triple(family, loc.t, *loc.locations, config=config)


# ---------------------------------------------------------------------------
# full trace


def diagram_at(family, t, config=DEFAULT_TRACER, gap=math.inf):
    """Extracted diagram at time t, ``gap`` away from the nearest known event.

    Curls and tangent pairs near an event have size ~ sqrt(gap), so the grid
    grows like gap^-1/2 below ``near_gap``; a Newton failure (typically a
    polyline crossing with no true crossing behind it) is retried on a
    doubled grid.
    """
    loop = family.at(t)
    gcfg = config.genericity
    base = _grid(loop, config)
    m = base
    if gap < config.near_gap:
        want = base * math.sqrt(config.near_gap / max(gap, 1e-300))
        while m < want and m < config.max_grid:
            m *= 2
    tol = gcfg.newton_tol * max(loop.scale, 1.0)
    while True:
        try:
            dps = find_double_points(loop, m, tol, gcfg.band)
            break
        except KnotError:
            if m >= config.max_grid:
                raise
            m *= 2
    return extract_diagram(loop, dps)


def _diagram_diff(event, before, after):
    """Does some enumerated move of the predicted kind turn one side into the other?"""
    if event.move == "R1":
        small, large = (before, after) if event.direction == "creation" else (after, before)
        sites = [s for s in enumerate_move_sites(small, "R1_add") if s.variant == event.variant]
    elif event.move == "R2":
        small, large = (before, after) if event.direction == "creation" else (after, before)
        sites = enumerate_move_sites(small, "R2_add")
    else:
        small, large = before, after
        sites = enumerate_move_sites(small, "R3")
    return any(isomorphic(apply_move(small, s), large) for s in sites)


@dataclass
class Interval:
    t_a: float
    t_b: float
    diagram: Diagram
    consistent: bool


@dataclass
class Verification:
    event_index: int
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values())


@dataclass
class MoveScript:
    events: list
    intervals: list
    verifications: list
    invariants: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    @property
    def ok(self):
        return (not self.errors and all(v.ok for v in self.verifications)
                and all(iv.consistent for iv in self.intervals)
                and all(a == b for a, b in self.invariants.values()))

    def lines(self):
        out = []
        for k, iv in enumerate(self.intervals):
            code = str(canonical_diagram(iv.diagram))
            flag = "" if iv.consistent else " inconsistent"
            out.append(f"interval [{iv.t_a:.10f}, {iv.t_b:.10f}] crossings={iv.diagram.num_crossings} "
                       f"gauss: {code}{flag}")
            if k < len(self.events):
                ev = self.events[k]
                ver = self.verifications[k]
                status = "yes" if ver.ok else "no(" + ",".join(c for c, v in ver.checks.items() if not v) + ")"
                out.append(ev.line() + f" verified={status}")
        for n, (a, b) in sorted(self.invariants.items()):
            out.append(f"invariant colorings_{n} start={a} end={b} {'equal' if a == b else 'DIFFER'}")
        for err in self.errors:
            out.append(f"error {err}")
        out.append(f"events={len(self.events)} status={'OK' if self.ok else 'FAILED'}")
        return out

    def to_text(self):
        return "\n".join(self.lines()) + "\n"


def trace(family, config=DEFAULT_TRACER):
    """Run the whole pipeline; verification failures are recorded, not raised."""
    _endpoint_check(family, config)
    check_injectivity_through_time(family, config=config)
    locs = localize_events(family, config, check_endpoints=False)
    errors = []
    events = []
    for loc in locs:
        try:
            events.append(classify(family, loc, config))
        except KnotError as exc:
            errors.append(f"t={loc.t:.10f} {exc}")
    if errors:
        return MoveScript(events=events, intervals=[], verifications=[], errors=errors)
    bounds = [0.0] + [e.t for e in events] + [1.0]
    intervals = []
    times = [e.t for e in events]

    def sample(t):
        gap = min((abs(t - te) for te in times), default=math.inf)
        return diagram_at(family, t, config, gap)

    for a, b in zip(bounds, bounds[1:]):
        mid = sample(0.5 * (a + b))
        consistent = all(isomorphic(sample(a + f * (b - a)), mid) for f in (0.25, 0.75))
        intervals.append(Interval(a, b, mid, consistent))
    verifications = []
    for k, ev in enumerate(events):
        before, after = intervals[k].diagram, intervals[k + 1].diagram
        checks = {
            "crossing_delta": after.num_crossings - before.num_crossings == ev.delta_crossings,
            "writhe_delta": after.writhe - before.writhe == ev.delta_writhe,
            "diagram_diff": _diagram_diff(ev, before, after),
        }
        verifications.append(Verification(k, checks))
    first, last = intervals[0].diagram, intervals[-1].diagram
    invariants = {n: (fox_colorings(first, n), fox_colorings(last, n)) for n in config.coloring_moduli}
    return MoveScript(events, intervals, verifications, invariants, errors)
