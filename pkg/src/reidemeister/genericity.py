"""Numerical checks that a loop projects to a knot diagram.

A loop ``f`` passes when, for the vertical projection ``p``:

* ``f`` is injective in R^3 (checked through the chord ratio
  ``|f(u1) - f(u2)| / (2 |sin((u1 - u2) / 2)|)``, which tends to ``|f'|`` on
  the diagonal, so a zero anywhere means a collision or a singular point);
* ``p o f'`` never vanishes (immersion);
* the only multiple points of ``p o f`` are double points;
* double points are transverse.

Thresholds are relative to the loop's coefficient scale unless noted.
Every check returns its margin so that callers (and the time tracer) can
watch how close a loop is to failing.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from . import kernels
from .curve import TWO_PI, FourierLoop, project
from .errors import Degenerate, KnotError, NewtonDiverged, NotEmbedded, PerturbationFailed


@dataclass(frozen=True)
class GenericityConfig:
    grid: int | None = None  # samples per parameter axis; None -> max(256, 8N)
    newton_tol: float = 1e-10
    tau_embedded: float = 1e-6  # x scale
    tau_immersion: float = 1e-3  # x scale
    tau_triple: float = 1e-3  # x scale
    tau_transverse: float = 1e-2  # on |sin angle|, absolute
    band: int = 3  # cells around the diagonal skipped by the double-point scan

    def grid_for(self, loop):
        m = self.grid if self.grid is not None else max(256, 8 * loop.degree)
        if m < 4 * loop.degree:
            raise ValueError(f"grid {m} below 4N = {4 * loop.degree}")
        return m


DEFAULT_CONFIG = GenericityConfig()


def _wrap(u):
    return np.mod(u, TWO_PI)


def _cyclic_dist(a, b):
    d = abs((a - b) % TWO_PI)
    return min(d, TWO_PI - d)


def _chord(du):
    return 2.0 * np.abs(np.sin(0.5 * du))


# ---------------------------------------------------------------------------
# embeddedness


@dataclass(frozen=True)
class EmbeddedCheck:
    margin: float
    offenders: tuple  # ((u1, u2), ...)
    threshold: float

    @property
    def ok(self):
        return self.margin > self.threshold


def _ratio_matrix(points):
    m = points.shape[0]
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    k = np.arange(m)
    lag = np.abs(k[:, None] - k[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        r = d / _chord(lag * TWO_PI / m)
    r[lag == 0] = np.inf
    return r


def _local_minima_2d(r, limit):
    neigh = np.full(r.shape, np.inf)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                neigh = np.minimum(neigh, np.roll(np.roll(r, di, axis=0), dj, axis=1))
    iu = np.triu_indices(r.shape[0], k=1)
    mask = (r[iu] <= neigh[iu]) & np.isfinite(r[iu])
    cand_i, cand_j = iu[0][mask], iu[1][mask]
    order = np.argsort(r[cand_i, cand_j])[:limit]
    return cand_i[order], cand_j[order]


def _refine_collision(loop, u1, u2):
    def resid(v):
        a, b = v
        return (loop.eval(a) - loop.eval(b)) / max(_chord(a - b), 1e-300)

    def jac(v):
        a, b = v
        ch = max(_chord(a - b), 1e-300)
        diff = loop.eval(a) - loop.eval(b)
        dch = np.sign(np.sin(0.5 * (a - b))) * np.cos(0.5 * (a - b))
        ja = loop.derivative(a, 1) / ch - diff * dch / ch**2
        jb = -loop.derivative(b, 1) / ch + diff * dch / ch**2
        return np.column_stack([ja, jb])

    sol = least_squares(resid, [u1, u2], jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    a, b = sol.x
    return float(np.linalg.norm(resid(sol.x))), float(a), float(b)


def check_embedded(loop, grid=None, tol=None, candidates=12):
    """Minimum chord ratio over the off-diagonal torus, refined by least squares."""
    m = grid if grid is not None else DEFAULT_CONFIG.grid_for(loop)
    if m < 4 * loop.degree:
        raise ValueError(f"grid {m} below 4N = {4 * loop.degree}")
    threshold = tol if tol is not None else DEFAULT_CONFIG.tau_embedded * loop.scale
    u = np.arange(m) * TWO_PI / m
    r = _ratio_matrix(loop.eval(u))
    ci, cj = _local_minima_2d(r, candidates)
    margin = float(np.min(r))
    offenders = []
    for i, j in zip(ci, cj):
        val, a, b = _refine_collision(loop, u[i], u[j])
        if _cyclic_dist(a, b) < 1e-6:
            continue  # slid onto the diagonal, where the ratio is just |f'|
        margin = min(margin, val)
        if val <= threshold:
            a, b = sorted((float(_wrap(a)), float(_wrap(b))))
            if not any(_cyclic_dist(a, p) < 1e-6 and _cyclic_dist(b, q) < 1e-6 for p, q in offenders):
                offenders.append((a, b))
    return EmbeddedCheck(margin=margin, offenders=tuple(offenders), threshold=threshold)


def require_embedded(loop, grid=None, tol=None):
    res = check_embedded(loop, grid, tol)
    if not res.ok:
        u1, u2 = res.offenders[0] if res.offenders else (float("nan"), float("nan"))
        raise NotEmbedded("loop meets itself in R^3", u1=u1, u2=u2, margin=res.margin)
    return res


# ---------------------------------------------------------------------------
# immersion


@dataclass(frozen=True)
class ImmersionCheck:
    margin: float
    offenders: tuple
    threshold: float

    @property
    def ok(self):
        return self.margin > self.threshold


def _refine_speed_min(loop, u0, h):
    def resid(v):
        return project(loop.derivative(v[0], 1))

    def jac(v):
        return project(loop.derivative(v[0], 2))[:, None]

    sol = least_squares(resid, [u0], jac=jac, bounds=([u0 - h], [u0 + h]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return float(np.linalg.norm(resid(sol.x))), float(_wrap(sol.x[0]))


def check_immersion(loop, grid=None, tau=None):
    """min_u |p o f'(u)|, grid scan plus local refinement at every discrete minimum."""
    m = grid if grid is not None else DEFAULT_CONFIG.grid_for(loop)
    if m < 4 * loop.degree:
        raise ValueError(f"grid {m} below 4N = {4 * loop.degree}")
    threshold = tau if tau is not None else DEFAULT_CONFIG.tau_immersion * loop.scale
    h = TWO_PI / m
    u = np.arange(m) * h
    speed = np.linalg.norm(project(loop.derivative(u, 1)), axis=-1)
    minima = np.nonzero((speed <= np.roll(speed, 1)) & (speed <= np.roll(speed, -1)))[0]
    margin = float(np.min(speed))
    offenders = []
    for k in minima:
        val, uk = _refine_speed_min(loop, u[k], h)
        margin = min(margin, val)
        if val < threshold and not any(_cyclic_dist(uk, o) < h for o in offenders):
            offenders.append(uk)
    return ImmersionCheck(margin=margin, offenders=tuple(sorted(offenders)), threshold=threshold)


# ---------------------------------------------------------------------------
# double points


@dataclass(frozen=True)
class DoublePoint:
    u1: float
    u2: float
    location: tuple
    signed_sine: float  # sin of the angle from p o f'(u1) to p o f'(u2)
    z_gap: float  # f_z(u1) - f_z(u2)

    @property
    def transversality(self):
        return abs(self.signed_sine)


def _double_point_at(loop, u1, u2):
    u1, u2 = float(_wrap(u1)), float(_wrap(u2))
    if u1 > u2:
        u1, u2 = u2, u1
    p1, p2 = loop.eval(u1), loop.eval(u2)
    d1, d2 = project(loop.derivative(u1, 1)), project(loop.derivative(u2, 1))
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    sine = cross / (np.linalg.norm(d1) * np.linalg.norm(d2))
    loc = 0.5 * (project(p1) + project(p2))
    return DoublePoint(u1, u2, (float(loc[0]), float(loc[1])), float(sine), float(p1[2] - p2[2]))


def _newton_pair(loop, u1, u2, tol, max_iter=40, max_step=None):
    """2D Newton on F(u1, u2) = p f(u1) - p f(u2)."""
    scale = max(loop.scale, 1e-300)
    for _ in range(max_iter):
        F = project(loop.eval(u1) - loop.eval(u2))
        if np.hypot(*F) < tol:
            return u1, u2
        a = project(loop.derivative(u1, 1))
        b = -project(loop.derivative(u2, 1))
        det = a[0] * b[1] - a[1] * b[0]
        if abs(det) < 1e-14 * scale * scale:
            raise Degenerate("singular Jacobian at a double point (tangential crossing)", u1=u1, u2=u2)
        du1 = (F[0] * b[1] - F[1] * b[0]) / det
        du2 = (a[0] * F[1] - a[1] * F[0]) / det
        if max_step is not None and max(abs(du1), abs(du2)) > max_step:
            raise NewtonDiverged("Newton step left the seed cell", u1=u1, u2=u2)
        u1, u2 = u1 - du1, u2 - du2
    F = project(loop.eval(u1) - loop.eval(u2))
    if np.hypot(*F) < tol:
        return u1, u2
    raise NewtonDiverged("no convergence", u1=u1, u2=u2, residual=float(np.hypot(*F)))


def sample_crossings(loop, m, band=3):
    """Sign-change cells of p f(u1) - p f(u2): intersecting chords of the sampled polyline.

    Returns linear-interpolation seeds ``(u1, u2)`` with ``u1 < u2`` in grid order.
    """
    h = TWO_PI / m
    u = np.arange(m) * h
    pts = loop.eval(u)
    i, j, s, r = kernels.segment_crossings(
        np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), band
    )
    return (i + s) * h, (j + r) * h


MERGE_RADIUS = 1e-5


def find_double_points(loop, grid=None, newton_tol=None, band=None):
    """All transverse double points of the projection, sorted by ``u1``."""
    cfg = DEFAULT_CONFIG
    m = grid if grid is not None else cfg.grid_for(loop)
    if m < 4 * loop.degree:
        raise ValueError(f"grid {m} below 4N = {4 * loop.degree}")
    tol = newton_tol if newton_tol is not None else cfg.newton_tol * max(loop.scale, 1.0)
    band = cfg.band if band is None else band
    h = TWO_PI / m
    seeds1, seeds2 = sample_crossings(loop, m, band)
    found = []
    for s1, s2 in zip(seeds1, seeds2):
        try:
            u1, u2 = _newton_pair(loop, s1, s2, tol, max_step=4 * h)
        except NewtonDiverged:
            u1, u2 = _retry_subdivided(loop, s1, s2, h, tol)
        found.append(_double_point_at(loop, u1, u2))
    # converged duplicates agree to Newton accuracy; anything farther apart
    # is a distinct double point (two of them sit close near a tangency)
    merged = []
    for dp in sorted(found, key=lambda d: (d.u1, d.u2)):
        if any(_cyclic_dist(dp.u1, o.u1) < MERGE_RADIUS and _cyclic_dist(dp.u2, o.u2) < MERGE_RADIUS
               for o in merged):
            continue
        merged.append(dp)
    return merged


def _retry_subdivided(loop, s1, s2, h, tol):
    for o1 in (-0.25, 0.25):
        for o2 in (-0.25, 0.25):
            try:
                return _newton_pair(loop, s1 + o1 * h, s2 + o2 * h, tol, max_step=4 * h)
            except NewtonDiverged:
                continue
    raise NewtonDiverged("Newton failed in cell and in all four sub-cells", u1=float(s1), u2=float(s2))


# ---------------------------------------------------------------------------
# triple points


@dataclass(frozen=True)
class TripleCheck:
    margin: float
    clusters: tuple  # tuples of indices into the double-point list
    threshold: float

    @property
    def ok(self):
        return self.margin > self.threshold


def check_no_triple(double_points, tau):
    n = len(double_points)
    if n < 2:
        return TripleCheck(margin=math.inf, clusters=(), threshold=tau)
    loc = np.array([dp.location for dp in double_points])
    d = np.linalg.norm(loc[:, None, :] - loc[None, :, :], axis=-1)
    iu = np.triu_indices(n, k=1)
    margin = float(np.min(d[iu]))
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in zip(*iu):
        if d[a, b] < tau:
            parent[find(a)] = find(b)
    groups = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    clusters = tuple(tuple(g) for g in groups.values() if len(g) > 1)
    return TripleCheck(margin=margin, clusters=clusters, threshold=tau)


# ---------------------------------------------------------------------------
# aggregate report


CONDITIONS = ("embedded", "immersion", "no_triple", "transverse")


@dataclass
class GenericityReport:
    margins: dict
    thresholds: dict
    double_points: list
    diagnostics: list = field(default_factory=list)
    offenders: dict = field(default_factory=dict)

    @property
    def verdicts(self):
        return {c: self.margins[c] > self.thresholds[c] for c in CONDITIONS}

    @property
    def ok(self):
        return all(self.verdicts.values())

    @property
    def crossings(self):
        return len(self.double_points)

    def to_kv(self):
        lines = [f"{c}_margin={_num(self.margins[c])}" for c in CONDITIONS]
        lines += [f"{c}_threshold={_num(self.thresholds[c])}" for c in CONDITIONS]
        lines += [f"{c}={'PASS' if v else 'FAIL'}" for c, v in self.verdicts.items()]
        lines.append(f"crossings={self.crossings}")
        for d in self.diagnostics:
            lines.append(f"diagnostic={d}")
        lines.append(f"verdict={'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        out = ["Genericity report"]
        for c in CONDITIONS:
            mark = "pass" if self.verdicts[c] else "FAIL"
            out.append(f"  {c:<11} margin {_num(self.margins[c]):>14}  threshold {_num(self.thresholds[c])}  {mark}")
        out.append(f"  crossings   {self.crossings}")
        for dp in self.double_points:
            out.append(
                f"    u1={dp.u1:.9f} u2={dp.u2:.9f} at ({dp.location[0]:.6f}, {dp.location[1]:.6f})"
                f" |sin|={dp.transversality:.4f} z_gap={dp.z_gap:+.4f}"
            )
        for c, offs in self.offenders.items():
            for o in offs:
                out.append(f"  offender {c}: {o}")
        for d in self.diagnostics:
            out.append(f"  ! {d}")
        out.append("  thresholds are engineering choices (relative to coefficient scale)")
        out.append(f"verdict: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(out) + "\n"


def _num(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def thresholds_for(loop, config):
    s = loop.scale
    return {
        "embedded": config.tau_embedded * s,
        "immersion": config.tau_immersion * s,
        "no_triple": config.tau_triple * s,
        "transverse": config.tau_transverse,
    }


def validate(loop, config=DEFAULT_CONFIG):
    m = config.grid_for(loop)
    th = thresholds_for(loop, config)
    margins = dict.fromkeys(CONDITIONS, -math.inf)
    diagnostics, offenders, dps = [], {}, []

    emb = check_embedded(loop, m, th["embedded"])
    margins["embedded"] = emb.margin
    if emb.offenders:
        offenders["embedded"] = list(emb.offenders)
        diagnostics.append(f"NOT_EMBEDDED at (u1,u2)={emb.offenders[0]}")

    imm = check_immersion(loop, m, th["immersion"])
    margins["immersion"] = imm.margin
    if imm.offenders:
        offenders["immersion"] = list(imm.offenders)

    try:
        dps = find_double_points(loop, m, config.newton_tol * max(loop.scale, 1.0), config.band)
    except KnotError as exc:
        diagnostics.append(str(exc))
    else:
        tri = check_no_triple(dps, th["no_triple"])
        margins["no_triple"] = tri.margin
        if tri.clusters:
            offenders["no_triple"] = [tuple(dps[k].location for k in c) for c in tri.clusters]
        margins["transverse"] = min((dp.transversality for dp in dps), default=math.inf)
        bad_z = [dp for dp in dps if abs(dp.z_gap) <= th["embedded"]]
        if bad_z:
            margins["embedded"] = min(margins["embedded"], min(abs(dp.z_gap) for dp in bad_z))
            diagnostics.append(f"NOT_EMBEDDED: zero z-gap at (u1,u2)=({bad_z[0].u1:.9f},{bad_z[0].u2:.9f})")
    return GenericityReport(margins=margins, thresholds=th, double_points=dps,
                            diagnostics=diagnostics, offenders=offenders)


def perturb_to_generic(loop, seed=0, magnitude=1e-3, attempts=8, config=DEFAULT_CONFIG):
    """Add seeded uniform coefficient noise until the loop validates.

    Attempt 0 is the loop itself, so generic input comes back unchanged; the
    noise amplitude starts at ``magnitude`` (times the coefficient scale) and
    doubles on each later attempt.
    """
    require_embedded(loop, config.grid_for(loop), thresholds_for(loop, config)["embedded"])
    rng = np.random.default_rng(seed)
    amp = magnitude * max(loop.scale, 1e-300)
    last = None
    for attempt in range(attempts):
        if attempt == 0:
            cand = loop
        else:
            cand = loop.with_coeffs(loop.coeffs + rng.uniform(-amp, amp, size=loop.coeffs.shape))
            amp *= 2.0
        last = validate(cand, config)
        if last.ok:
            return cand
    raise PerturbationFailed(
        f"no generic loop after {attempts} attempts",
        last_margins={k: round(v, 12) for k, v in last.margins.items()},
    )
