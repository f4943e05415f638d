"""SVG drawings of loops and combinatorial diagrams.

The under-strand is broken at every crossing, so a drawing of a diagram
with C > 0 crossings consists of exactly C ``<path>`` elements (one per arc)
and the crossingless unknot is a single closed path.  Output is a pure
function of the input: coordinates are printed with fixed precision.
"""

import numpy as np

from .curve import TWO_PI, project

SIZE = 400.0
MARGIN = 20.0


def _fmt(x):
    return f"{x:.3f}"


def _svg(paths, title, style):
    stroke = style.get("stroke", "#000")
    width = style.get("width", 3)
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE:.0f}" height="{SIZE:.0f}" '
        f'viewBox="0 0 {SIZE:.0f} {SIZE:.0f}">\n'
        f"<title>{title}</title>\n"
        f'<g fill="none" stroke="{stroke}" stroke-width="{width}" stroke-linecap="round" stroke-linejoin="round">\n'
    )
    body = "".join(f'<path d="{d}"/>\n' for d in paths)
    return head + body + "</g>\n</svg>\n"


def _fit(points):
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    s = (SIZE - 2 * MARGIN) / span
    center = 0.5 * (lo + hi)

    def tf(p):
        p = np.asarray(p, dtype=float)
        x = (p[..., 0] - center[0]) * s + SIZE / 2
        y = SIZE / 2 - (p[..., 1] - center[1]) * s  # svg y axis points down
        return np.stack([x, y], axis=-1)

    return tf, s


def _polyline(pts, closed=False):
    d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
    return d + (" Z" if closed else "")


def render_loop(loop, double_points, samples=720, gap=8.0, style=None):
    """Projected curve with the lower strand cut around each double point."""
    style = style or {}
    u = np.arange(samples) * TWO_PI / samples
    plane = project(loop.eval(u))
    tf, s = _fit(plane)
    if not double_points:
        return _svg([_polyline(tf(plane), closed=True)], "unknot diagram", style)
    cuts = []
    for dp in double_points:
        under = dp.u2 if dp.z_gap > 0 else dp.u1
        speed = float(np.linalg.norm(project(loop.derivative(under, 1)))) * s
        half = 0.5 * gap / max(speed, 1e-12)
        cuts.append((under - half, under + half))
    cuts.sort()
    paths = []
    for k, (_, end) in enumerate(cuts):
        nxt_start = cuts[(k + 1) % len(cuts)][0]
        if k + 1 == len(cuts):
            nxt_start += TWO_PI
        n = max(2, int(np.ceil((nxt_start - end) / TWO_PI * samples)) + 1)
        seg = np.linspace(end, nxt_start, n)
        paths.append(_polyline(tf(project(loop.eval(seg)))))
    return _svg(paths, f"knot diagram, {len(cuts)} crossings", style)


def _layout(d):
    """Tutte (barycentric) placement of crossings, edge midpoints and face centres."""
    n = len(d.visits)
    faces = d.faces
    outer = max(range(len(faces)), key=lambda i: (len(faces[i]), -i))
    index = {}

    def vid(key):
        return index.setdefault(key, len(index))

    for lab in d.labels:
        vid(("x", lab))
    for e in range(n):
        vid(("m", e))
    for fi in range(len(faces)):
        if fi != outer:
            vid(("f", fi))
    nv = len(index)
    adj = np.zeros((nv, nv))

    def link(a, b, w=1.0):
        adj[a, b] += w
        adj[b, a] += w

    for e in range(n):
        link(vid(("m", e)), vid(("x", d.visits[e].label)))
        link(vid(("m", e)), vid(("x", d.visits[(e + 1) % n].label)))
    pinned = {}
    for fi, face in enumerate(faces):
        ring = []
        for edge, fwd in face:
            start = d.visits[edge if fwd else (edge + 1) % n].label
            ring += [("x", start), ("m", edge)]
        if fi == outer:
            for k, key in enumerate(ring):
                ang = TWO_PI * k / len(ring)
                pinned.setdefault(vid(key), (np.cos(ang), np.sin(ang)))
        else:
            c = vid(("f", fi))
            for key in ring:
                link(c, vid(key))
    pos = np.zeros((nv, 2))
    free = [v for v in range(nv) if v not in pinned]
    fixed = sorted(pinned)
    for v in fixed:
        pos[v] = pinned[v]
    if free:
        lap = np.diag(adj.sum(axis=1)) - adj
        a = lap[np.ix_(free, free)]
        b = -lap[np.ix_(free, fixed)] @ pos[fixed]
        pos[free] = np.linalg.lstsq(a, b, rcond=None)[0]
    return pos, index


def render_diagram(d, gap=0.18, style=None):
    """Layout a Gauss word in the plane and draw it with under-strand breaks."""
    style = style or {}
    if not d.visits:
        ang = np.arange(121) * TWO_PI / 120
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        tf, _ = _fit(pts)
        return _svg([_polyline(tf(pts[:-1]), closed=True)], "unknot diagram", style)
    pos, index = _layout(d)
    tf, _ = _fit(pos)
    n = len(d.visits)
    route = []  # (point, passage index or None)
    for k in range(n):
        route.append((pos[index[("x", d.visits[k].label)]], k))
        route.append((pos[index[("m", k)]], None))
    unders = [i for i, (_, k) in enumerate(route) if k is not None and not d.visits[k].over]
    paths = []
    for a, ia in enumerate(unders):
        ib = unders[(a + 1) % len(unders)]
        span = (ib - ia) % len(route) or len(route)
        idx = [(ia + j) % len(route) for j in range(span + 1)]
        pts = [route[i][0].copy() for i in idx]
        pts[0] = pts[0] + gap * (pts[1] - pts[0])
        pts[-1] = pts[-1] + gap * (pts[-2] - pts[-1])
        paths.append(_polyline(tf(np.array(pts))))
    return _svg(paths, f"knot diagram, {d.num_crossings} crossings", style)


def render_svg(obj, double_points=None, style=None):
    """Dispatch on a loop (needs its double points) or a :class:`Diagram`."""
    from .diagram import Diagram

    if isinstance(obj, Diagram):
        return render_diagram(obj, style=style)
    if double_points is None:
        from .genericity import find_double_points

        double_points = find_double_points(obj)
    return render_loop(obj, double_points, style=style)
