"""Combinatorial knot diagrams.

A diagram is stored as its signed Gauss word: the cyclic sequence of
crossing passages met while travelling once around the knot.  Each passage
is a :class:`Visit` ``(label, over, sign)``.  For a classical (planar)
diagram the signs fix the counterclockwise order of the four half-edges at
every crossing, so faces, arcs and the PD code are all derived from the word.

Edge ``k`` runs from passage ``k`` to passage ``k + 1`` (cyclically).  At a
crossing the counterclockwise order starting at the incoming under-strand is

* positive crossing: under-in, over-out, under-out, over-in
* negative crossing: under-in, over-in, under-out, over-out

and the sign of a crossing is the sign of ``cross(over tangent, under tangent)``.
"""

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, combinations_with_replacement


from .errors import AmbiguousZ, MalformedCode, StaleSite
from .smith import solution_count_mod


@dataclass(frozen=True)
class Visit:
    label: int
    over: bool
    sign: int

    def __str__(self):
        return f"{'O' if self.over else 'U'}{self.label}{'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class Crossing:
    label: int
    sign: int
    over_pos: int
    under_pos: int
    arc_ends: tuple  # arc indices counterclockwise from the incoming under-strand


class Diagram:
    """Immutable planar knot diagram (single component)."""

    __slots__ = ("visits", "__dict__")

    def __init__(self, visits, check=True):
        self.visits = tuple(visits)
        if check:
            self._validate()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def unknot(cls):
        return cls(())

    def _validate(self):
        seen = {}
        for pos, v in enumerate(self.visits):
            if v.sign not in (1, -1):
                raise MalformedCode(f"bad sign {v.sign!r}", position=pos)
            slot = seen.setdefault(v.label, [None, None, None])
            idx = 0 if v.over else 1
            if slot[idx] is not None:
                kind = "over" if v.over else "under"
                raise MalformedCode(f"crossing {v.label} appears twice as {kind}", position=pos)
            slot[idx] = pos
            if slot[2] is not None and slot[2] != v.sign:
                raise MalformedCode(f"crossing {v.label} has inconsistent signs", position=pos)
            slot[2] = v.sign
        for label, (o, u, _) in seen.items():
            if o is None or u is None:
                pos = u if o is None else o
                raise MalformedCode(f"crossing {label} is visited only once", position=pos)
        if self.visits and len(self.faces) != self.num_crossings + 2:
            raise MalformedCode(
                f"code is not planar ({len(self.faces)} faces for {self.num_crossings} crossings)", position=None
            )

    # -- basic structure -------------------------------------------------------

    @property
    def num_crossings(self):
        return len(self.visits) // 2

    def __len__(self):
        return len(self.visits)

    @cached_property
    def labels(self):
        out = []
        for v in self.visits:
            if v.label not in out:
                out.append(v.label)
        return tuple(out)

    @cached_property
    def positions(self):
        """label -> (over position, under position)."""
        pos = {}
        for k, v in enumerate(self.visits):
            o, u = pos.get(v.label, (None, None))
            pos[v.label] = (k, u) if v.over else (o, k)
        return pos

    def sign_of(self, label):
        return self.visits[self.positions[label][0]].sign

    @cached_property
    def writhe(self):
        return sum(v.sign for v in self.visits if v.over)

    def _edge_in(self, pos):
        return (pos - 1) % len(self.visits)

    @cached_property
    def rotations(self):
        """label -> four half-edges counterclockwise, each ``(edge, is_head)``."""
        rot = {}
        for label, (o, u) in self.positions.items():
            ui, uo = (self._edge_in(u), True), (u, False)
            oi, oo = (self._edge_in(o), True), (o, False)
            rot[label] = (ui, oo, uo, oi) if self.sign_of(label) > 0 else (ui, oi, uo, oo)
        return rot

    @cached_property
    def _head_vertex(self):
        # half-edge -> (label, index in rotation)
        where = {}
        for label, rot in self.rotations.items():
            for idx, he in enumerate(rot):
                where[he] = (label, idx)
        return where

    def _next_dart(self, dart):
        edge, forward = dart
        label, idx = self._head_vertex[(edge, forward)]
        nxt_edge, is_head = self.rotations[label][(idx - 1) % 4]
        return (nxt_edge, not is_head)

    @cached_property
    def faces(self):
        """Faces as tuples of darts ``(edge, forward)``; the face lies to the left."""
        if not self.visits:
            return ()
        n = len(self.visits)
        todo = {(e, f) for e in range(n) for f in (True, False)}
        faces = []
        for start in sorted(todo):
            if start not in todo:
                continue
            face = []
            d = start
            while d in todo:
                todo.remove(d)
                face.append(d)
                d = self._next_dart(d)
            faces.append(tuple(face))
        return tuple(faces)

    def dart_end(self, dart):
        """Passage position at which a dart arrives."""
        edge, forward = dart
        return (edge + 1) % len(self.visits) if forward else edge

    @cached_property
    def arc_of_edge(self):
        n = len(self.visits)
        if n == 0:
            return (0,)
        start = next(k for k, v in enumerate(self.visits) if not v.over)
        arcs = [0] * n
        arc = -1
        for step in range(n):
            k = (start + step) % n
            if not self.visits[k].over:
                arc += 1
            arcs[k] = arc  # edge k leaves passage k
        return tuple(arcs)

    @property
    def num_arcs(self):
        return max(self.arc_of_edge) + 1

    @cached_property
    def crossings(self):
        out = []
        for label in sorted(self.positions):
            o, u = self.positions[label]
            ends = tuple(self.arc_of_edge[e] for e, _ in self.rotations[label])
            out.append(Crossing(label, self.sign_of(label), o, u, ends))
        return tuple(out)

    # -- equality / canonical form --------------------------------------------

    @cached_property
    def canonical(self):
        """Lexicographically least relabelled word over basepoints and orientations."""
        n = len(self.visits)
        if n == 0:
            return ()
        best = None
        for word in (self.visits, self.visits[::-1]):
            for r in range(n):
                rotated = word[r:] + word[:r]
                relabel = {}
                key = []
                for v in rotated:
                    lab = relabel.setdefault(v.label, len(relabel) + 1)
                    key.append((lab, 0 if v.over else 1, v.sign))
                key = tuple(key)
                if best is None or key < best:
                    best = key
        return best

    def relabelled(self):
        """Same word with labels 1..C in order of first appearance."""
        relabel = {}
        for v in self.visits:
            relabel.setdefault(v.label, len(relabel) + 1)
        return Diagram((Visit(relabel[v.label], v.over, v.sign) for v in self.visits), check=False)

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.visits == other.visits

    def __hash__(self):
        return hash(self.visits)

    def __str__(self):
        return " ".join(str(v) for v in self.visits)

    def __repr__(self):
        return f"Diagram({str(self)!r})"


def isomorphic(a, b):
    """Equal Gauss words up to relabelling, basepoint and orientation reversal."""
    return len(a) == len(b) and a.canonical == b.canonical


def canonical_diagram(d):
    return Diagram(
        (Visit(lab, kind == 0, sign) for lab, kind, sign in d.canonical), check=False
    )


def writhe(d):
    return d.writhe


# ---------------------------------------------------------------------------
# Gauss / PD text formats

_TOKEN = re.compile(r"^([OUou])(\d+)([+\-−])$")


def gauss_code(d):
    return str(d)


def parse_gauss(text):
    tokens = text.replace(",", " ").split()
    visits = []
    for pos, tok in enumerate(tokens):
        m = _TOKEN.match(tok)
        if not m:
            raise MalformedCode(f"bad token {tok!r}", position=pos)
        visits.append(Visit(int(m.group(2)), m.group(1).upper() == "O", 1 if m.group(3) == "+" else -1))
    return Diagram(visits)


def pd_code(d):
    """Tuples of 1-based edge labels, counterclockwise from the incoming under-strand."""
    out = []
    for label in d.labels:
        out.append(tuple(e + 1 for e, _ in d.rotations[label]))
    return out


def format_pd(d):
    return " ".join("X(" + ",".join(map(str, x)) + ")" for x in pd_code(d))


_PD = re.compile(r"X[\(\[]\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*[\)\]]")


def parse_pd(text):
    """Inverse of :func:`format_pd` for consecutively numbered edges 1..2C."""
    stripped = text.strip()
    if not stripped:
        return Diagram.unknot()
    quads = [tuple(int(g) for g in m.groups()) for m in _PD.finditer(stripped)]
    if not quads or len(_PD.sub("", stripped).replace(",", "").split()) != 0:
        raise MalformedCode("expected X(a,b,c,d) tuples", position=0)
    n = 2 * len(quads)

    def nxt(x):
        return x % n + 1

    heads = {}  # edge -> (crossing index, over?, outgoing edge, sign)
    for k, (a, b, c, e) in enumerate(quads):
        # with two edges both orders are consecutive; the over-strand cannot enter on a
        options = [(1, e, b)] if nxt(e) == b else []
        options += [(-1, b, e)] if nxt(b) == e else []
        options = [o for o in options if o[1] != a] or options
        if not options:
            raise MalformedCode(f"over-strand edges {b},{e} are not consecutive", position=k)
        sign, over_in, over_out = options[0]
        for edge, over, out in ((a, False, c), (over_in, True, over_out)):
            if edge in heads or not 1 <= edge <= n:
                raise MalformedCode(f"edge {edge} enters twice or is out of range", position=k)
            heads[edge] = (k + 1, over, out, sign)
    visits = []
    edge = 1
    for _ in range(n):
        if edge not in heads:
            raise MalformedCode(f"edge {edge} never enters a crossing", position=None)
        label, over, out, sign = heads[edge]
        visits.append(Visit(label, over, sign))
        edge = out
    if edge != 1:
        raise MalformedCode("edges do not close into one loop", position=None)
    # passage k is entered by edge k+1 here; rotate so edge numbering matches ours
    return Diagram(visits[-1:] + visits[:-1])


# ---------------------------------------------------------------------------
# extraction from a generic loop


def extract_diagram(loop, double_points, z_tol=1e-9):
    """Signed Gauss word of a generic projection, basepoint at u = 0.

    The higher preimage of each double point is the over-strand; the sign
    is the orientation of (over tangent, under tangent).
    """
    from .curve import project

    passages = []
    for k, dp in enumerate(double_points):
        if abs(dp.z_gap) < z_tol * max(loop.scale, 1.0):
            raise AmbiguousZ("both preimages at the same height", u1=dp.u1, u2=dp.u2, z_gap=dp.z_gap)
        first_over = dp.z_gap > 0
        d1 = project(loop.derivative(dp.u1, 1))
        d2 = project(loop.derivative(dp.u2, 1))
        cross = float(d1[0] * d2[1] - d1[1] * d2[0])
        sign = 1 if (cross > 0) == first_over else -1
        passages.append((dp.u1, k, first_over, sign))
        passages.append((dp.u2, k, not first_over, sign))
    passages.sort()
    return Diagram((Visit(k, over, sign) for _, k, over, sign in passages)).relabelled()


# ---------------------------------------------------------------------------
# invariants


def coloring_matrix(d):
    """Rows: 2*over - under_in - under_out for each crossing; columns: arcs."""
    arcs = d.arc_of_edge
    a = d.num_arcs
    rows = []
    for label in d.labels:
        o, u = d.positions[label]
        row = [0] * a
        row[arcs[o]] += 2
        row[arcs[d._edge_in(u)]] -= 1
        row[arcs[u]] -= 1
        rows.append(row)
    return rows


def fox_colorings(d, n):
    """Number of Fox n-colourings, constant colourings included."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if d.num_crossings == 0:
        return n
    return solution_count_mod(coloring_matrix(d), n, d.num_arcs)


# ---------------------------------------------------------------------------
# Reidemeister moves

MOVE_KINDS = ("R1_add", "R1_remove", "R2_add", "R2_remove", "R3")


@dataclass(frozen=True)
class MoveSite:
    kind: str
    location: tuple
    variant: str
    source: tuple  # the Gauss word the site was enumerated from

    def __str__(self):
        return f"{self.kind}@{self.location}[{self.variant}]"


def _new_label(d):
    return max(d.positions, default=0) + 1


def _insert(visits, inserts):
    """``inserts``: list of (after_position, [visits]); -1 means at the front."""
    out = list(visits)
    for after, items in sorted(inserts, key=lambda it: it[0], reverse=True):
        out[after + 1:after + 1] = items
    return out


def enumerate_move_sites(d, kind):
    if kind not in MOVE_KINDS:
        raise ValueError(f"unknown move kind {kind!r}")
    return list(_ENUMERATORS[kind](d))


def _sites_r1_add(d):
    edges = range(len(d.visits)) if d.visits else [0]
    for e in edges:
        for first in ("O", "U"):
            for sign in (1, -1):
                yield MoveSite("R1_add", (e,), f"{first}{'+' if sign > 0 else '-'}", d.visits)


def _sites_r1_remove(d):
    n = len(d.visits)
    for label in d.labels:
        o, u = d.positions[label]
        if (o - u) % n in (1, n - 1):
            yield MoveSite("R1_remove", (label,), "+" if d.sign_of(label) > 0 else "-", d.visits)


def _sites_r2_remove(d):
    n = len(d.visits)
    for face in d.faces:
        if len(face) != 2:
            continue
        (e1, _), (e2, _) = face
        if e1 == e2:
            continue
        ends = [(d.visits[e], d.visits[(e + 1) % n]) for e in (e1, e2)]
        labels = {v.label for pair in ends for v in pair}
        if len(labels) != 2:
            continue
        kinds = [(a.over, b.over) for a, b in ends]
        if sorted(kinds) == [(False, False), (True, True)]:
            over_edge = e1 if kinds[0] == (True, True) else e2
            yield MoveSite("R2_remove", tuple(sorted(labels)), f"over_edge={over_edge}", d.visits)


def _sites_r2_add(d):
    if not d.visits:
        # the two sides of the crossingless loop
        for fi, dart in enumerate(((0, True), (0, False))):
            for top in (1, 2):
                yield MoveSite("R2_add", (fi, dart, dart), f"strand{top}_over", d.visits)
        return
    for fi, face in enumerate(d.faces):
        for d1, d2 in combinations_with_replacement(face, 2):
            if d1[0] == d2[0] and d1 != d2:
                continue
            for top in (1, 2):
                yield MoveSite("R2_add", (fi, d1, d2), f"strand{top}_over", d.visits)


def _sites_r3(d):
    n = len(d.visits)
    for face in d.faces:
        if len(face) != 3:
            continue
        edges = [e for e, _ in face]
        if len(set(edges)) != 3:
            continue
        labels = set()
        patterns = []
        for e in edges:
            a, b = d.visits[e], d.visits[(e + 1) % n]
            labels.update((a.label, b.label))
            patterns.append((a.over, b.over))
        if len(labels) != 3:
            continue
        if (True, True) in patterns or (False, False) in patterns:
            pat = "".join("T" if p == (True, True) else "B" if p == (False, False) else "M" for p in patterns)
            yield MoveSite("R3", tuple(sorted(edges)), pat, d.visits)


_ENUMERATORS = {
    "R1_add": _sites_r1_add,
    "R1_remove": _sites_r1_remove,
    "R2_add": _sites_r2_add,
    "R2_remove": _sites_r2_remove,
    "R3": _sites_r3,
}


def apply_move(d, site):
    if site.source != d.visits:
        raise StaleSite("site was enumerated from a different diagram", site=str(site))
    return _APPLIERS[site.kind](d, site)


def _apply_r1_add(d, site):
    (e,) = site.location
    first, sign = site.variant[0], 1 if site.variant[1] == "+" else -1
    lab = _new_label(d)
    pair = [Visit(lab, first == "O", sign), Visit(lab, first != "O", sign)]
    if not d.visits:
        return Diagram(pair)
    return Diagram(_insert(d.visits, [(e, pair)]))


def _apply_r1_remove(d, site):
    (label,) = site.location
    return Diagram(v for v in d.visits if v.label != label)


def _apply_r2_remove(d, site):
    labels = set(site.location)
    return Diagram(v for v in d.visits if v.label not in labels)


def _apply_r2_add(d, site):
    _, (e1, fwd1), (e2, fwd2) = site.location
    s1 = 1 if fwd1 else -1
    s2 = 1 if fwd2 else -1
    e1_over = site.variant == "strand1_over"
    p, q = _new_label(d), _new_label(d) + 1
    # frame: dart 1 along +x with the face above; strand 1 bulges up through
    # strand 2, crossing it at P (x=-1) and Q (x=+1)
    base = s1 * s2
    sign_p = base if e1_over else -base
    sign_q = -sign_p
    on1 = [(p, sign_p), (q, sign_q)] if s1 > 0 else [(q, sign_q), (p, sign_p)]
    on2 = [(q, sign_q), (p, sign_p)] if s2 > 0 else [(p, sign_p), (q, sign_q)]
    ins1 = [Visit(lab, e1_over, s) for lab, s in on1]
    ins2 = [Visit(lab, not e1_over, s) for lab, s in on2]
    if e1 == e2:
        # a finger from one stretch of the edge pushed over a later stretch
        if not d.visits:
            return Diagram(ins1 + ins2)
        return Diagram(_insert(d.visits, [(e1, ins1 + ins2)]))
    return Diagram(_insert(d.visits, [(e1, ins1), (e2, ins2)]))


def _apply_r3(d, site):
    n = len(d.visits)
    out = list(d.visits)
    for e in site.location:
        a, b = e, (e + 1) % n
        out[a], out[b] = out[b], out[a]
    return Diagram(out)


_APPLIERS = {
    "R1_add": _apply_r1_add,
    "R1_remove": _apply_r1_remove,
    "R2_add": _apply_r2_add,
    "R2_remove": _apply_r2_remove,
    "R3": _apply_r3,
}


def move_crossing_delta(kind):
    return {"R1_add": 1, "R1_remove": -1, "R2_add": 2, "R2_remove": -2, "R3": 0}[kind]


def random_move_sequence(d, length, rng):
    """Apply up to ``length`` uniformly chosen moves; returns [(site, diagram), ...]."""
    steps = []
    for _ in range(length):
        sites = [s for k in MOVE_KINDS for s in enumerate_move_sites(d, k)]
        if not sites:
            break
        site = sites[int(rng.integers(len(sites)))]
        d = apply_move(d, site)
        steps.append((site, d))
    return steps


