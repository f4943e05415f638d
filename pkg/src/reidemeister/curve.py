"""Smooth closed curves in R^3 as truncated Fourier series, and isotopies
between them.

A :class:`FourierLoop` stores, for each coordinate, the constant term and
the cosine/sine pairs ``(a_k, b_k)`` for ``k = 1..N`` in one ``(3, 2N+1)``
array laid out as ``[c0, a1, b1, ..., aN, bN]``.  That is also the row layout
of the text format::

    degree 2
    x: 0 1 0 0 0
    y: 0 0 1 0 0
    z: 0 0 0 0 0

All derivatives in ``u`` are taken term by term.  An :class:`IsotopyFamily`
interpolates the coefficient arrays of keyframe loops with cubic Hermite
segments (Catmull-Rom tangents in the interior, zero slope at t=0 and t=1),
so every coefficient is C^1 in time and its time derivative is exact.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SpecParseError

TWO_PI = 2.0 * np.pi
DEFAULT_MAX_DEGREE = 64

# d^m/du^m of (cos ku, sin ku) is k^m times these combinations of (cos ku, sin ku)
_ROT = {
    0: ((1.0, 0.0), (0.0, 1.0)),
    1: ((0.0, -1.0), (1.0, 0.0)),
    2: ((-1.0, 0.0), (0.0, -1.0)),
    3: ((0.0, 1.0), (-1.0, 0.0)),
}


def _basis(u, degree, order):
    """Design matrix B with f^(order)(u) = coeffs @ B (shape (2N+1, M))."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    k = np.arange(1, degree + 1, dtype=float)
    ku = np.outer(k, u)
    c, s = np.cos(ku), np.sin(ku)
    (cc, cs), (sc, ss) = _ROT[order % 4]
    scale = (k ** order)[:, None]
    B = np.empty((2 * degree + 1, u.size))
    B[0] = 1.0 if order == 0 else 0.0
    B[1::2] = scale * (cc * c + cs * s)
    B[2::2] = scale * (sc * c + ss * s)
    return B


def _apply(coeffs, u, order):
    u_arr = np.asarray(u, dtype=float)
    degree = (coeffs.shape[-1] - 1) // 2
    out = (coeffs @ _basis(u_arr, degree, order)).T
    if u_arr.ndim == 0:
        return out[0]
    return out.reshape(u_arr.shape + (3,))


class FourierLoop:
    """Closed curve S^1 -> R^3 given by a truncated Fourier series."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, max_degree=DEFAULT_MAX_DEGREE):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 2 or c.shape[0] != 3 or c.shape[1] % 2 != 1 or c.shape[1] < 3:
            raise ValueError(f"coefficient array must have shape (3, 2N+1), N >= 1; got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        degree = (c.shape[1] - 1) // 2
        if degree > max_degree:
            raise ValueError(f"degree {degree} exceeds cap {max_degree}")
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def from_terms(cls, degree, x=(), y=(), z=()):
        """Build from sparse term dicts/iterables.

        Each coordinate is a mapping ``{0: c0, (k, 'cos'): a_k, (k, 'sin'): b_k}``.
        """
        c = np.zeros((3, 2 * degree + 1))
        for row, terms in enumerate((x, y, z)):
            for key, val in dict(terms).items():
                if key == 0:
                    c[row, 0] = val
                else:
                    k, kind = key
                    c[row, 2 * k - 1 if kind == "cos" else 2 * k] = val
        return cls(c)

    @property
    def degree(self):
        return (self.coeffs.shape[1] - 1) // 2

    @property
    def scale(self):
        """Largest coefficient magnitude; sets the length unit for tolerances."""
        return float(np.max(np.abs(self.coeffs)))

    def __call__(self, u):
        return _apply(self.coeffs, u, 0)

    def eval(self, u):
        return _apply(self.coeffs, u, 0)

    def derivative(self, u, order=1):
        if order < 1:
            raise ValueError("derivative order must be >= 1")
        return _apply(self.coeffs, u, order)

    def with_coeffs(self, coeffs):
        return FourierLoop(coeffs, max_degree=max(DEFAULT_MAX_DEGREE, self.degree))

    def mirrored(self):
        """Reflect through the xy-plane (negate z)."""
        c = self.coeffs.copy()
        c[2] *= -1.0
        return FourierLoop(c)

    def transformed(self, matrix, shift=(0.0, 0.0, 0.0)):
        c = np.asarray(matrix, dtype=float) @ self.coeffs
        c[:, 0] += np.asarray(shift, dtype=float)
        return FourierLoop(c)

    def padded(self, degree):
        if degree < self.degree:
            raise ValueError("cannot pad to a smaller degree")
        c = np.zeros((3, 2 * degree + 1))
        c[:, : self.coeffs.shape[1]] = self.coeffs
        return FourierLoop(c, max_degree=max(degree, DEFAULT_MAX_DEGREE))

    def __eq__(self, other):
        return isinstance(other, FourierLoop) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"FourierLoop(degree={self.degree})"


def evaluate(loop, u):
    return loop.eval(u)


def derivative(loop, u, order=1):
    return loop.derivative(u, order)


def project(v):
    """Vertical projection: drop the z coordinate (works on stacked arrays)."""
    return np.asarray(v, dtype=float)[..., :2]


def _catmull_rom_slopes(times, values):
    slopes = np.zeros_like(values)
    for j in range(1, len(times) - 1):
        slopes[j] = (values[j + 1] - values[j - 1]) / (times[j + 1] - times[j - 1])
    return slopes


@dataclass(frozen=True)
class Partials:
    f: np.ndarray
    f_u: np.ndarray
    f_t: np.ndarray
    f_uu: np.ndarray
    f_ut: np.ndarray
    f_uuu: np.ndarray


class IsotopyFamily:
    """Time-parametrised family of loops through keyframes at t in [0, 1]."""

    def __init__(self, keyframes):
        keyframes = sorted(((float(t), loop) for t, loop in keyframes), key=lambda kv: kv[0])
        if len(keyframes) < 2:
            raise ValueError("an isotopy needs at least two keyframes")
        times = np.array([t for t, _ in keyframes])
        if times[0] != 0.0 or times[-1] != 1.0:
            raise ValueError("keyframe times must start at 0 and end at 1")
        if np.any(np.diff(times) <= 0):
            raise ValueError("keyframe times must be strictly increasing")
        degrees = {loop.degree for _, loop in keyframes}
        if len(degrees) != 1:
            raise ValueError(f"keyframes must share one degree, got {sorted(degrees)}")
        self.times = times
        self.loops = tuple(loop for _, loop in keyframes)
        self._values = np.stack([loop.coeffs for loop in self.loops])
        self._slopes = _catmull_rom_slopes(times, self._values)
        self._values.setflags(write=False)
        self._slopes.setflags(write=False)

    @classmethod
    def constant(cls, loop):
        return cls([(0.0, loop), (1.0, loop)])

    @property
    def degree(self):
        return self.loops[0].degree

    @property
    def keyframes(self):
        return list(zip(self.times.tolist(), self.loops))

    def _check_t(self, t):
        if not (0.0 <= t <= 1.0):
            raise ValueError(f"time {t} outside [0, 1]")

    def coefficients(self, t):
        """Interpolated coefficients c(t) and their time derivative dc/dt."""
        t = float(t)
        self._check_t(t)
        j = int(np.searchsorted(self.times, t, side="right")) - 1
        j = min(max(j, 0), len(self.times) - 2)
        t0, t1 = self.times[j], self.times[j + 1]
        h = t1 - t0
        s = (t - t0) / h
        s2, s3 = s * s, s * s * s
        v0, v1 = self._values[j], self._values[j + 1]
        m0, m1 = self._slopes[j] * h, self._slopes[j + 1] * h
        c = (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * m1
        dc = ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * m1) / h
        if s == 0.0:
            c = v0.copy()
        elif s == 1.0:
            c = v1.copy()
        return c, dc

    def at(self, t):
        c, _ = self.coefficients(t)
        return FourierLoop(c, max_degree=max(DEFAULT_MAX_DEGREE, self.degree))

    def partials(self, u, t):
        c, dc = self.coefficients(t)
        return Partials(
            f=_apply(c, u, 0),
            f_u=_apply(c, u, 1),
            f_t=_apply(dc, u, 0),
            f_uu=_apply(c, u, 2),
            f_ut=_apply(dc, u, 1),
            f_uuu=_apply(c, u, 3),
        )


def family_partials(family, u, t):
    return family.partials(u, t)


# ---------------------------------------------------------------------------
# text formats


def format_loop(loop):
    lines = [f"degree {loop.degree}"]
    for name, row in zip("xyz", loop.coeffs):
        lines.append(f"{name}: " + " ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def format_family(family):
    parts = []
    for t, loop in family.keyframes:
        parts.append(f"keyframe t={t!r}\n" + format_loop(loop))
    return "".join(parts)


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_floats(tokens, lineno):
    try:
        return [float(tok) for tok in tokens]
    except ValueError as exc:
        raise SpecParseError(f"bad number: {exc}", line=lineno) from None


def _parse_loop_lines(lines, start_lineno, max_degree):
    """Consume a degree header and three coordinate rows from ``lines``."""
    if not lines:
        raise SpecParseError("expected 'degree N'", line=start_lineno)
    lineno, line = lines.pop(0)
    head = line.split()
    if len(head) != 2 or head[0] != "degree":
        raise SpecParseError(f"expected 'degree N', got {line!r}", line=lineno)
    try:
        degree = int(head[1])
    except ValueError:
        raise SpecParseError(f"degree must be an integer, got {head[1]!r}", line=lineno) from None
    if degree < 1 or degree > max_degree:
        raise SpecParseError(f"degree {degree} outside [1, {max_degree}]", line=lineno)
    rows = {}
    last = lineno
    for name in "xyz":
        if not lines:
            raise SpecParseError(f"missing '{name}:' row (file truncated)", line=last + 1)
        lineno, line = lines.pop(0)
        last = lineno
        label, _, rest = line.partition(":")
        if label.strip() != name or not _:
            raise SpecParseError(f"expected '{name}:' row, got {line!r}", line=lineno)
        vals = _parse_floats(rest.split(), lineno)
        if len(vals) != 2 * degree + 1:
            raise SpecParseError(
                f"'{name}:' row needs {2 * degree + 1} numbers, got {len(vals)}", line=lineno
            )
        rows[name] = vals
    return FourierLoop([rows["x"], rows["y"], rows["z"]], max_degree=max_degree), last


def parse_loop(text, max_degree=DEFAULT_MAX_DEGREE):
    lines = list(_content_lines(text))
    loop, last = _parse_loop_lines(lines, 1, max_degree)
    if lines:
        raise SpecParseError(f"unexpected trailing content {lines[0][1]!r}", line=lines[0][0])
    return loop


def parse_family(text, max_degree=DEFAULT_MAX_DEGREE):
    lines = list(_content_lines(text))
    keyframes = []
    last = 0
    while lines:
        lineno, line = lines.pop(0)
        key, _, val = line.partition("t=")
        if key.strip() != "keyframe" or not _:
            raise SpecParseError(f"expected 'keyframe t=<float>', got {line!r}", line=lineno)
        t = _parse_floats([val.strip()], lineno)[0]
        loop, last = _parse_loop_lines(lines, lineno + 1, max_degree)
        keyframes.append((t, loop))
    if not keyframes:
        raise SpecParseError("no keyframes", line=last + 1)
    try:
        return IsotopyFamily(keyframes)
    except ValueError as exc:
        raise SpecParseError(str(exc), line=last) from None


def load_loop(path, max_degree=DEFAULT_MAX_DEGREE):
    with open(path, encoding="utf-8") as fh:
        return parse_loop(fh.read(), max_degree=max_degree)


def load_family(path, max_degree=DEFAULT_MAX_DEGREE):
    with open(path, encoding="utf-8") as fh:
        return parse_family(fh.read(), max_degree=max_degree)
