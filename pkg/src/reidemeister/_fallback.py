"""Pure numpy versions of the compiled pair scans (same signatures)."""

import numpy as np

_BLOCK = 512


def segment_crossings(x, y, band):
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    m = x.size
    dx = np.roll(x, -1) - x
    dy = np.roll(y, -1) - y
    out = [[], [], [], []]
    idx = np.arange(m)
    for start in range(0, m, _BLOCK):
        i = idx[start:start + _BLOCK, None]
        j = idx[None, :]
        gap = np.minimum(j - i, m - (j - i))
        keep = (j > i) & (gap >= band)
        den = dx[i] * dy[j] - dy[i] * dx[j]
        wx = x[j] - x[i]
        wy = y[j] - y[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (wx * dy[j] - wy * dx[j]) / den
            r = (wx * dy[i] - wy * dx[i]) / den
        hit = keep & (den != 0) & (s >= 0) & (s < 1) & (r >= 0) & (r < 1)
        ii, jj = np.nonzero(hit)
        out[0].append(ii + start)
        out[1].append(jj)
        out[2].append(s[ii, jj])
        out[3].append(r[ii, jj])
    ci, cj, cs, cr = (np.concatenate(a) for a in out)
    order = np.lexsort((cj, ci))
    return ci[order].astype(np.intp), cj[order].astype(np.intp), cs[order], cr[order]


def min_pair_ratio(pts):
    pts = np.ascontiguousarray(pts, dtype=float)
    m = pts.shape[0]
    k = np.arange(1, m)
    inv_chord = np.zeros(m)
    inv_chord[1:] = 1.0 / (2.0 * np.abs(np.sin(np.pi * k / m)))
    best, bi, bj = np.inf, 0, 1
    for start in range(0, m, _BLOCK):
        i = np.arange(start, min(start + _BLOCK, m))[:, None]
        j = np.arange(m)[None, :]
        d2 = np.sum((pts[i[:, 0], None, :] - pts[None, :, :]) ** 2, axis=-1)
        val = d2 * inv_chord[np.abs(j - i)] ** 2
        val = np.where(j > i, val, np.inf)
        flat = int(np.argmin(val))
        a, b = divmod(flat, m)
        if val[a, b] < best:
            best, bi, bj = float(val[a, b]), start + a, b
    return float(np.sqrt(best)), int(bi), int(bj)
