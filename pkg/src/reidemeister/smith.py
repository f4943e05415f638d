"""Integer Smith normal form, used to count solutions of linear systems mod n."""

from math import gcd


def smith_invariants(matrix):
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix.

    Plain integer elimination: repeatedly move the smallest nonzero entry to
    the pivot, clear its row and column with Euclidean steps, and fix the
    divisibility chain at the end.
    """
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                # pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # a remainder smaller than the pivot appeared; move it into place
            _, pi, pj = min(
                (abs(a[i][t]), i, t) if j == t else (abs(a[t][j]), t, j)
                for i, j in [(i, t) for i in range(t, rows) if a[i][t]] + [(t, j) for j in range(t + 1, cols) if a[t][j]]
            )
            a[t], a[pi] = a[pi], a[t]
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def solution_count_mod(matrix, n, ncols=None):
    """Number of x in (Z/n)^ncols with matrix @ x = 0 mod n."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    if not matrix:
        return n ** ncols
    inv = smith_invariants(matrix)
    count = n ** (ncols - len(inv))
    for d in inv:
        count *= gcd(d, n)
    return count
