"""Exact closest-point search in a full-rank rational lattice.

Depth-first sphere enumeration over an exact Gram-Schmidt decomposition of
the basis. All comparisons are on Fractions, so the returned point is the
true Euclidean minimiser; equidistant candidates are resolved to the one
whose residual vector is lexicographically smallest, which realises a
half-open fundamental cell (mod is idempotent and sums of kept residuals
stay kept).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactlin import dot, gram_schmidt

_ZERO = Fraction(0)


def _round_half_up(c: Fraction) -> int:
    # deterministic start for the zig-zag; ties only affect visit order
    return math.floor(c + Fraction(1, 2))


class NearestPointSolver:
    """Closest-point queries against a fixed basis.

    Args:
        columns: n linearly independent rational basis vectors of length n.
            The lattice is the set of integer combinations of the columns.
    """

    def __init__(self, columns):
        cols = [tuple(Fraction(v) for v in c) for c in columns]
        n = len(cols)
        if any(len(c) != n for c in cols):
            raise ValueError("basis must be square")
        self.n = n
        self.cols = cols
        self.diagonal = all(cols[j][t] == 0 for j in range(n) for t in range(n) if t != j)
        if not self.diagonal:
            self.ghat, self.mu, self.q = gram_schmidt(cols)

    def nearest(self, target):
        """Return (coeffs, point, residual) for the closest lattice point.

        All three are tuples; point = sum_j coeffs[j] * column_j and
        residual = target - point, exact.
        """
        x = tuple(Fraction(v) for v in target)
        if len(x) != self.n:
            raise ValueError("target dimension mismatch")
        if self.diagonal:
            return self._nearest_diagonal(x)
        return self._nearest_general(x)

    def _nearest_diagonal(self, x):
        coeffs = []
        point = []
        for i in range(self.n):
            d = self.cols[i][i]
            ad = abs(d)
            m = math.floor(x[i] / ad + Fraction(1, 2))
            coeffs.append(m if d > 0 else -m)
            point.append(m * ad)
        resid = tuple(a - b for a, b in zip(x, point))
        return tuple(coeffs), tuple(point), resid

    def _nearest_general(self, x):
        n = self.n
        q = self.q
        mu = self.mu
        # coordinates of x in the orthogonal ghat frame
        y = [dot(x, self.ghat[j]) / q[j] for j in range(n)]

        best_w = None
        best_d = None
        best_r = None
        w = [0] * n
        step = [0] * n
        cen = [_ZERO] * n
        part = [_ZERO] * n  # part[j]: cost contributed by levels above j

        j = n - 1
        part[j] = _ZERO
        cen[j] = y[j]
        w[j] = _round_half_up(cen[j])
        step[j] = 1 if cen[j] >= w[j] else -1

        while True:
            diff = cen[j] - w[j]
            d = part[j] + q[j] * diff * diff
            if best_d is not None and d > best_d:
                # prune this subtree and advance the parent level
                if j == n - 1:
                    break
                j += 1
                w[j] += step[j]
                step[j] = -step[j] - (1 if step[j] > 0 else -1)
                continue
            if j > 0:
                j -= 1
                part[j] = d
                cen[j] = y[j] - sum(mu[l][j] * w[l] for l in range(j + 1, n))
                w[j] = _round_half_up(cen[j])
                step[j] = 1 if cen[j] >= w[j] else -1
                continue
            # leaf: full candidate assembled in w
            if best_d is None or d < best_d:
                best_d = d
                best_w = list(w)
                best_r = self._residual(x, w)
            elif d == best_d:
                r = self._residual(x, w)
                if r < best_r:
                    best_w = list(w)
                    best_r = r
            w[0] += step[0]
            step[0] = -step[0] - (1 if step[0] > 0 else -1)

        point = tuple(a - b for a, b in zip(x, best_r))
        return tuple(best_w), point, best_r

    def _residual(self, x, w):
        cols = self.cols
        n = self.n
        out = list(x)
        for jj in range(n):
            wj = w[jj]
            if wj:
                cj = cols[jj]
                for t in range(n):
                    out[t] -= wj * cj[t]
        return tuple(out)
