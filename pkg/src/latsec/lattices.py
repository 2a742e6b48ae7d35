"""Construction-A nested lattice pairs with exact rational geometry.

The fine lattice lifts a length-n linear code over GF(p) given by the
columns of an n x k matrix, then applies a unimodular integer transform
and a positive rational scale:

    fine   = scale * T * (code_span / p + Z^n)
    coarse = scale * T * Z^n

Every fine point has coordinates in (scale / p) * Z^n, so exact arithmetic
stays in Fractions end to end. Quantisation is a true closest-point search
with a deterministic tie rule (lexicographically smallest residual), which
makes the induced fundamental cell half-open.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import gfp
from .cvp import NearestPointSolver
from .errors import NonPositiveScale, NotPrime, NotUnimodular, RankDeficientG
from .exactlin import column, column_lattice_basis, det_int, inv_fraction, matvec

Point = tuple  # tuple of Fractions; alias for readability in signatures


def exact_vector(x) -> tuple:
    """Coerce a vector of ints, floats, Fractions or strings to exact Fractions.

    Floats convert exactly (every float is a rational), so the result always
    represents the argument bit for bit.
    """
    if isinstance(x, np.ndarray):
        x = x.tolist()
    out = []
    for v in x:
        if isinstance(v, Fraction):
            out.append(v)
        elif isinstance(v, (int, np.integer)):
            out.append(Fraction(int(v)))
        elif isinstance(v, (float, np.floating)):
            out.append(Fraction(float(v)))
        else:
            out.append(Fraction(v))
    return tuple(out)


def _has_float(x) -> bool:
    if isinstance(x, np.ndarray):
        return np.issubdtype(x.dtype, np.floating)
    return any(isinstance(v, (float, np.floating)) for v in x)


class ConstructionALattice:
    """A nested (fine, coarse) lattice pair from a mod-p code.

    Args:
        p: prime modulus of the base field.
        code_matrix: n x k integer matrix whose columns generate the code;
            entries are reduced mod p, and the matrix must have full column
            rank over GF(p).
        transform: n x n integer matrix with determinant +-1 (defaults to
            the identity).
        scale: positive rational overall scale (int, Fraction or "a/b").

    The quotient fine/coarse has exactly p**k cosets.
    """

    def __init__(self, p, code_matrix, transform=None, scale=1):
        if not isinstance(p, (int, np.integer)) or not gfp.is_prime(int(p)):
            raise NotPrime(f"modulus must be a prime integer, got {p!r}")
        p = int(p)

        rows = [list(map(int, r)) for r in code_matrix]
        n = len(rows)
        if n == 0 or len(rows[0]) == 0:
            raise RankDeficientG("code matrix must have at least one row and one column")
        k = len(rows[0])
        if any(len(r) != k for r in rows):
            raise RankDeficientG("code matrix rows have inconsistent lengths")
        if k > n:
            raise RankDeficientG(f"code matrix has k={k} > n={n}, cannot have full column rank")
        rows = [[v % p for v in r] for r in rows]
        if gfp.rank_modp(rows, p) != k:
            raise RankDeficientG(f"code matrix rank over GF({p}) is below k={k}")

        if transform is None:
            trows = [[int(i == j) for j in range(n)] for i in range(n)]
        else:
            trows = [list(map(int, r)) for r in transform]
            if len(trows) != n or any(len(r) != n for r in trows):
                raise NotUnimodular(f"transform must be {n}x{n}")
        d = det_int(trows)
        if d not in (1, -1):
            raise NotUnimodular(f"transform determinant is {d}, need +-1")

        try:
            scale = Fraction(scale)
        except (TypeError, ValueError) as exc:
            raise NonPositiveScale(f"scale {scale!r} is not a rational") from exc
        if scale <= 0:
            raise NonPositiveScale(f"scale must be positive, got {scale}")

        self.p = p
        self.k = k
        self.n = n
        self.code_matrix = tuple(tuple(r) for r in rows)
        self.transform = tuple(tuple(r) for r in trows)
        self.scale = scale

        self._transform_inv = inv_fraction(trows)  # integer-valued Fractions
        coarse_cols = [tuple(scale * v for v in column(trows, j)) for j in range(n)]
        self._coarse_solver = NearestPointSolver(coarse_cols)
        self._fine_solver = None
        self._coarse_float = None

    # ------------------------------------------------------------------
    # basic structure

    @property
    def num_cosets(self) -> int:
        return self.p ** self.k

    def coarse_basis_float(self) -> np.ndarray:
        """Coarse basis as a float matrix whose columns are basis vectors."""
        if self._coarse_float is None:
            cols = self._coarse_solver.cols
            self._coarse_float = np.array([[float(v) for v in c] for c in cols]).T
        return self._coarse_float

    def _fine(self) -> NearestPointSolver:
        if self._fine_solver is None:
            n, p = self.n, self.p
            gen = [column(self.code_matrix, j) for j in range(self.k)]
            gen += [tuple(p * int(i == j) for i in range(n)) for j in range(n)]
            h = column_lattice_basis(gen, n)
            unit = self.scale / p
            cols = [tuple(unit * v for v in matvec(self.transform, c)) for c in h]
            self._fine_solver = NearestPointSolver(cols)
        return self._fine_solver

    # ------------------------------------------------------------------
    # quantisation

    def quantize_coarse(self, x) -> Point:
        """Closest coarse-lattice point to x, ties broken deterministically.

        Exact for exact inputs; float inputs are rationalised bit for bit
        first, so the decision is still exact for the given float vector.
        """
        _, point, _ = self._coarse_solver.nearest(exact_vector(x))
        return point

    def mod_coarse(self, x):
        """Reduce x into the half-open fundamental cell of the coarse lattice.

        Returns Fractions for exact inputs and a float ndarray for float
        inputs. Idempotent: mod(mod(x)) == mod(x).
        """
        if _has_float(x):
            point = self.quantize_coarse(x)
            return np.asarray(x, dtype=float) - np.array([float(v) for v in point])
        xv = exact_vector(x)
        point = self.quantize_coarse(xv)
        return tuple(a - b for a, b in zip(xv, point))

    def quantize_fine(self, x) -> Point:
        """Closest fine-lattice point to x (same tie rule as the coarse cell)."""
        _, point, _ = self._fine().nearest(exact_vector(x))
        return point

    # ------------------------------------------------------------------
    # membership and coset labels

    def _transform_coords(self, x):
        # coordinates y with x = scale * T * y
        xv = exact_vector(x)
        if len(xv) != self.n:
            raise ValueError("dimension mismatch")
        return tuple(v / self.scale for v in matvec(self._transform_inv, xv))

    def is_coarse_point(self, x) -> bool:
        return all(v.denominator == 1 for v in self._transform_coords(x))

    def is_fine_point(self, x) -> bool:
        """Exact membership test for the fine lattice."""
        y = self._transform_coords(x)
        t = [v * self.p for v in y]
        if any(v.denominator != 1 for v in t):
            return False
        residue = [int(v) % self.p for v in t]
        return gfp.in_column_space(self.code_matrix, residue, self.p)

    def coset_label(self, point) -> tuple:
        """Label of a fine point's coset mod coarse, as a vector in [0, p)^n."""
        y = self._transform_coords(point)
        t = [v * self.p for v in y]
        if any(v.denominator != 1 for v in t):
            raise ValueError("point is not in the fine lattice")
        return tuple(int(v) % self.p for v in t)

    def message_of_point(self, point) -> int:
        """Index in [0, p**k) of the coset containing the given fine point."""
        label = self.coset_label(point)
        z = gfp.solve_column_comb(self.code_matrix, list(label), self.p)
        if z is None:
            raise ValueError("point label is outside the code span")
        return sum(int(zi) * self.p ** i for i, zi in enumerate(z))

    def message_digits(self, m: int) -> tuple:
        if not 0 <= m < self.num_cosets:
            raise ValueError(f"message index {m} out of range")
        return tuple((m // self.p ** i) % self.p for i in range(self.k))

    def point_for_message(self, m: int) -> Point:
        """Canonical codebook representative of message m (reduced mod coarse)."""
        z = self.message_digits(m)
        code_vec = [sum(self.code_matrix[i][j] * z[j] for j in range(self.k)) % self.p
                    for i in range(self.n)]
        frac = [Fraction(v, self.p) for v in code_vec]
        rep = tuple(self.scale * v for v in matvec(self.transform, frac))
        return self.mod_coarse(rep)


# ----------------------------------------------------------------------
# seeded generators used by configs and sweeps


def random_code_matrix(p, k, n, seed):
    """Rejection-sample an n x k matrix with full column rank over GF(p)."""
    rng = np.random.default_rng(seed)
    while True:
        rows = rng.integers(0, p, size=(n, k)).tolist()
        if gfp.rank_modp(rows, p) == k:
            return tuple(tuple(int(v) for v in r) for r in rows)


def random_unimodular(n, seed, entry_cap=6):
    """Random unimodular integer matrix via elementary row operations.

    Entries are kept small (abs <= entry_cap) by redrawing, which keeps the
    closest-point search on the resulting bases fast.
    """
    rng = np.random.default_rng(seed)
    while True:
        m = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(2 * n + 2):
            kind = int(rng.integers(0, 3)) if n > 1 else 1
            if kind == 0:
                i, j = rng.choice(n, size=2, replace=False)
                m[i], m[j] = m[j], m[i]
            elif kind == 1:
                i = int(rng.integers(0, n))
                m[i] = [-v for v in m[i]]
            else:
                i, j = rng.choice(n, size=2, replace=False)
                c = int(rng.choice([-2, -1, 1, 2]))
                m[i] = [a + c * b for a, b in zip(m[i], m[j])]
        if max(abs(v) for row in m for v in row) <= entry_cap:
            return tuple(tuple(r) for r in m)
