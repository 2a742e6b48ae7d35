"""Codebooks carved out of nested lattices: enumeration, power scaling,
pairwise sums, binning, and layered (superposition) construction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    BudgetExceeded,
    DegenerateCodebook,
    DimensionMismatch,
    EmptyCodebook,
    LayerNotNested,
    NonDivisibleBins,
    ValidationError,
)
from .infotheory import points_of, to_integer_grid
from .lattices import ConstructionALattice


class Codebook:
    """Coset representatives of a nested lattice pair, in message order.

    points[m] is the codeword for message m; all points lie in the
    half-open fundamental cell of the coarse lattice.
    """

    def __init__(self, lattice: ConstructionALattice, points):
        pts = tuple(tuple(Fraction(c) for c in pt) for pt in points)
        if not pts:
            raise EmptyCodebook("a codebook needs at least one point")
        for pt in pts:
            if len(pt) != lattice.n:
                raise DimensionMismatch(
                    f"point of length {len(pt)} in dimension-{lattice.n} lattice"
                )
        self.lattice = lattice
        self.points = pts
        self.n = lattice.n
        self._index = None
        self._float = None
        self._grid = False

    def __len__(self):
        return len(self.points)

    @property
    def size_log2(self) -> float:
        return math.log2(len(self.points))

    @property
    def rate_per_dim(self) -> float:
        return self.size_log2 / self.n

    @property
    def average_power(self) -> Fraction:
        """Mean squared coordinate over the codebook, exact."""
        acc = Fraction(0)
        for pt in self.points:
            for c in pt:
                acc += c * c
        return acc / (len(self.points) * self.n)

    def index_of(self, point) -> int:
        if self._index is None:
            self._index = {pt: m for m, pt in enumerate(self.points)}
        return self._index[tuple(Fraction(c) for c in point)]

    def float_matrix(self) -> np.ndarray:
        if self._float is None:
            self._float = np.array(
                [[float(c) for c in pt] for pt in self.points], dtype=np.float64
            )
        return self._float

    def int_grid(self):
        """(matrix, denominator) with points == matrix / denominator, or None
        when the points do not fit a shared small-denominator integer grid."""
        if self._grid is False:
            g = to_integer_grid([self.points])
            self._grid = None if g is None else (g[0][0], g[1])
        return self._grid


def enumerate_codebook(lattice: ConstructionALattice, budget: int = 10**6) -> Codebook:
    """All coset representatives, ordered by message index."""
    if lattice.num_cosets > budget:
        raise BudgetExceeded(
            f"{lattice.num_cosets} cosets exceed enumeration budget {budget}"
        )
    return Codebook(
        lattice, [lattice.point_for_message(m) for m in range(lattice.num_cosets)]
    )


def minkowski_sum(a, b, budget: int = 10**6):
    """Distinct pairwise sums {x + y}, as a lexicographically sorted tuple."""
    pa, pb = points_of(a), points_of(b)
    if not pa or not pb:
        raise EmptyCodebook("point sets must be non-empty")
    if len(pa[0]) != len(pb[0]):
        raise DimensionMismatch(f"dimensions {len(pa[0])} and {len(pb[0])} differ")
    if len(pa) * len(pb) > budget:
        raise BudgetExceeded(f"{len(pa)}*{len(pb)} pair sums exceed budget {budget}")
    grid = to_integer_grid([pa, pb])
    if grid is not None:
        (ga, gb), den = grid
        n = ga.shape[1]
        sums = (ga[:, None, :] + gb[None, :, :]).reshape(-1, n)
        uniq = np.unique(sums, axis=0)
        return tuple(tuple(Fraction(int(v), den) for v in row) for row in uniq)
    seen = {tuple(u + v for u, v in zip(x, y)) for x in pa for y in pb}
    return tuple(sorted(seen))


@dataclass(frozen=True)
class SumBoundReport:
    codebook_size: int
    sum_size: int
    bound: int
    passed: bool


def verify_sum_bound(codebook: Codebook, budget: int = 10**6) -> SumBoundReport:
    """Check |C + C| <= 2^n |C| for the self-sum of a codebook."""
    s = minkowski_sum(codebook, codebook, budget)
    bound = (2 ** codebook.n) * len(codebook)
    return SumBoundReport(len(codebook), len(s), bound, len(s) <= bound)


def dither_second_moment(
    lattice: ConstructionALattice, samples: int = 100_000, seed: int = 0
) -> float:
    """Monte Carlo per-dimension second moment of the coarse fundamental cell.

    Draws uniformly from the basis parallelepiped and folds into the cell;
    the fold is measure preserving, so the folded sample is uniform there.
    """
    rng = np.random.default_rng([int(seed), 0x5EC0])
    basis = lattice.coarse_basis_float()
    t = rng.random((int(samples), lattice.n))
    raw = t @ basis.T
    acc = 0.0
    for row in raw:
        folded = lattice.mod_coarse(row)
        acc += float(np.dot(folded, folded))
    return acc / (int(samples) * lattice.n)


def scale_to_power(
    codebook: Codebook,
    power,
    samples: int = 100_000,
    seed: int = 0,
) -> Codebook:
    """Shrink a codebook so its dither's per-dimension power meets a budget.

    The power proxy is the Monte Carlo second moment of the coarse cell.
    If it already fits, the codebook is returned unchanged. Otherwise the
    whole nested pair is rescaled by an exact rational just below the true
    square-root ratio, so the constraint holds with certainty.
    """
    power = float(power)
    if math.isnan(power) or power <= 0:
        raise ValidationError("power", "power must be positive")
    if math.isinf(power):
        return codebook
    if all(c == 0 for pt in codebook.points for c in pt):
        raise DegenerateCodebook("all-zero codebook cannot be power scaled")
    sigma2 = dither_second_moment(codebook.lattice, samples, seed)
    target = Fraction(power)
    if Fraction(sigma2) <= target:
        return codebook
    ratio = _floor_sqrt_fraction(target / Fraction(sigma2))
    old = codebook.lattice
    scaled = ConstructionALattice(
        old.p, old.code_matrix, old.transform, old.scale * ratio
    )
    pts = [tuple(ratio * c for c in pt) for pt in codebook.points]
    return Codebook(scaled, pts)


def _floor_sqrt_fraction(value: Fraction, bits: int = 80) -> Fraction:
    """Largest dyadic-denominator rational r with r*r <= value."""
    root = math.isqrt((value.numerator << bits) // value.denominator)
    return Fraction(root, 1 << (bits // 2))


class BinnedCodebook:
    """A codebook partitioned into equal-size bins by a seeded shuffle.

    bins[w] is a sorted tuple of codeword indices; the bin index is the
    secret message, the position inside the bin is the random padding.
    """

    def __init__(self, codebook: Codebook, num_bins: int, seed: int = 0):
        size = len(codebook)
        if num_bins < 1 or num_bins > size:
            raise ValidationError("num_bins", f"need 1 <= num_bins <= {size}")
        if size % num_bins != 0:
            raise NonDivisibleBins(f"{num_bins} bins do not divide {size} codewords")
        perm = np.random.default_rng(int(seed)).permutation(size)
        per = size // num_bins
        self.codebook = codebook
        self.num_bins = num_bins
        self.seed = int(seed)
        self.bins = tuple(
            tuple(sorted(int(v) for v in perm[w * per : (w + 1) * per]))
            for w in range(num_bins)
        )
        self._bin_of = None

    @property
    def rate_per_dim(self) -> float:
        return self.codebook.rate_per_dim

    @property
    def bin_rate_per_dim(self) -> float:
        return math.log2(self.num_bins) / self.codebook.n

    def bin_of(self, index: int) -> int:
        if self._bin_of is None:
            table = np.empty(len(self.codebook), dtype=np.int64)
            for w, members in enumerate(self.bins):
                table[list(members)] = w
            self._bin_of = table
        return int(self._bin_of[index])


def assign_bins(codebook: Codebook, num_bins: int, seed: int = 0) -> BinnedCodebook:
    return BinnedCodebook(codebook, num_bins, seed)


class LayeredCodebook:
    """Independent per-layer codebooks whose points all live in one fine lattice."""

    def __init__(self, fine_lattice: ConstructionALattice, layers, powers):
        self.fine_lattice = fine_lattice
        self.layers = tuple(layers)
        self.powers = tuple(float(p) for p in powers)
        self.n = fine_lattice.n

    def __len__(self):
        return len(self.layers)


def build_layered(
    fine_lattice: ConstructionALattice,
    layer_specs,
    powers,
    budget: int = 10**6,
    samples: int = 100_000,
    seed: int = 0,
) -> LayeredCodebook:
    """Build layer codebooks from prefixes of the base code.

    layer_specs is a sequence of (k_i, scale_i): layer i keeps the first
    k_i generator columns and uses coarse scale scale_i. Each layer is
    power scaled to powers[i] and every resulting point must still be a
    point of the shared fine lattice; a layer that escapes it is rejected.
    """
    specs = list(layer_specs)
    pows = list(powers)
    if not specs:
        raise ValidationError("layers", "need at least one layer")
    if len(specs) != len(pows):
        raise ValidationError("powers", "one power per layer required")
    layers = []
    for i, ((k_i, scale_i), p_i) in enumerate(zip(specs, pows), start=1):
        k_i = int(k_i)
        if not 1 <= k_i <= fine_lattice.k:
            raise LayerNotNested(i, f"layer code dimension {k_i} not within base code")
        sub = tuple(row[:k_i] for row in fine_lattice.code_matrix)
        lat = ConstructionALattice(
            fine_lattice.p, sub, fine_lattice.transform, Fraction(scale_i)
        )
        cb = enumerate_codebook(lat, budget)
        cb = scale_to_power(cb, p_i, samples=samples, seed=seed)
        for pt in cb.points:
            if not fine_lattice.is_fine_point(pt):
                raise LayerNotNested(i, "scaled layer leaves the shared fine lattice")
        layers.append(cb)
    return LayeredCodebook(fine_lattice, layers, pows)
