"""Torus weights of the Grassmannian-product embedding and instability vectors.

Weights live in the ambient coordinates of the diagonal torus (one coordinate
per section, m in total); pairings against trace-zero vectors are independent
of the trace-zero projection, so weights are stored unprojected.  The
instability vector of a type has one constant value per block, k_g/m_g - k/m,
where k_g = N(d_g - r_g * genus) and m_g = d_g + r_g(1 - genus).  The positive
Weyl chamber convention throughout is weakly decreasing coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

from .errors import CapExceeded, NonPositiveBlockDimension
from .hn_types import CurveContext, FlagShape, HNType
from .linalg import Vec, dot, frac

DEFAULT_INDEX_CAP = 200_000


@dataclass(frozen=True)
class BetaVector:
    """Trace-zero instability vector of a type, with its block data.

    Entries are constant on blocks (m_g copies of k_g/m_g - k/m) and strictly
    decrease across blocks.  The full coordinate vector is materialised lazily
    since most computations only need the block data.
    """

    block_values: tuple[Fraction, ...]
    k_blocks: tuple[int, ...]
    m_blocks: tuple[int, ...]
    npoints: int
    tau: HNType

    @property
    def k(self) -> int:
        return sum(self.k_blocks)

    @property
    def m(self) -> int:
        return sum(self.m_blocks)

    @cached_property
    def entries(self) -> Vec:
        out: list[Fraction] = []
        for v, size in zip(self.block_values, self.m_blocks):
            out.extend([v] * size)
        return tuple(out)

    @cached_property
    def norm_sq(self) -> Fraction:
        return sum(
            (v * v * size for v, size in zip(self.block_values, self.m_blocks)),
            Fraction(0),
        )

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.block_values)

    @property
    def flag(self) -> FlagShape:
        return FlagShape(self.m_blocks)

    @cached_property
    def rank_blocks(self) -> tuple[int, ...]:
        """Block ranks r_g recovered from m_g - k_g/N."""
        out = []
        for k_g, m_g in zip(self.k_blocks, self.m_blocks):
            if k_g % self.npoints:
                raise ValueError("block data inconsistent with the point count")
            out.append(m_g - k_g // self.npoints)
        return tuple(out)

    def trace(self) -> Fraction:
        return sum(
            (v * size for v, size in zip(self.block_values, self.m_blocks)),
            Fraction(0),
        )

    def to_json(self) -> dict:
        return {
            "entries": [rational_to_json(v) for v in self.entries],
            "block_values": [rational_to_json(v) for v in self.block_values],
            "k_blocks": list(self.k_blocks),
            "m_blocks": list(self.m_blocks),
            "npoints": self.npoints,
            "norm_sq": rational_to_json(self.norm_sq),
            "tau": self.tau.to_json(),
        }


def rational_to_json(x: Fraction) -> dict:
    f = frac(x)
    return {"num": f.numerator, "den": f.denominator}


def rational_from_json(data) -> Fraction:
    return frac(data)


def beta_of_type(tau: HNType, ctx: CurveContext) -> BetaVector:
    """Instability vector of a type: blockwise k_g/m_g - k/m, trace zero.

    Raises NonPositiveBlockDimension when some block has d_g + r_g(1-g) <= 0,
    i.e. when the degree is too small for this construction.
    """
    g, n = ctx.genus, ctx.npoints
    k_blocks, m_blocks = [], []
    for idx, (r_g, d_g) in enumerate(tau.blocks, start=1):
        m_g = d_g + r_g * (1 - g)
        if m_g <= 0:
            raise NonPositiveBlockDimension(idx, m_g)
        k_blocks.append(n * (d_g - r_g * g))
        m_blocks.append(m_g)
    k, m = sum(k_blocks), sum(m_blocks)
    base = Fraction(k, m)
    values = tuple(Fraction(k_g, m_g) - base for k_g, m_g in zip(k_blocks, m_blocks))
    for a, b in zip(values, values[1:]):
        if a <= b:
            raise ValueError("block values failed to decrease; inconsistent type")
    return BetaVector(values, tuple(k_blocks), tuple(m_blocks), n, tau)


@dataclass(frozen=True)
class CoordinateIndex:
    """Name of one projective coordinate of the product embedding.

    ``kind`` is "det" or "end"; ``subsets`` holds one sorted r-element subset
    of {1..m} per evaluation point, and for the "end" kind ``ij`` holds one
    (i, j) pair of 1-based positions into the corresponding subset.
    """

    kind: str
    subsets: tuple[tuple[int, ...], ...]
    ij: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("det", "end"):
            raise ValueError("kind must be 'det' or 'end'")
        subsets = tuple(tuple(sorted(int(x) for x in s)) for s in self.subsets)
        object.__setattr__(self, "subsets", subsets)
        if self.kind == "end":
            if self.ij is None or len(self.ij) != len(subsets):
                raise ValueError("'end' indices need one (i, j) pair per point")
            object.__setattr__(
                self, "ij", tuple((int(i), int(j)) for i, j in self.ij)
            )
        elif self.ij is not None:
            raise ValueError("'det' indices carry no (i, j) data")

    def to_json(self) -> dict:
        data = {"kind": self.kind, "subsets": [list(s) for s in self.subsets]}
        if self.kind == "end":
            data["ij"] = [list(p) for p in self.ij]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CoordinateIndex":
        ij = data.get("ij")
        return cls(
            data["kind"],
            tuple(tuple(s) for s in data["subsets"]),
            tuple(tuple(p) for p in ij) if ij is not None else None,
        )


def _validate_index(idx: CoordinateIndex, ctx: CurveContext) -> int:
    m = ctx.require_positive_sections()
    r, n = ctx.rank, ctx.npoints
    if len(idx.subsets) != n:
        raise ValueError(f"index carries {len(idx.subsets)} subsets, expected {n}")
    for s in idx.subsets:
        if len(s) != r or len(set(s)) != r:
            raise ValueError(f"subset {s} is not an r-element subset")
        if s[0] < 1 or s[-1] > m:
            raise ValueError(f"subset {s} out of range 1..{m}")
    if idx.kind == "end":
        for i, j in idx.ij:
            if not (1 <= i <= r and 1 <= j <= r):
                raise ValueError(f"(i, j) = ({i},{j}) out of range 1..{r}")
    return m


def alpha_of_index(idx: CoordinateIndex, ctx: CurveContext) -> Vec:
    """Ambient torus weight of a coordinate, in the trace-compatible form.

    det: sum over points of the characters outside the subset; end: the same
    plus the character at the subset's j-th position minus the one at its
    i-th position.
    """
    m = _validate_index(idx, ctx)
    w = [Fraction(0)] * m
    for point, subset in enumerate(idx.subsets):
        inside = set(subset)
        for l in range(1, m + 1):
            if l not in inside:
                w[l - 1] += 1
        if idx.kind == "end":
            i, j = idx.ij[point]
            w[subset[j - 1] - 1] += 1
            w[subset[i - 1] - 1] -= 1
    return tuple(w)


def pairing(a, b) -> Fraction:
    """Euclidean dot product on ambient coordinates."""
    av = a.entries if isinstance(a, BetaVector) else a
    bv = b.entries if isinstance(b, BetaVector) else b
    return dot(tuple(av), tuple(bv))


def norm_sq(v) -> Fraction:
    if isinstance(v, BetaVector):
        return v.norm_sq
    return dot(tuple(v), tuple(v))


@dataclass(frozen=True)
class BBWeights:
    """Weights of the grading subgroup on the Higgs-field fibre, with multiplicity."""

    weights: tuple[Fraction, ...]
    min_weight: Fraction


def bb_weights(tau: HNType, ctx: CurveContext) -> BBWeights:
    """The multiset {0} plus all pairwise ratio differences k_j/m_j - k_i/m_i.

    Sorted ascending; the minimum always equals the last ratio minus the
    first.
    """
    beta = beta_of_type(tau, ctx)
    ratios = [Fraction(k_g, m_g) for k_g, m_g in zip(beta.k_blocks, beta.m_blocks)]
    weights = [Fraction(0)]
    s = len(ratios)
    for i in range(s):
        for j in range(s):
            if i != j:
                weights.append(ratios[j] - ratios[i])
    weights.sort()
    return BBWeights(tuple(weights), weights[0])


def coordinate_index_count(ctx: CurveContext) -> int:
    """Exact number of coordinate indices: C(m,r)^N * (1 + r^(2N))."""
    m = ctx.require_positive_sections()
    r, n = ctx.rank, ctx.npoints
    base = math.comb(m, r) ** n
    return base + base * r ** (2 * n)


def enumerate_coordinate_indices(
    ctx: CurveContext, cap: int = DEFAULT_INDEX_CAP
) -> Iterator[CoordinateIndex]:
    """Yield every det and end coordinate index exactly once, det family first.

    Raises CapExceeded (with the exact count) before yielding anything if the
    total would exceed the cap.  The stream is restartable: call again for a
    fresh iterator.
    """
    total = coordinate_index_count(ctx)
    if total > cap:
        raise CapExceeded(total, cap)
    m, r, n = ctx.sections_dim, ctx.rank, ctx.npoints
    subsets = list(itertools.combinations(range(1, m + 1), r))

    def gen() -> Iterator[CoordinateIndex]:
        for combo in itertools.product(subsets, repeat=n):
            yield CoordinateIndex("det", combo)
        pairs = list(itertools.product(range(1, r + 1), repeat=2))
        for combo in itertools.product(subsets, repeat=n):
            for ij in itertools.product(pairs, repeat=n):
                yield CoordinateIndex("end", combo, ij)

    return gen()


def grading_one_parameter_subgroup(beta: BetaVector) -> tuple[int, ...] | None:
    """Integer weight vector q*beta for the smallest positive rational q.

    None for the zero vector, which grades nothing.
    """
    if beta.is_zero:
        return None
    entries = beta.entries
    denom_lcm = 1
    for e in entries:
        denom_lcm = denom_lcm * e.denominator // math.gcd(denom_lcm, e.denominator)
    scaled = [int(e * denom_lcm) for e in entries]
    g = 0
    for x in scaled:
        g = math.gcd(g, x)
    return tuple(x // g for x in scaled)


def step2_trace_identity(
    beta: BetaVector, bound: int = 2
) -> tuple[int, bool, tuple[int, ...] | None]:
    """Check the grading/trace identity over all integer trace-zero diagonals.

    For every integer diagonal one-parameter subgroup with entries in
    [-bound, bound] and zero trace, the blockwise quantity
    sum_g(-N r_g/m_g * trace_g) must equal the pairing with beta.  Both sides
    depend on the diagonal only through its block traces, so the check runs
    exactly over all achievable block-trace tuples.  Returns (number of
    classes checked, all_ok, first failing block-trace tuple or None).
    """
    n = beta.npoints
    r_blocks = beta.rank_blocks
    m_blocks = beta.m_blocks
    values = beta.block_values
    s = len(m_blocks)
    ranges = [range(-bound * m_g, bound * m_g + 1) for m_g in m_blocks[:-1]]
    last_lo, last_hi = -bound * m_blocks[-1], bound * m_blocks[-1]
    checked = 0
    for head in itertools.product(*ranges) if s > 1 else [()]:
        t_last = -sum(head)
        if not (last_lo <= t_last <= last_hi):
            continue
        traces = head + (t_last,)
        checked += 1
        lhs = sum(
            (-Fraction(n * r_g, m_g) * t for r_g, m_g, t in zip(r_blocks, m_blocks, traces)),
            Fraction(0),
        )
        rhs = sum((v * t for v, t in zip(values, traces)), Fraction(0))
        if lhs != rhs:
            return checked, False, traces
    return checked, True, None


def pairing_with_diagonal(beta: BetaVector, lam: tuple[int, ...]) -> Fraction:
    """Pairing of beta with an explicit integer diagonal, for spot checks."""
    return dot(beta.entries, tuple(Fraction(x) for x in lam))
