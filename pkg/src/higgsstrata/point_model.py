"""Explicit matrix models of points in products of extended Grassmannians.

A point has one factor <y, [c : phi]> per evaluation point: y an r x m matrix
of full row rank, c a scalar and phi an r x r matrix with (c, phi) != (0, 0).
Its projective coordinates are

    det family:  prod_k  c_k * det(y_k restricted to columns J_k)
    end family:  prod_k  det(y_k|I_k) * tr(y_k|I_k . sigma_ij . y_k|I_k^(-1) . phi_k^T)

where sigma_ij has a single one in position (i, j); the end value is evaluated
through the adjugate so it stays polynomial when the minor vanishes.  Note the
transpose: phi is stored in the presentation's convention, i.e. as the
transpose of the endomorphism of the quotient fibre.  Consequently a Higgs
field preserving the subspace flag appears here as a block *lower* triangular
matrix, and the basis-change rule conjugates by the inverse transpose:

    <alpha y, [c / det(alpha) : alpha^-T phi alpha^T / det(alpha)]> = <y, [c : phi]>,

which leaves every coordinate literally unchanged.  Membership in the
instability loci, the coordinate-zeroing retraction, the two verification
predicates for the instability correspondence, and the first-order unipotent
stabiliser dimensions are all computed exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import (
    CapExceeded,
    DegeneratePoint,
    InvariantViolation,
    NotInY,
)
from .hn_types import CurveContext, FlagShape, HNType
from .linalg import (
    Dual,
    EchelonAccumulator,
    Mat,
    Vec,
    adapted_flag_basis,
    adjugate,
    det,
    frac,
    inverse,
    mat,
    mat_mul,
    nullspace,
    rank,
    transpose,
)
from .minnorm import PointCloud, min_norm_point
from .weight_lattice import (
    DEFAULT_INDEX_CAP,
    BetaVector,
    CoordinateIndex,
    beta_of_type,
    coordinate_index_count,
    rational_from_json,
    rational_to_json,
    step2_trace_identity,
)


@dataclass(frozen=True)
class Factor:
    """One evaluation-point factor <y, [c : phi]>."""

    y: Mat
    c: Fraction
    phi: Mat

    def __post_init__(self):
        object.__setattr__(self, "y", mat(self.y))
        object.__setattr__(self, "c", frac(self.c))
        object.__setattr__(self, "phi", mat(self.phi))

    def to_json(self) -> dict:
        return {
            "y": [[rational_to_json(x) for x in row] for row in self.y],
            "c": rational_to_json(self.c),
            "phi": [[rational_to_json(x) for x in row] for row in self.phi],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Factor":
        return cls(
            mat([[rational_from_json(x) for x in row] for row in data["y"]]),
            rational_from_json(data["c"]),
            mat([[rational_from_json(x) for x in row] for row in data["phi"]]),
        )


@dataclass(frozen=True)
class ModelPoint:
    """A point of the product of extended Grassmannians, one factor per point."""

    factors: tuple[Factor, ...]

    def __post_init__(self):
        factors = tuple(
            f if isinstance(f, Factor) else Factor(*f) for f in self.factors
        )
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise ValueError("a model point needs at least one factor")
        r, m = self.r, self.m
        for k, f in enumerate(factors, start=1):
            if len(f.y) != r or len(f.y[0]) != m:
                raise ValueError(f"factor {k}: y must be {r}x{m}")
            if len(f.phi) != r or (f.phi and len(f.phi[0]) != r):
                raise ValueError(f"factor {k}: phi must be {r}x{r}")
            if rank(f.y) != r:
                raise ValueError(f"factor {k}: y does not have full row rank")
            if f.c == 0 and all(not x for row in f.phi for x in row):
                raise ValueError(f"factor {k}: (c, phi) must not be (0, 0)")

    @property
    def r(self) -> int:
        return len(self.factors[0].y)

    @property
    def m(self) -> int:
        return len(self.factors[0].y[0])

    @property
    def npoints(self) -> int:
        return len(self.factors)

    def rescale_factor(self, k: int, t) -> "ModelPoint":
        """Projective rescaling (c, phi) -> (t c, t phi) of factor k (0-based)."""
        t = frac(t)
        if t == 0:
            raise ValueError("rescaling must be by a nonzero scalar")
        f = self.factors[k]
        scaled = Factor(f.y, t * f.c, tuple(tuple(t * x for x in row) for row in f.phi))
        return ModelPoint(self.factors[:k] + (scaled,) + self.factors[k + 1:])

    def gauge_factor(self, k: int, alpha) -> "ModelPoint":
        """Basis change of the quotient fibre of factor k by alpha in GL(r).

        y -> alpha y, c -> c / det(alpha), phi -> alpha^-T phi alpha^T / det(alpha);
        every projective coordinate is unchanged by this move.
        """
        alpha_m = mat(alpha)
        d = det(alpha_m)
        if d == 0:
            raise ValueError("gauge matrix must be invertible")
        f = self.factors[k]
        alpha_t = transpose(alpha_m)
        alpha_t_inv = inverse(alpha_t)
        new_phi = mat_mul(mat_mul(alpha_t_inv, f.phi), alpha_t)
        new_phi = tuple(tuple(x / d for x in row) for row in new_phi)
        gauged = Factor(mat_mul(alpha_m, f.y), f.c / d, new_phi)
        return ModelPoint(self.factors[:k] + (gauged,) + self.factors[k + 1:])

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, data: dict) -> "ModelPoint":
        return cls(tuple(Factor.from_json(f) for f in data["factors"]))


class Membership(Enum):
    IN_Z = "InZ"
    IN_Y_NOT_Z = "InY_not_Z"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class CoordinateTable:
    """Projective coordinates of a point, defined up to one global scalar."""

    values: dict[CoordinateIndex, Fraction]

    def __post_init__(self):
        if not any(self.values.values()):
            raise DegeneratePoint("all coordinates vanish")

    def support(self) -> list[CoordinateIndex]:
        return [idx for idx, v in self.values.items() if v]

    def __getitem__(self, idx: CoordinateIndex) -> Fraction:
        return self.values[idx]

    def proportional_to(self, other: "CoordinateTable") -> bool:
        """Equality as projective coordinate vectors (one global scalar)."""
        if set(self.values) != set(other.values):
            return False
        scalar = None
        for idx, v in self.values.items():
            w = other.values[idx]
            if (v == 0) != (w == 0):
                return False
            if v != 0:
                ratio = w / v
                if scalar is None:
                    scalar = ratio
                elif ratio != scalar:
                    return False
        return scalar is not None


def _columns(y: Mat) -> list[Vec]:
    return [tuple(row[l] for row in y) for l in range(len(y[0]))]


def _minor(y, subset: tuple[int, ...]):
    """Square submatrix of the 1-based columns in ``subset``."""
    return tuple(tuple(row[l - 1] for l in subset) for row in y)


def _end_matrix(y_i, phi):
    """B = y_I^T phi adj(y_I^T); entry (i, j) is det * tr(y_I s_ij y_I^-1 phi^T)."""
    y_t = transpose(y_i)
    return mat_mul(mat_mul(y_t, phi), adjugate(y_t))


def _factor_det_values(factor_y, factor_c, subsets) -> dict:
    return {s: factor_c * det(_minor(factor_y, s)) for s in subsets}


def _factor_end_values(factor_y, factor_phi, subsets, r: int) -> dict:
    out = {}
    for s in subsets:
        b = _end_matrix(_minor(factor_y, s), factor_phi)
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                out[(s, i, j)] = b[i - 1][j - 1]
    return out


def _table_from_factors(factors, m: int, r: int) -> dict[CoordinateIndex, object]:
    """Full coordinate table from (y, c, phi) triples over any base ring."""
    subsets = list(itertools.combinations(range(1, m + 1), r))
    det_parts = [_factor_det_values(y, c, subsets) for y, c, phi in factors]
    end_parts = [_factor_end_values(y, phi, subsets, r) for y, c, phi in factors]
    table: dict[CoordinateIndex, object] = {}
    n = len(factors)
    for combo in itertools.product(subsets, repeat=n):
        val = det_parts[0][combo[0]]
        for k in range(1, n):
            val = val * det_parts[k][combo[k]]
        table[CoordinateIndex("det", combo)] = val
    pairs = list(itertools.product(range(1, r + 1), repeat=2))
    for combo in itertools.product(subsets, repeat=n):
        for ij in itertools.product(pairs, repeat=n):
            val = end_parts[0][(combo[0],) + tuple(ij[0])]
            for k in range(1, n):
                val = val * end_parts[k][(combo[k],) + tuple(ij[k])]
            table[CoordinateIndex("end", combo, ij)] = val
    return table


def _check_shapes(p: ModelPoint, ctx: CurveContext) -> None:
    m = ctx.require_positive_sections()
    if p.m != m or p.r != ctx.rank or p.npoints != ctx.npoints:
        raise ValueError(
            f"point shape ({p.r}x{p.m}, {p.npoints} factors) does not match "
            f"context ({ctx.rank}x{m}, {ctx.npoints} factors)"
        )


def coordinates(p: ModelPoint, ctx: CurveContext, cap: int = DEFAULT_INDEX_CAP) -> CoordinateTable:
    """Evaluate every projective coordinate of the point, exactly.

    End-family entries are computed through the adjugate (det times the trace
    of the adjugate conjugation), so vanishing minors are handled without any
    matrix inversion.  Raises CapExceeded when the index count exceeds the
    cap, and DegeneratePoint if every coordinate vanishes.
    """
    _check_shapes(p, ctx)
    total = coordinate_index_count(ctx)
    if total > cap:
        raise CapExceeded(total, cap)
    table = _table_from_factors(
        [(f.y, f.c, f.phi) for f in p.factors], p.m, p.r
    )
    return CoordinateTable(table)


def _beta_entries(beta: BetaVector, p: ModelPoint) -> Vec:
    if beta.m != p.m:
        raise ValueError("instability vector length does not match the point")
    return beta.entries


def _factor_weight_supports(p: ModelPoint, beta: BetaVector):
    """Per factor: achievable weights with a witness key, for both families.

    Returns (det_list, end_list) where each entry is a dict
    {weight: witness key} over the factor's nonzero coordinates.
    """
    entries = _beta_entries(beta, p)
    m, r = p.m, p.r
    subsets = list(itertools.combinations(range(1, m + 1), r))
    det_weights = {
        s: -sum((entries[l - 1] for l in s), Fraction(0)) for s in subsets
    }
    det_list, end_list = [], []
    for f in p.factors:
        dets = {}
        if f.c != 0:
            for s in subsets:
                if det(_minor(f.y, s)):
                    w = det_weights[s]
                    if w not in dets:
                        dets[w] = s
        ends = {}
        for s in subsets:
            b = _end_matrix(_minor(f.y, s), f.phi)
            base = det_weights[s]
            for i in range(1, r + 1):
                for j in range(1, r + 1):
                    if b[i - 1][j - 1]:
                        w = base + entries[s[j - 1] - 1] - entries[s[i - 1] - 1]
                        if w not in ends:
                            ends[w] = (s, i, j)
        det_list.append(dets)
        end_list.append(ends)
    return det_list, end_list


def _family_min_max(per_factor) -> tuple[Fraction, Fraction] | None:
    if any(not d for d in per_factor):
        return None
    lo = sum((min(d) for d in per_factor), Fraction(0))
    hi = sum((max(d) for d in per_factor), Fraction(0))
    return lo, hi


def _achieve_sum(per_factor, target: Fraction):
    """One witness tuple of per-factor keys with weights summing to target."""
    items = [sorted(d.items()) for d in per_factor]
    mins = [it[0][0] for it in items]
    maxs = [it[-1][0] for it in items]
    suffix_min = [Fraction(0)] * (len(items) + 1)
    suffix_max = [Fraction(0)] * (len(items) + 1)
    for k in range(len(items) - 1, -1, -1):
        suffix_min[k] = suffix_min[k + 1] + mins[k]
        suffix_max[k] = suffix_max[k + 1] + maxs[k]

    def dfs(k: int, acc: Fraction, chosen: tuple):
        if k == len(items):
            return chosen if acc == target else None
        if acc + suffix_min[k] > target or acc + suffix_max[k] < target:
            return None
        for w, key in items[k]:
            got = dfs(k + 1, acc + w, chosen + (key,))
            if got is not None:
                return got
        return None

    return dfs(0, Fraction(0), ())


def _collect_below(per_factor, target: Fraction, limit: int):
    """Up to ``limit`` witness tuples with weight sum strictly below target."""
    items = [sorted(d.items()) for d in per_factor]
    suffix_min = [Fraction(0)] * (len(items) + 1)
    for k in range(len(items) - 1, -1, -1):
        suffix_min[k] = suffix_min[k + 1] + items[k][0][0]
    found: list[tuple[tuple, Fraction]] = []
    truncated = [False]

    def dfs(k: int, acc: Fraction, chosen: tuple):
        if len(found) >= limit:
            truncated[0] = True
            return
        if acc + suffix_min[k] >= target:
            return
        if k == len(items):
            found.append((chosen, acc))
            return
        for w, key in items[k]:
            dfs(k + 1, acc + w, chosen + (key,))
            if truncated[0]:
                return

    dfs(0, Fraction(0), ())
    return found, truncated[0]


def _det_index(keys) -> CoordinateIndex:
    return CoordinateIndex("det", tuple(keys))

def _end_index(keys) -> CoordinateIndex:
    return CoordinateIndex(
        "end",
        tuple(k[0] for k in keys),
        tuple((k[1], k[2]) for k in keys),
    )


def membership(p: ModelPoint, beta: BetaVector, ctx: CurveContext) -> Membership:
    """Locate the point relative to the equality and inequality loci of beta.

    IN_Z: every supported coordinate pairs with beta exactly at its squared
    norm.  IN_Y_NOT_Z: no supported coordinate pairs below it, at least one
    pairs at it, and some pairs above.  OUTSIDE otherwise (including the case
    where no equality witness exists).
    """
    _check_shapes(p, ctx)
    det_list, end_list = _factor_weight_supports(p, beta)
    target = beta.norm_sq
    ranges = [r for r in (_family_min_max(det_list), _family_min_max(end_list)) if r]
    if not ranges:
        raise DegeneratePoint("all coordinates vanish")
    lo = min(r[0] for r in ranges)
    hi = max(r[1] for r in ranges)
    if lo < target:
        return Membership.OUTSIDE
    if lo == target:
        return Membership.IN_Z if hi == target else Membership.IN_Y_NOT_Z
    return Membership.OUTSIDE


@dataclass(frozen=True)
class Step1Report:
    """Outcome of the coordinate-by-coordinate inequality check against beta."""

    passed: bool
    norm_sq: Fraction
    min_support_weight: Fraction
    violations: tuple[tuple[CoordinateIndex, Fraction], ...]
    violations_truncated: bool
    equality_witness: CoordinateIndex | None


def verify_step1(
    p: ModelPoint, beta: BetaVector, ctx: CurveContext, max_violations: int = 16
) -> Step1Report:
    """Check that every supported coordinate pairs with beta at or above its
    squared norm, and exhibit one equality witness.

    The report never raises on failure: violations (up to ``max_violations``)
    and the missing-witness condition are recorded instead.
    """
    _check_shapes(p, ctx)
    det_list, end_list = _factor_weight_supports(p, beta)
    target = beta.norm_sq
    families = []
    if all(det_list):
        families.append(("det", det_list, _det_index))
    if all(end_list):
        families.append(("end", end_list, _end_index))
    if not families:
        raise DegeneratePoint("all coordinates vanish")
    lo = min(
        sum((min(d) for d in fam), Fraction(0)) for _, fam, _ in families
    )
    violations: list[tuple[CoordinateIndex, Fraction]] = []
    truncated = False
    witness = None
    for _, fam, make_index in families:
        if len(violations) < max_violations:
            below, trunc = _collect_below(fam, target, max_violations - len(violations))
            truncated = truncated or trunc
            violations.extend((make_index(keys), w) for keys, w in below)
        if witness is None:
            keys = _achieve_sum(fam, target)
            if keys is not None:
                witness = make_index(keys)
    # pass/fail comes from the exact minimum, not the (possibly truncated) list
    passed = lo >= target and witness is not None
    return Step1Report(
        passed, target, lo, tuple(violations), truncated, witness
    )


def _block_filter(matrix: Mat, row_cuts, col_cuts) -> Mat:
    """Zero out every entry outside the aligned diagonal blocks."""
    def block_of(pos: int, cuts) -> int:
        for g, cut in enumerate(cuts):
            if pos < cut:
                return g
        raise IndexError

    return tuple(
        tuple(
            x if block_of(a, row_cuts) == block_of(b, col_cuts) else Fraction(0)
            for b, x in enumerate(row)
        )
        for a, row in enumerate(matrix)
    )


def _adapted_factor(f: Factor, cuts) -> tuple[Factor, tuple[int, ...]]:
    """Gauge a factor into the basis adapted to the image flag of the cuts."""
    g, dims = adapted_flag_basis(_columns(f.y), cuts)
    g_inv = inverse(g)
    d = det(g)
    y_t = mat_mul(g_inv, f.y)
    g_t = transpose(g)
    g_t_inv = inverse(g_t)
    phi_t = mat_mul(mat_mul(g_t, f.phi), g_t_inv)
    phi_t = tuple(tuple(d * x for x in row) for row in phi_t)
    return Factor(y_t, d * f.c, phi_t), dims


def retract_p_beta(p: ModelPoint, beta: BetaVector, ctx: CurveContext) -> ModelPoint:
    """Coordinate-zeroing retraction onto the equality locus of beta.

    Matrix-level: each factor is gauged into a basis adapted to the image
    flag, then both y and phi are cut down to their aligned diagonal blocks.
    The resulting table equals the input table with every coordinate pairing
    strictly above the squared norm set to zero.  Raises NotInY for points
    outside the inequality locus.
    """
    if membership(p, beta, ctx) is Membership.OUTSIDE:
        raise NotInY("the retraction is defined only on the inequality locus")
    cuts = beta.flag.cuts
    new_factors = []
    for f in p.factors:
        adapted, dims = _adapted_factor(f, cuts)
        y_new = _block_filter(adapted.y, dims, cuts)
        phi_new = _block_filter(adapted.phi, dims, dims)
        new_factors.append(Factor(y_new, adapted.c, phi_new))
    return ModelPoint(tuple(new_factors))


@dataclass(frozen=True)
class HiggsDatum:
    """Flag-adapted matrix data presenting a pair of the given type.

    The flag on the section space is in standard position with block sizes
    d_g + r_g(1 - genus); for every factor the image of the flag's step g
    must have dimension r_1 + ... + r_g, and the stored phi must be block
    lower triangular with respect to that image flag (the presentation of a
    filtration-preserving Higgs field; see the module docstring).
    """

    tau: HNType
    ctx: CurveContext
    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "factors",
            tuple(f if isinstance(f, Factor) else Factor(*f) for f in self.factors),
        )


def from_higgs_data(h: HiggsDatum) -> ModelPoint:
    """Validate flag-adapted data and return the model point it presents.

    Raises InvariantViolation naming the failing (block, factor) pair when an
    image-flag dimension is wrong or the Higgs matrix fails to preserve the
    flag; the result is guaranteed to satisfy the step-1 inequalities for the
    instability vector of its type (given an equality witness, e.g. for
    finite points).
    """
    beta = beta_of_type(h.tau, h.ctx)
    cuts = beta.flag.cuts
    r = h.ctx.rank
    rank_prefix = []
    acc = 0
    for r_g, _ in h.tau.blocks:
        acc += r_g
        rank_prefix.append(acc)
    if len(h.factors) != h.ctx.npoints:
        raise ValueError("factor count does not match the context")
    for k, f in enumerate(h.factors, start=1):
        if len(f.y) != r or len(f.y[0]) != beta.m:
            raise ValueError(f"factor {k}: y must be {r}x{beta.m}")
        try:
            g, dims = adapted_flag_basis(_columns(f.y), cuts)
        except ValueError:
            raise InvariantViolation(len(cuts), k, "y does not have full row rank")
        for gamma, (dim, want) in enumerate(zip(dims, rank_prefix), start=1):
            if dim != want:
                raise InvariantViolation(
                    gamma, k, f"image flag has dimension {dim}, expected {want}"
                )
        g_t = transpose(g)
        phi_t = mat_mul(mat_mul(g_t, f.phi), inverse(g_t))
        for a in range(r):
            for b in range(r):
                ga = next(i for i, cut in enumerate(dims) if a < cut)
                gb = next(i for i, cut in enumerate(dims) if b < cut)
                if ga < gb and phi_t[a][b] != 0:
                    raise InvariantViolation(
                        ga + 1, k, "phi does not preserve the image flag"
                    )
    return ModelPoint(h.factors)


@dataclass(frozen=True)
class BlockReport:
    """Torus-semistability verdict for one graded block of a retracted point."""

    index: int
    block_rank: int
    block_sections: int
    semistable: bool
    witness: tuple[int, ...] | None
    vacuous: bool = False


@dataclass(frozen=True)
class Step2Report:
    """Per-block torus checks plus the grading/trace identity."""

    passed: bool
    blocks: tuple[BlockReport, ...]
    trace_classes_checked: int
    trace_identity_ok: bool
    retracted: ModelPoint


def _integer_direction(v: Vec) -> tuple[int, ...]:
    lcm = 1
    for x in v:
        d = frac(x).denominator
        lcm = lcm * d // math.gcd(lcm, d)
    return tuple(int(x * lcm) for x in v)


def _block_weight_set(y_blocks, c_vals, phi_blocks, m_g: int) -> set[Vec]:
    """Distinct supported weights of one graded block across all factors."""
    per_factor: list[set[Vec]] = []
    for y_b, c, phi_b in zip(y_blocks, c_vals, phi_blocks):
        r_b = len(y_b)
        weights: set[Vec] = set()
        subsets = list(itertools.combinations(range(1, m_g + 1), r_b))
        base = {
            s: tuple(
                Fraction(0) if l in s else Fraction(1) for l in range(1, m_g + 1)
            )
            for s in subsets
        }
        if c != 0:
            for s in subsets:
                if r_b == 0 or det(_minor(y_b, s)):
                    weights.add(base[s])
        if r_b:
            for s in subsets:
                b = _end_matrix(_minor(y_b, s), phi_b)
                for i in range(1, r_b + 1):
                    for j in range(1, r_b + 1):
                        if b[i - 1][j - 1]:
                            w = list(base[s])
                            w[s[j - 1] - 1] += 1
                            w[s[i - 1] - 1] -= 1
                            weights.add(tuple(w))
        per_factor.append(weights)
    if any(not w for w in per_factor):
        return set()
    sums = per_factor[0]
    for nxt in per_factor[1:]:
        sums = {
            tuple(a + b for a, b in zip(w1, w2)) for w1 in sums for w2 in nxt
        }
    return sums


def verify_step2(
    p: ModelPoint,
    beta: BetaVector,
    ctx: CurveContext,
    lambda_bound: int = 2,
) -> Step2Report:
    """Torus-level semistability of the retracted point, block by block.

    Each graded block must contain its twisted character (the barycentric
    multiple of the all-ones vector fixed by the trace bookkeeping) in the
    convex hull of its supported weights; failures return the exact
    separating direction found by the minimum-norm computation.  The
    blockwise grading/trace identity is checked exactly over all integer
    trace-zero diagonal subgroups with entries up to ``lambda_bound``.  This
    is a necessary condition for full semistability, not a decision of it.
    """
    retracted = retract_p_beta(p, beta, ctx)
    cuts = (0,) + beta.flag.cuts
    blocks: list[BlockReport] = []
    # Image-block boundaries per factor (the retracted point is block diagonal).
    dims_per_factor = []
    for f in retracted.factors:
        _, dims = adapted_flag_basis(_columns(f.y), beta.flag.cuts)
        dims_per_factor.append((0,) + dims)
    n = ctx.npoints
    all_ok = True
    for gamma in range(1, len(beta.m_blocks) + 1):
        m_g = beta.m_blocks[gamma - 1]
        y_blocks, c_vals, phi_blocks, r_bs = [], [], [], []
        for f, dims in zip(retracted.factors, dims_per_factor):
            r_lo, r_hi = dims[gamma - 1], dims[gamma]
            c_lo, c_hi = cuts[gamma - 1], cuts[gamma]
            y_blocks.append(
                tuple(tuple(f.y[a][b] for b in range(c_lo, c_hi)) for a in range(r_lo, r_hi))
            )
            phi_blocks.append(
                tuple(tuple(f.phi[a][b] for b in range(r_lo, r_hi)) for a in range(r_lo, r_hi))
            )
            c_vals.append(f.c)
            r_bs.append(r_hi - r_lo)
        weights = _block_weight_set(y_blocks, c_vals, phi_blocks, m_g)
        if not weights:
            blocks.append(
                BlockReport(gamma, max(r_bs), m_g, True, None, vacuous=True)
            )
            continue
        chi_scale = sum(Fraction(m_g - r_b, m_g) for r_b in r_bs)
        chi = tuple(chi_scale for _ in range(m_g))
        translated = [tuple(a - b for a, b in zip(w, chi)) for w in weights]
        v = min_norm_point(PointCloud.from_points(translated))
        ss = all(x == 0 for x in v)
        witness = None if ss else _integer_direction(v)
        all_ok = all_ok and ss
        blocks.append(BlockReport(gamma, max(r_bs), m_g, ss, witness))
    checked, identity_ok, _ = step2_trace_identity(beta, lambda_bound)
    return Step2Report(
        all_ok and identity_ok, tuple(blocks), checked, identity_ok, retracted
    )


def _lie_upper_positions(flag: FlagShape) -> list[tuple[int, int]]:
    """0-based (row, col) positions of the strictly upper block triangle."""
    return [
        (a, b)
        for a in range(flag.total)
        for b in range(flag.total)
        if flag.block_of(a + 1) < flag.block_of(b + 1)
    ]


def unipotent_stabilizer_dim(
    p: ModelPoint,
    flag: FlagShape,
    ctx: CurveContext,
    cap: int = DEFAULT_INDEX_CAP,
) -> int:
    """Dimension of the first-order unipotent stabiliser of the point.

    The unipotent algebra is the strictly upper block triangle of the flag
    (blocks ordered by decreasing instability value); a direction stabilises
    the point when its first-order action on the full coordinate table is a
    scalar multiple of the table.  Computed as the exact nullity of the
    linear system in (direction, scalar), with coordinates differentiated
    through dual numbers.
    """
    _check_shapes(p, ctx)
    if flag.total != p.m:
        raise ValueError("flag total must equal the section count")
    total = coordinate_index_count(ctx)
    if total > cap:
        raise CapExceeded(total, cap)
    positions = _lie_upper_positions(flag)
    base = _table_from_factors([(f.y, f.c, f.phi) for f in p.factors], p.m, p.r)
    order = list(base)
    if not any(base[idx] for idx in order):
        raise DegeneratePoint("all coordinates vanish")
    eps_columns = []
    for (a, l) in positions:
        dual_factors = []
        for f in p.factors:
            eps_y = tuple(
                tuple(
                    f.y[i][a] if col == l else Fraction(0)
                    for col in range(p.m)
                )
                for i in range(p.r)
            )
            y_dual = tuple(
                tuple(Dual(x, e) for x, e in zip(row, erow))
                for row, erow in zip(f.y, eps_y)
            )
            c_dual = Dual(f.c, Fraction(0))
            phi_dual = tuple(tuple(Dual(x, Fraction(0)) for x in row) for row in f.phi)
            dual_factors.append((y_dual, c_dual, phi_dual))
        dual_table = _table_from_factors(dual_factors, p.m, p.r)
        eps_columns.append([dual_table[idx].b for idx in order])
    acc = EchelonAccumulator(len(positions) + 1)
    for row_i, idx in enumerate(order):
        row = [col[row_i] for col in eps_columns] + [-base[idx]]
        if any(row):
            acc.add(row)
    return acc.nullity


def nilpotent_commutant_dim(flag: FlagShape, phis) -> int:
    """Dimension of flag-lowering endomorphisms commuting with every matrix.

    Matrices here are plain endomorphisms in the column convention (the
    bundle-side convention of the block procedure, not the transposed
    presentation of ``ModelPoint``): a lowering map sends flag step i into
    step i-1 and is strictly upper block triangular.  Exact nullity of the
    commutator system.
    """
    mats = [mat(phi) for phi in phis]
    r = flag.total
    for phi in mats:
        if len(phi) != r or (phi and len(phi[0]) != r):
            raise ValueError(f"matrices must be {r}x{r} for this flag")
    positions = _lie_upper_positions(flag)
    if not positions:
        return 0
    rows = []
    for phi in mats:
        for i in range(r):
            for j in range(r):
                row = []
                for (a, b) in positions:
                    coeff = Fraction(0)
                    if i == a:
                        coeff += phi[b][j]
                    if j == b:
                        coeff -= phi[i][a]
                    row.append(coeff)
                rows.append(tuple(row))
    return len(positions) - rank(tuple(rows))


def nilpotent_commutant_dim_dense_oracle(flag: FlagShape, phis) -> int:
    """Independent route: full-space commutant intersected with the lowering triangle."""
    mats = [mat(phi) for phi in phis]
    r = flag.total
    rows = []
    for phi in mats:
        for i in range(r):
            for j in range(r):
                row = [Fraction(0)] * (r * r)
                for b in range(r):
                    row[i * r + b] += phi[b][j]
                for a in range(r):
                    row[a * r + j] -= phi[i][a]
                rows.append(tuple(row))
    commutant = nullspace(tuple(rows)) if rows else [
        tuple(Fraction(1) if t == s else Fraction(0) for t in range(r * r))
        for s in range(r * r)
    ]
    lowering = []
    for (a, b) in _lie_upper_positions(flag):
        v = [Fraction(0)] * (r * r)
        v[a * r + b] = Fraction(1)
        lowering.append(tuple(v))
    if not lowering or not commutant:
        return 0
    stacked = tuple(commutant) + tuple(lowering)
    dim_sum_space = rank(stacked)
    return len(commutant) + len(lowering) - dim_sum_space


@dataclass(frozen=True)
class LoweringComparison:
    """Exploratory comparison of lowering commutants before and after grading."""

    full_dim: int
    graded_dim: int
    equal: bool
    coupling_vanishes: bool


def lowering_dim_comparison(flag: FlagShape, phis) -> LoweringComparison:
    """Compare the lowering commutant of the matrices with that of their graded parts.

    The naive matrix-level analogue of the bundle statement fails in general;
    ``coupling_vanishes`` records whether every strictly lower block of every
    matrix is zero, the restricted family on which agreement is asserted.
    """
    mats = [mat(phi) for phi in phis]
    graded = [_block_filter(phi, flag.cuts, flag.cuts) for phi in mats]
    coupling = True
    for phi in mats:
        for a in range(flag.total):
            for b in range(flag.total):
                if flag.block_of(a + 1) > flag.block_of(b + 1) and phi[a][b] != 0:
                    coupling = False
    full = nilpotent_commutant_dim(flag, mats)
    part = nilpotent_commutant_dim(flag, graded)
    return LoweringComparison(full, part, full == part, coupling)


@dataclass(frozen=True)
class StabDimRetractionReport:
    """Empirical check of stabiliser-dimension invariance under retraction."""

    dim_before: int
    dim_after: int
    equal: bool


def stabdim_retraction_report(
    p: ModelPoint, beta: BetaVector, flag: FlagShape, ctx: CurveContext
) -> StabDimRetractionReport:
    before = unipotent_stabilizer_dim(p, flag, ctx)
    after = unipotent_stabilizer_dim(retract_p_beta(p, beta, ctx), flag, ctx)
    return StabDimRetractionReport(before, after, before == after)
