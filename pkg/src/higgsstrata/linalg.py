"""Exact linear algebra over the rationals (and over dual numbers).

Matrices are tuples of tuples of ``Fraction``; vectors are tuples.  Everything
here is exact: no floating point, no tolerances.  The determinant and adjugate
work over any commutative ring whose elements support ``+``, ``-``, ``*`` and
truthiness at zero, which is what the first-order (dual-number) coordinate
differentiation in ``point_model`` relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[tuple[Fraction, ...], ...]


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4' and {'num','den'} dicts to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, dict):
        return Fraction(int(x["num"]), int(x["den"]))
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted; pass a rational")
    return Fraction(x)


def vec(entries) -> Vec:
    return tuple(frac(e) for e in entries)


def mat(rows) -> Mat:
    m = tuple(tuple(frac(e) for e in row) for row in rows)
    if m and any(len(row) != len(m[0]) for row in m):
        raise ValueError("ragged matrix")
    return m


def zeros(n: int, m: int) -> Mat:
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def identity(n: int) -> Mat:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a)) if a else ()


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Mat, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    return sum(x * y for x, y in zip(u, v))


def det(a) -> object:
    """Determinant by Laplace expansion with memoised minors.

    Works over any commutative ring; the empty matrix has determinant one.
    Intended for the small (<= 6 x 6) matrices this package manipulates.
    """
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    memo: dict[tuple[int, ...], object] = {}

    def minor(cols: tuple[int, ...]):
        if len(cols) == 1:
            return a[n - 1][cols[0]]
        got = memo.get(cols)
        if got is not None:
            return got
        row = n - len(cols)
        total = None
        for pos, c in enumerate(cols):
            entry = a[row][c]
            if not entry:
                continue
            sub = minor(cols[:pos] + cols[pos + 1:])
            term = entry * sub if pos % 2 == 0 else -(entry * sub)
            total = term if total is None else total + term
        if total is None:
            total = a[0][0] - a[0][0]  # ring zero
        memo[cols] = total
        return total

    return minor(tuple(range(n)))


def adjugate(a) -> tuple:
    """Adjugate matrix: adj(a) @ a = det(a) * I, valid also when det(a) = 0."""
    n = len(a)
    if n == 0:
        return ()
    if n == 1:
        one = Dual.lift(1) if isinstance(a[0][0], Dual) else Fraction(1)
        return ((one,),)
    rows = range(n)

    def strike(i: int, j: int):
        return tuple(
            tuple(a[r][c] for c in rows if c != j) for r in rows if r != i
        )

    # adj[i][j] is the (j, i) cofactor.
    return tuple(
        tuple(
            det(strike(j, i)) if (i + j) % 2 == 0 else -det(strike(j, i))
            for j in rows
        )
        for i in rows
    )


def _echelon(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot column list)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref(a: Mat) -> tuple[Mat, tuple[int, ...]]:
    rows = [list(row) for row in a]
    rows, pivots = _echelon(rows)
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(a: Mat) -> int:
    return len(rref(a)[1])


def nullspace(a: Mat) -> list[Vec]:
    """Basis of the right kernel of a."""
    if not a:
        return []
    ncols = len(a[0])
    red, pivots = rref(a)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(tuple(v))
    return basis


def solve_unique(a: Mat, b: Sequence[Fraction]) -> Vec | None:
    """Solve a square system; None when the matrix is singular."""
    n = len(a)
    if n == 0:
        return ()
    aug = [list(row) + [frac(x)] for row, x in zip(a, b)]
    red, pivots = _echelon(aug)
    if len(pivots) != n or n in pivots:
        return None
    return tuple(red[i][n] for i in range(n))


def inverse(a: Mat) -> Mat | None:
    n = len(a)
    aug = [list(row) + list(identity(n)[i]) for i, row in enumerate(a)]
    red, pivots = _echelon(aug)
    if list(pivots) != list(range(n)):
        return None
    return tuple(tuple(red[i][n:]) for i in range(n))


class EchelonAccumulator:
    """Incremental row-space tracker for streaming rank computations.

    Rows are fed one at a time; only independent rows are kept, so the memory
    footprint is bounded by the width, not by the stream length.
    """

    def __init__(self, width: int):
        self.width = width
        self._rows: list[list[Fraction]] = []
        self._pivots: list[int] = []

    def add(self, row: Sequence[Fraction]) -> bool:
        work = list(row)
        for r, p in zip(self._rows, self._pivots):
            if work[p] != 0:
                f = work[p]
                work = [x - f * y for x, y in zip(work, r)]
        pivot = next((c for c in range(self.width) if work[c] != 0), None)
        if pivot is None:
            return False
        inv = 1 / work[pivot]
        work = [x * inv for x in work]
        self._rows.append(work)
        self._pivots.append(pivot)
        return True

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def nullity(self) -> int:
        return self.width - len(self._rows)


def adapted_flag_basis(columns: Sequence[Vec], cuts: Sequence[int]) -> tuple[Mat, tuple[int, ...]]:
    """Basis of the target space adapted to the flag spanned by column prefixes.

    ``columns`` are vectors in k^r; the flag step gamma is the span of the
    first ``cuts[gamma]`` columns.  Returns (g, dims) where the columns of g
    are a basis of k^r whose first dims[gamma] vectors span flag step gamma.
    Requires the full column list to span k^r.
    """
    r = len(columns[0]) if columns else 0
    acc = EchelonAccumulator(r)
    basis: list[Vec] = []
    dims: list[int] = []
    start = 0
    for cut in cuts:
        for l in range(start, cut):
            if acc.add(columns[l]):
                basis.append(columns[l])
        dims.append(len(basis))
        start = cut
    if len(basis) != r:
        raise ValueError("columns do not span the target space")
    g = transpose(tuple(basis))
    return g, tuple(dims)


@dataclass(frozen=True)
class Dual:
    """Dual number a + b*eps with eps^2 = 0, over the rationals."""

    a: Fraction
    b: Fraction

    def __add__(self, other: "Dual") -> "Dual":
        return Dual(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Dual") -> "Dual":
        return Dual(self.a - other.a, self.b - other.b)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a * other.a, self.a * other.b + self.b * other.a)
        return Dual(self.a * other, self.b * other)

    __rmul__ = __mul__

    def __radd__(self, other) -> "Dual":
        # other is a plain scalar (sum() seeds with int 0)
        return Dual(self.a + other, self.b)

    def __neg__(self) -> "Dual":
        return Dual(-self.a, -self.b)

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    @staticmethod
    def lift(x: Fraction) -> "Dual":
        return Dual(frac(x), Fraction(0))


def dual_matrix(base: Mat, eps_part: Mat) -> tuple[tuple[Dual, ...], ...]:
    return tuple(
        tuple(Dual(x, y) for x, y in zip(row_a, row_b))
        for row_a, row_b in zip(base, eps_part)
    )
