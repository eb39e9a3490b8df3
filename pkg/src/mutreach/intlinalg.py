"""Exact integer matrix kernel: determinant, comatrix, Hermite normal form.

Everything is arbitrary-precision.  The Hermite normal form is computed
by unimodular column operations with immediate reduction of the already
processed columns, which keeps entries small at the scales used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratlp import FEASIBLE, positive_circulation, solve_standard


class LinalgError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]  # row-major

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise LinalgError("negative matrix shape")
        if len(self.entries) != self.rows * self.cols:
            raise LinalgError("entry count does not match shape")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise LinalgError("ragged rows")
            flat.extend(int(x) for x in row)
        return cls(r, c, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.at(i, j) for i in range(self.rows))

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols, self.rows, tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows))
        )

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise LinalgError("shape mismatch in matmul")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[t] * other.at(t, j) for t in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def max_abs(self) -> int:
        return max((abs(e) for e in self.entries), default=0)


def determinant(m: IntMatrix) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    if not m.is_square:
        raise LinalgError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = m.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def comatrix(m: IntMatrix) -> IntMatrix:
    """Matrix with entry (i, j) the determinant of m with column j
    replaced by the i-th unit vector; satisfies m^T com(m) = det(m) I."""
    if not m.is_square:
        raise LinalgError("comatrix of a non-square matrix")
    n = m.rows
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = []
            for r in range(n):
                if r == i:
                    continue
                sub.append([m.at(r, c) for c in range(n) if c != j])
            minor = determinant(IntMatrix.from_rows(sub)) if n > 1 else 1
            out[i][j] = (-1) ** (i + j) * minor
    return IntMatrix.from_rows(out)


def rank_profile(m: IntMatrix) -> tuple[int, list[int], list[int]]:
    """Rank plus pivot rows and pivot columns.

    Rows are kept greedily in input order (so a full-row-rank matrix is
    its own pivot block and the Hermite form below is canonical for the
    given row order); pivot columns are then chosen greedily left to
    right over the kept rows.
    """
    kept: list[tuple[int, list[Fraction]]] = []  # (row index, reduced row)
    for i in range(m.rows):
        row = [Fraction(x) for x in m.row(i)]
        for _, prow in kept:
            lead = next((j for j in range(m.cols) if prow[j] != 0), None)
            if lead is not None and row[lead] != 0:
                f = row[lead] / prow[lead]
                row = [x - f * y for x, y in zip(row, prow)]
        if any(row):
            kept.append((i, row))
    pivot_rows = [i for i, _ in kept]

    work = [[Fraction(x) for x in m.row(i)] for i in pivot_rows]
    pivot_cols: list[int] = []
    used = [False] * len(work)
    for j in range(m.cols):
        pick = next((i for i in range(len(work)) if not used[i] and work[i][j] != 0), None)
        if pick is None:
            continue
        used[pick] = True
        pivot_cols.append(j)
        inv = Fraction(1) / work[pick][j]
        work[pick] = [x * inv for x in work[pick]]
        for i in range(len(work)):
            if i != pick and work[i][j] != 0:
                f = work[i][j]
                work[i] = [x - f * y for x, y in zip(work[i], work[pick])]
    return len(pivot_rows), pivot_rows, pivot_cols


@dataclass(frozen=True)
class HnfResult:
    """M[row_perm] @ U == [H | 0] with U unimodular and H lower triangular,
    non-negative, each row's unique maximum on the diagonal."""

    h: IntMatrix
    u: IntMatrix
    rank: int
    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


def hermite_normal_form(m: IntMatrix) -> HnfResult:
    """Column-style HNF with explicit unimodular multiplier.

    Rank-deficient input is handled by selecting independent rows first;
    the zero matrix yields a rank-0 result with an empty H.
    """
    rank, pivot_rows, pivot_cols = rank_profile(m)
    rest_rows = [i for i in range(m.rows) if i not in pivot_rows]
    rest_cols = [j for j in range(m.cols) if j not in pivot_cols]
    row_perm = tuple(pivot_rows + rest_rows)
    col_perm = tuple(pivot_cols + rest_cols)
    k = m.cols
    if rank == 0:
        return HnfResult(IntMatrix(0, 0, ()), IntMatrix.identity(k), 0, row_perm, col_perm)

    w = [[m.at(i, j) for j in range(k)] for i in pivot_rows]
    u = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def col_op_2(c1: int, c2: int, a: int, b: int, c: int, d: int):
        # (col c1, col c2) <- (a*c1 + b*c2, c*c1 + d*c2); ad - bc = +-1
        for row in w:
            x, y = row[c1], row[c2]
            row[c1], row[c2] = a * x + b * y, c * x + d * y
        for row in u:
            x, y = row[c1], row[c2]
            row[c1], row[c2] = a * x + b * y, c * x + d * y

    def negate_col(c: int):
        for row in w:
            row[c] = -row[c]
        for row in u:
            row[c] = -row[c]

    for r in range(rank):
        for j in range(r + 1, k):
            if w[r][j] == 0:
                continue
            if w[r][r] == 0:
                col_op_2(r, j, 0, 1, -1, 0)
                continue
            g, s, t = _xgcd(w[r][r], w[r][j])
            col_op_2(r, j, s, t, -(w[r][j] // g), w[r][r] // g)
        if w[r][r] == 0:
            raise LinalgError("internal: missing pivot on full-row-rank block")
        if w[r][r] < 0:
            negate_col(r)
        # reduce the already-fixed columns so 0 <= w[r][j] < w[r][r] for j < r
        for j in range(r):
            q = w[r][j] // w[r][r]
            if q:
                for row in w:
                    row[j] -= q * row[r]
                for row in u:
                    row[j] -= q * row[r]

    h = IntMatrix.from_rows([row[:rank] for row in w])
    return HnfResult(h, IntMatrix.from_rows(u), rank, row_perm, col_perm)


def solve_integer(m: IntMatrix, target: Sequence[int]) -> list[int] | None:
    """An integer solution x of M x = target, or None if none exists."""
    if len(target) != m.rows:
        raise LinalgError("target length does not match row count")
    res = hermite_normal_form(m)
    if res.rank == 0:
        return [0] * m.cols if all(t == 0 for t in target) else None
    # Back-substitute on the pivot rows: H w = target[pivot rows].
    h = res.h
    w: list[int] = []
    for i in range(res.rank):
        acc = target[res.row_perm[i]] - sum(h.at(i, j) * w[j] for j in range(i))
        if acc % h.at(i, i) != 0:
            return None
        w.append(acc // h.at(i, i))
    w += [0] * (m.cols - res.rank)
    x = [sum(res.u.at(i, j) * w[j] for j in range(m.cols)) for i in range(m.cols)]
    # Non-pivot rows must agree as well.
    for i in range(m.rows):
        if sum(m.at(i, j) * x[j] for j in range(m.cols)) != target[i]:
            return None
    return x


def kernel_basis(m: IntMatrix) -> list[list[int]]:
    """Basis of the integer kernel of M, as column vectors."""
    res = hermite_normal_form(m)
    return [[res.u.at(i, j) for i in range(m.cols)] for j in range(res.rank, m.cols)]


def rational_lp_feasible(
    equalities: Sequence[tuple[Sequence, object]],
    num_vars: int,
) -> tuple[bool, list[Fraction] | None]:
    """Feasibility of { A f = b, f > 0 } over the rationals.

    The systems fed here are homogeneous (b = 0), so strict positivity is
    solved as f >= 1; the witness returned is exact and strictly positive.
    """
    rows = []
    for coeffs, rhs in equalities:
        if Fraction(rhs) != 0:
            raise LinalgError("only homogeneous systems are supported")
        row = [Fraction(c) for c in coeffs]
        if len(row) != num_vars:
            raise LinalgError("coefficient row has wrong length")
        rows.append(row)
    witness = positive_circulation(rows, num_vars)
    if witness is None:
        return False, None
    return True, witness


def feasible_with_epsilon(
    equalities: Sequence[Sequence],
    num_vars: int,
) -> Fraction | None:
    """Best epsilon in (0, 1] with A f = 0 and f >= epsilon, or None.

    Cross-check route for the f >= 1 homogenization: by scaling, a
    positive epsilon exists exactly when f >= 1 is feasible.
    """
    if num_vars == 0:
        return Fraction(1)
    # Variables: f (num_vars), eps, slack per f_j - eps >= 0, slack for eps <= 1.
    total = num_vars + 1 + num_vars + 1
    rows: list[list[Fraction]] = []
    b: list[Fraction] = []
    for coeffs in equalities:
        rows.append([Fraction(c) for c in coeffs] + [Fraction(0)] * (total - num_vars))
        b.append(Fraction(0))
    for j in range(num_vars):
        row = [Fraction(0)] * total
        row[j] = Fraction(1)
        row[num_vars] = Fraction(-1)
        row[num_vars + 1 + j] = Fraction(-1)
        rows.append(row)
        b.append(Fraction(0))
    row = [Fraction(0)] * total
    row[num_vars] = Fraction(1)
    row[total - 1] = Fraction(1)
    rows.append(row)
    b.append(Fraction(1))
    objective = [Fraction(0)] * total
    objective[num_vars] = Fraction(1)
    status, x, value = solve_standard(rows, b, objective, maximize=True)
    if status != FEASIBLE or value is None or value <= 0:
        return None
    return value
