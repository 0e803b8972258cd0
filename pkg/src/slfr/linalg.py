"""Dense exact linear algebra over a finite field.

Matrices hold canonical integer encodings (see :mod:`slfr.field`).  Row and
column positions are 0-based; callers working with 1-based user indices map
them before selecting submatrices.  All operations are exact — Gaussian
elimination over a field needs no pivot-size heuristics.
"""

from __future__ import annotations

from .field import FieldSpec


class IndexOutOfRange(IndexError):
    pass


class NotSquare(ValueError):
    pass


class Singular(ValueError):
    pass


class FqMatrix:
    """Immutable dense matrix over GF(q), entries encoded as ints in [0, q)."""

    __slots__ = ("spec", "rows", "cols", "data")

    def __init__(self, spec: FieldSpec, data, cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in data)
        rows = len(data)
        if rows:
            cols = len(data[0])
            if any(len(r) != cols for r in data):
                raise ValueError("ragged rows")
        else:
            cols = 0 if cols is None else cols
        for row in data:
            for x in row:
                if not 0 <= x < spec.q:
                    raise ValueError(f"entry {x} is not a canonical encoding in {spec!r}")
        self.spec = spec
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> "FqMatrix":
        return cls(spec, [[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "FqMatrix":
        return cls(spec, [[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    def __getitem__(self, key):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        if not 0 <= i < self.rows:
            raise IndexOutOfRange(f"row {i} outside {self.rows}x{self.cols}")
        return self.data[i]

    def submatrix(self, row_keys, col_keys) -> "FqMatrix":
        """Select rows/columns by strictly increasing 0-based positions."""
        row_keys = tuple(row_keys)
        col_keys = tuple(col_keys)
        for keys, bound, what in ((row_keys, self.rows, "row"), (col_keys, self.cols, "column")):
            if any(keys[i] >= keys[i + 1] for i in range(len(keys) - 1)):
                raise ValueError(f"{what} keys must be strictly increasing")
            if any(not 0 <= k < bound for k in keys):
                raise IndexOutOfRange(f"{what} keys {keys} outside {self.rows}x{self.cols}")
        return FqMatrix(
            self.spec,
            [[self.data[i][j] for j in col_keys] for i in row_keys],
            cols=len(col_keys),
        )

    def transpose(self) -> "FqMatrix":
        return FqMatrix(
            self.spec,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def to_lists(self) -> list:
        return [list(r) for r in self.data]

    def __eq__(self, other):
        return (
            isinstance(other, FqMatrix)
            and self.spec == other.spec
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.spec, self.rows, self.cols, self.data))

    def __repr__(self):
        return f"FqMatrix({self.spec!r}, {self.rows}x{self.cols})"


def matmul(a: FqMatrix, b: FqMatrix) -> FqMatrix:
    if a.spec != b.spec:
        raise ValueError("mismatched fields")
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    spec = a.spec
    add, mul = spec.add, spec.mul
    out = []
    for i in range(a.rows):
        arow = a.data[i]
        row = []
        for j in range(b.cols):
            acc = 0
            for k in range(a.cols):
                acc = add(acc, mul(arow[k], b.data[k][j]))
            row.append(acc)
        out.append(row)
    return FqMatrix(spec, out, cols=b.cols)


def det(m: FqMatrix) -> int:
    """Determinant by Gaussian elimination; the 0x0 determinant is 1."""
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols}")
    n = m.rows
    if n == 0:
        return 1
    spec = m.spec
    sub, mul, inv = spec.sub, spec.mul, spec.inv
    a = [list(r) for r in m.data]
    result = 1
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot_row is None:
            return 0
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            result = spec.neg(result)
        pivot = a[col][col]
        result = mul(result, pivot)
        pivot_inv = inv(pivot)
        for r in range(col + 1, n):
            factor = a[r][col]
            if factor == 0:
                continue
            scale = mul(factor, pivot_inv)
            arow, prow = a[r], a[col]
            for c in range(col, n):
                arow[c] = sub(arow[c], mul(scale, prow[c]))
    return result


def rank(m: FqMatrix) -> int:
    a = [list(r) for r in m.data]
    _, pivots = _rref(a, m.spec)
    return len(pivots)


def _rref(a, spec: FieldSpec):
    """In-place reduced row echelon form; returns (matrix, pivot columns)."""
    sub, mul, inv = spec.sub, spec.mul, spec.inv
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if a[i][col] != 0), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        scale = inv(a[r][col])
        if scale != 1:
            a[r] = [mul(scale, x) for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][col] != 0:
                factor = a[i][col]
                arow, prow = a[i], a[r]
                for c in range(col, n_cols):
                    arow[c] = sub(arow[c], mul(factor, prow[c]))
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    return a, pivots


def solve_general(rows, rhs, spec: FieldSpec):
    """Solve a (possibly non-square) exact linear system.

    `rows` is a list of coefficient rows over unknowns 0..n-1, `rhs` the
    right-hand sides.  Returns `(solution, nullity)` where the solution sets
    all free variables to zero, or `(None, nullity)` when inconsistent.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return [0] * n, n
    reduced, pivots = _rref(aug, spec)
    if n in pivots:
        return None, n - (len(pivots) - 1)
    solution = [0] * n
    for r, col in enumerate(pivots):
        solution[col] = reduced[r][n]
    return solution, n - len(pivots)


def solve(a: FqMatrix, b: FqMatrix) -> FqMatrix:
    """Solve a·x = b exactly for square invertible `a`."""
    if a.rows != a.cols:
        raise NotSquare(f"{a.rows}x{a.cols}")
    if a.spec != b.spec or b.rows != a.rows:
        raise ValueError("right-hand side incompatible with coefficient matrix")
    n = a.rows
    aug = [list(a.data[i]) + list(b.data[i]) for i in range(n)]
    reduced, pivots = _rref(aug, a.spec)
    if len(pivots) < n or any(p >= n for p in pivots):
        raise Singular("coefficient matrix is singular")
    return FqMatrix(a.spec, [reduced[i][n:] for i in range(n)], cols=b.cols)


def cramer_component(a: FqMatrix, b: FqMatrix, i: int) -> int:
    """Component i of the solution of a·x = b as a determinant ratio."""
    if a.rows != a.cols:
        raise NotSquare(f"{a.rows}x{a.cols}")
    if b.cols != 1 or b.rows != a.rows:
        raise ValueError("b must be a column vector matching a")
    if not 0 <= i < a.cols:
        raise IndexOutOfRange(f"component {i} outside 0..{a.cols - 1}")
    denom = det(a)
    if denom == 0:
        raise Singular("coefficient matrix is singular")
    replaced = [
        [b.data[r][0] if c == i else a.data[r][c] for c in range(a.cols)]
        for r in range(a.rows)
    ]
    return a.spec.div(det(FqMatrix(a.spec, replaced, cols=a.cols)), denom)
