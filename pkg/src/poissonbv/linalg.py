"""Sparse matrices over the rationals with exact Gaussian elimination."""

from __future__ import annotations

from fractions import Fraction


class RationalMatrix:
    """rows x cols matrix stored as a list of sparse row dicts."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data=None):
        self.rows = rows
        self.cols = cols
        if data is None:
            data = [dict() for _ in range(rows)]
        self.data = [{j: Fraction(v) for j, v in r.items() if v} for r in data]

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, [{j: v for j, v in enumerate(r) if v} for r in rows])

    @classmethod
    def diagonal(cls, values):
        values = list(values)
        return cls(len(values), len(values), [{i: v} for i, v in enumerate(values)])

    def to_dense(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for i, r in enumerate(self.data):
            for j, v in r.items():
                out[i][j] = v
        return out

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i].get(j, Fraction(0))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def transpose(self):
        data = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self.data):
            for j, v in r.items():
                data[j][i] = v
        return RationalMatrix(self.cols, self.rows, data)

    T = property(transpose)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self.data:
            acc = {}
            for k, v in r.items():
                for j, w in other.data[k].items():
                    acc[j] = acc.get(j, 0) + v * w
            out.append({j: v for j, v in acc.items() if v})
        return RationalMatrix(self.rows, other.cols, out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        out = []
        for a, b in zip(self.data, other.data):
            r = dict(a)
            for j, v in b.items():
                r[j] = r.get(j, 0) + v
            out.append(r)
        return RationalMatrix(self.rows, self.cols, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return RationalMatrix(self.rows, self.cols, [{j: c * v for j, v in r.items()} for r in self.data])

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def is_zero(self):
        return not any(self.data)

    def nonzero_entries(self):
        for i, r in enumerate(self.data):
            for j in sorted(r):
                yield i, j, r[j]

    def apply(self, vec):
        """Matrix times column vector (a list of Fractions)."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        nz = {j: x for j, x in enumerate(vec) if x}
        if not nz:
            return [Fraction(0)] * self.rows
        return [sum((v * nz[j] for j, v in r.items() if j in nz), Fraction(0)) for r in self.data]

    def column(self, j):
        return [r.get(j, Fraction(0)) for r in self.data]

    def columns(self, idx):
        idx = list(idx)
        pos = {j: k for k, j in enumerate(idx)}
        return RationalMatrix(
            self.rows, len(idx), [{pos[j]: v for j, v in r.items() if j in pos} for r in self.data]
        )

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        out = []
        for a, b in zip(self.data, other.data):
            r = dict(a)
            r.update({self.cols + j: v for j, v in b.items()})
            out.append(r)
        return RationalMatrix(self.rows, self.cols + other.cols, out)

    # --- elimination ------------------------------------------------------

    def rref(self):
        """Reduced row echelon form.  Returns (rows, pivot_columns)."""
        rows = [dict(r) for r in self.data if r]
        pivots = []
        reduced = []
        for col in range(self.cols):
            pick = None
            for k, r in enumerate(rows):
                if col in r:
                    # prefer short rows to limit fill-in
                    if pick is None or len(r) < len(rows[pick]):
                        pick = k
            if pick is None:
                continue
            prow = rows.pop(pick)
            inv = 1 / prow[col]
            prow = {j: v * inv for j, v in prow.items()}
            for r in rows:
                f = r.get(col)
                if f:
                    for j, v in prow.items():
                        x = r.get(j, 0) - f * v
                        if x:
                            r[j] = x
                        else:
                            r.pop(j, None)
            rows = [r for r in rows if r]
            for r in reduced:
                f = r.get(col)
                if f:
                    for j, v in prow.items():
                        x = r.get(j, 0) - f * v
                        if x:
                            r[j] = x
                        else:
                            r.pop(j, None)
            reduced.append(prow)
            pivots.append(col)
            if not rows:
                break
        return reduced, pivots

    def rank(self):
        return len(self.rref()[1])

    def nullspace(self):
        """Basis of the kernel, one vector per free column, in column order."""
        reduced, pivots = self.rref()
        pivset = set(pivots)
        basis = []
        for free in range(self.cols):
            if free in pivset:
                continue
            v = [Fraction(0)] * self.cols
            v[free] = Fraction(1)
            for r, p in zip(reduced, pivots):
                c = r.get(free)
                if c:
                    v[p] = -c
            basis.append(v)
        return basis

    def column_space(self):
        """Pivot columns of the original matrix (a basis of the image)."""
        _, pivots = self.rref()
        return [self.column(j) for j in pivots]

    def solve(self, b):
        """One exact solution x of self @ x = b, or None."""
        aug = self.hstack(RationalMatrix(self.rows, 1, [{0: v} if v else {} for v in b]))
        reduced, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [Fraction(0)] * self.cols
        for r, p in zip(reduced, pivots):
            x[p] = r.get(self.cols, Fraction(0))
        return x

    def inverse(self):
        if self.rows != self.cols:
            raise ValueError("not square")
        n = self.rows
        aug = self.hstack(RationalMatrix.identity(n))
        reduced, pivots = aug.rref()
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise ZeroDivisionError("matrix is singular")
        return RationalMatrix(n, n, [{j - n: v for j, v in r.items() if j >= n} for r in reduced[:n]])

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={sum(map(len, self.data))})"

    def __str__(self):
        dense = self.to_dense()
        cells = [[str(v) if v else "." for v in r] for r in dense]
        w = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[" + " ".join(c.rjust(w) for c in r) + "]" for r in cells)


def matrix_from_columns(nrows, columns):
    data = [dict() for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            if v:
                data[i][j] = v
    return RationalMatrix(nrows, len(columns), data)


class SubspaceCoordinates:
    """Coordinates of vectors in the span of independent columns.

    Given independent columns Q = [h_1..h_r | b_1..b_s], ``coordinates(z)``
    returns the h-part of the unique c with Q c = z, or raises ValueError when
    z is not in the span.
    """

    def __init__(self, nrows, head, tail):
        self.nrows = nrows
        self.r = len(head)
        cols = list(head) + list(tail)
        self.q = matrix_from_columns(nrows, cols)
        k = len(cols)
        # pick k independent rows
        _, rows = self.q.transpose().rref()
        self.pivot_rows = rows
        if len(rows) != k:
            raise ValueError("columns are not independent")
        square = RationalMatrix(k, k, [dict(self.q.data[i]) for i in rows])
        self.inv = square.inverse() if k else RationalMatrix(0, 0)

    def solve(self, z):
        zp = [z[i] for i in self.pivot_rows]
        c = self.inv.apply(zp) if self.inv.rows else []
        if self.q.apply(c) != list(z):
            raise ValueError("vector is not in the span")
        return c

    def coordinates(self, z):
        return self.solve(z)[: self.r]


class Echelon:
    """Incrementally maintained echelon basis of a span of vectors."""

    def __init__(self, size):
        self.size = size
        self.rows = {}  # pivot -> normalized sparse vector with 1 at pivot

    def reduce(self, vec):
        v = {j: Fraction(x) for j, x in enumerate(vec) if x}
        for p in sorted(self.rows):
            c = v.get(p)
            if c:
                for j, x in self.rows[p].items():
                    y = v.get(j, 0) - c * x
                    if y:
                        v[j] = y
                    else:
                        v.pop(j, None)
        return v

    def add(self, vec):
        """Insert vec; returns False when it already lies in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = 1 / v[p]
        v = {j: x * inv for j, x in v.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                for j, x in v.items():
                    y = row.get(j, 0) - c * x
                    if y:
                        row[j] = y
                    else:
                        row.pop(j, None)
        self.rows[p] = v
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    def __len__(self):
        return len(self.rows)
