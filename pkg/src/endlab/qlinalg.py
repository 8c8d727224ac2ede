"""Exact sparse linear algebra over the rationals.

Scalars are fractions.Fraction (always reduced, exact).  Rank, kernel and
cokernel dimensions come from fraction-free elimination over the integers:
each row is scaled by the lcm of its denominators, then rows are combined
with integer cross-multiplication and divided by their content.  Entries of
the incidence matrices this package produces are 0 or +-1, so elimination
never grows coefficients there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm


@dataclass(frozen=True)
class FreeModuleBasis:
    """Ordered labels for the coordinates of a free module."""

    labels: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    def __len__(self):
        return len(self.labels)

    def index(self, label):
        return self.labels.index(label)


class SparseMatrixQ:
    """rows x cols matrix storing only nonzero Fraction entries."""

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry ({i},{j}) outside {rows}x{cols}")
            x = Fraction(x)
            if x:
                self.entries[(i, j)] = x

    @classmethod
    def from_rows(cls, dense):
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = {
            (i, j): Fraction(x)
            for i, row in enumerate(dense)
            for j, x in enumerate(row)
            if x
        }
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    def __getitem__(self, key):
        return self.entries.get(key, Fraction(0))

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrixQ)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def is_zero(self):
        return not self.entries

    def mul_vec(self, vec):
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [Fraction(0)] * self.rows
        for (i, j), x in self.entries.items():
            out[i] += x * vec[j]
        return out

    def matmul(self, other):
        """self @ other."""
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        by_row = {}
        for (i, j), x in other.entries.items():
            by_row.setdefault(i, []).append((j, x))
        entries = {}
        for (i, k), x in self.entries.items():
            for j, y in by_row.get(k, ()):
                key = (i, j)
                entries[key] = entries.get(key, Fraction(0)) + x * y
        return SparseMatrixQ(self.rows, other.cols, entries)

    def _integer_rows(self):
        # one dict per row, scaled to integers; scaling does not change rank
        rows = [dict() for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            rows[i][j] = x
        out = []
        for row in rows:
            if not row:
                continue
            scale = lcm(*(x.denominator for x in row.values()))
            out.append({j: int(x * scale) for j, x in row.items()})
        return out

    def rank(self):
        """Rank by fraction-free integer elimination with content removal."""
        rows = self._integer_rows()
        rank = 0
        for col in range(self.cols):
            pivot_idx = None
            for idx in range(rank, len(rows)):
                if rows[idx].get(col):
                    pivot_idx = idx
                    break
            if pivot_idx is None:
                continue
            rows[rank], rows[pivot_idx] = rows[pivot_idx], rows[rank]
            pivot = rows[rank]
            p = pivot[col]
            for idx in range(rank + 1, len(rows)):
                row = rows[idx]
                c = row.get(col)
                if not c:
                    continue
                new = {}
                for j, x in row.items():
                    new[j] = p * x
                for j, x in pivot.items():
                    val = new.get(j, 0) - c * x
                    if val:
                        new[j] = val
                    else:
                        new.pop(j, None)
                if new:
                    content = 0
                    for x in new.values():
                        content = gcd(content, x)
                    if content > 1:
                        new = {j: x // content for j, x in new.items()}
                rows[idx] = new
            rank += 1
            if rank == len(rows):
                break
        return rank

    def to_json(self):
        triplets = [
            [i, j, str(x)] for (i, j), x in sorted(self.entries.items())
        ]
        return {"rows": self.rows, "cols": self.cols, "entries": triplets}

    def __repr__(self):
        return f"SparseMatrixQ({self.rows}x{self.cols}, {len(self.entries)} nonzero)"


def rank_kernel_cokernel(m):
    """(rank, dim ker, dim coker) of a finite matrix, exactly."""
    r = m.rank()
    return r, m.cols - r, m.rows - r


def delta_matrix(graph):
    """Boundary map from geometric edges to vertices.

    Columns follow the sorted canonical representatives, rows the graph's
    vertex order.  The column of edge e carries +1 at its terminus and -1
    at its origin; a loop contributes a zero column.
    """
    reps = [ge.rep for ge in graph.geometric_edges()]
    entries = {}
    for j, e in enumerate(reps):
        o = graph.vertex_index(graph.origin(e))
        t = graph.vertex_index(graph.terminus(e))
        if o == t:
            continue
        entries[(t, j)] = Fraction(1)
        entries[(o, j)] = Fraction(-1)
    return SparseMatrixQ(len(graph.vertices), len(reps), entries)


def vertex_basis(graph):
    return FreeModuleBasis(tuple(graph.vertices))


def geometric_edge_basis(graph):
    return FreeModuleBasis(tuple(ge.rep for ge in graph.geometric_edges()))


def augmentation_matrix(n):
    """The 1 x n all-ones map onto the scalars."""
    return SparseMatrixQ(1, n, {(0, j): Fraction(1) for j in range(n)})


def verify_short_exact(a, b):
    """True iff 0 -> . -a-> . -b-> . -> 0 is exact.

    Checks b @ a = 0, a injective, b surjective and rank a + rank b equal
    to the middle dimension; together these force image(a) = kernel(b).
    """
    if b.cols != a.rows:
        raise ValueError(f"maps do not compose: a is {a.rows}x{a.cols}, b is {b.rows}x{b.cols}")
    if not b.matmul(a).is_zero():
        return False
    ra, rb = a.rank(), b.rank()
    return ra == a.cols and rb == b.rows and ra + rb == b.cols


def solve(m, rhs):
    """One exact solution of m x = rhs, or None if inconsistent.

    Plain Fraction elimination; used to cross-check that elimination and
    back-substitution reproduce the matrix action exactly.
    """
    if len(rhs) != m.rows:
        raise ValueError("rhs length mismatch")
    dense = [[m[(i, j)] for j in range(m.cols)] for i in range(m.rows)]
    t = [Fraction(x) for x in rhs]
    piv_cols = []
    piv_r = 0
    for col in range(m.cols):
        found = None
        for i in range(piv_r, m.rows):
            if dense[i][col]:
                found = i
                break
        if found is None:
            continue
        dense[piv_r], dense[found] = dense[found], dense[piv_r]
        t[piv_r], t[found] = t[found], t[piv_r]
        p = dense[piv_r][col]
        for i in range(m.rows):
            if i == piv_r or not dense[i][col]:
                continue
            f = dense[i][col] / p
            for j in range(col, m.cols):
                dense[i][j] -= f * dense[piv_r][j]
            t[i] -= f * t[piv_r]
        piv_cols.append(col)
        piv_r += 1
    for i in range(piv_r, m.rows):
        if t[i]:
            return None
    sol = [Fraction(0)] * m.cols
    for r, col in enumerate(piv_cols):
        s = t[r]
        for j in range(col + 1, m.cols):
            s -= dense[r][j] * sol[j]
        sol[col] = s / dense[r][col]
    return sol
