"""Exact integer matrix algebra: HNF, SNF, lattice membership and kernels.

Everything here works over arbitrary-precision Python ints.  The global
convention is that elements are ROW vectors and matrices act by right
multiplication, so "the lattice spanned by M" always means the span of
the rows of M.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


@dataclass(frozen=True)
class IntMatrix:
    """An immutable integer matrix stored as a tuple of row tuples."""

    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        widths = {len(row) for row in self.data}
        if len(widths) > 1:
            raise ValueError("ragged rows")

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        if not rows and cols is not None:
            # keep an explicit width for empty matrices
            return cls._empty(cols)
        return cls(rows)

    @classmethod
    def _empty(cls, cols: int) -> "IntMatrix":
        m = cls(())
        object.__setattr__(m, "_cols", cols)
        return m

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(tuple((0,) * cols for _ in range(rows)))

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        if self.data:
            return len(self.data[0])
        return getattr(self, "_cols", 0)

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = other.cols
        out = []
        for r in self.data:
            acc = [0] * ocols
            for k, x in enumerate(r):
                if x:
                    orow = other.data[k]
                    for j in range(ocols):
                        acc[j] += x * orow[j]
            out.append(tuple(acc))
        return IntMatrix.from_rows(out, cols=ocols)

    def stack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows and other.rows and self.cols != other.cols:
            raise ValueError("column count mismatch in stack")
        cols = self.cols if self.rows else other.cols
        return IntMatrix.from_rows(self.data + other.data, cols=cols)


def vec_mat(v: tuple[int, ...], m: IntMatrix) -> tuple[int, ...]:
    """Row vector times matrix."""
    if len(v) != m.rows:
        raise ValueError("length mismatch")
    acc = [0] * m.cols
    for k, x in enumerate(v):
        if x:
            row = m.data[k]
            for j in range(m.cols):
                acc[j] += x * row[j]
    return tuple(acc)


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row HNF of m.

    Returns (H, U) with U unimodular, U @ m == H, H in row echelon form
    with positive pivots and the entries above each pivot reduced into
    [0, pivot).  Zero rows are collected at the bottom.
    """
    r, c = m.rows, m.cols
    h = [list(row) for row in m.data]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    piv_row = 0
    pivots = []  # (row, col)
    for col in range(c):
        # gcd elimination below piv_row in this column
        while True:
            nz = [i for i in range(piv_row, r) if h[i][col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(h[i][col]))
            i0 = nz[0]
            for i in nz[1:]:
                q = h[i][col] // h[i0][col]
                for j in range(c):
                    h[i][j] -= q * h[i0][j]
                for j in range(r):
                    u[i][j] -= q * u[i0][j]
        nz = [i for i in range(piv_row, r) if h[i][col]]
        if not nz:
            continue
        i0 = nz[0]
        if i0 != piv_row:
            h[i0], h[piv_row] = h[piv_row], h[i0]
            u[i0], u[piv_row] = u[piv_row], u[i0]
        if h[piv_row][col] < 0:
            h[piv_row] = [-x for x in h[piv_row]]
            u[piv_row] = [-x for x in u[piv_row]]
        p = h[piv_row][col]
        for i in range(piv_row):
            q = h[i][col] // p  # floor division puts entry into [0, p)
            if q:
                for j in range(c):
                    h[i][j] -= q * h[piv_row][j]
                for j in range(r):
                    u[i][j] -= q * u[piv_row][j]
        pivots.append((piv_row, col))
        piv_row += 1
        if piv_row == r:
            break
    return (IntMatrix.from_rows(h, cols=c), IntMatrix.from_rows(u, cols=r))


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form.

    Returns (S, U, V) with U (rows x rows) and V (cols x cols) unimodular,
    U @ m @ V == S, S diagonal with nonnegative d_i and d_i | d_{i+1}.
    """
    r, c = m.rows, m.cols
    s = [list(row) for row in m.data]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        for j in range(c):
            s[dst][j] += q * s[src][j]
        for j in range(r):
            u[dst][j] += q * u[src][j]

    def add_col(dst, src, q):
        for row in s:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    n = min(r, c)
    t = 0
    while t < n:
        # find a nonzero entry in the remaining block
        pos = None
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if s[i][j] and (best is None or abs(s[i][j]) < best):
                    best = abs(s[i][j])
                    pos = (i, j)
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])
        # clear row and column t
        while True:
            dirty = False
            for i in range(t + 1, r):
                if s[i][t]:
                    q = s[i][t] // s[t][t]
                    add_row(i, t, -q)
                    if s[i][t]:
                        swap_rows(t, i)
                    dirty = True
            for j in range(t + 1, c):
                if s[t][j]:
                    q = s[t][j] // s[t][t]
                    add_col(j, t, -q)
                    if s[t][j]:
                        swap_cols(t, j)
                    dirty = True
            if not dirty:
                break
        if s[t][t] < 0:
            for j in range(c):
                s[t][j] = -s[t][j]
            for j in range(r):
                u[t][j] = -u[t][j]
        t += 1
    # enforce the divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(min(r, c) - 1):
            a, b = s[i][i], s[i + 1][i + 1]
            if a and b % a != 0:
                add_col(i, i + 1, 1)  # brings b into column i
                # re-clear the 2x2 block
                while s[i + 1][i]:
                    q = s[i + 1][i] // s[i][i] if s[i][i] else 0
                    if s[i][i]:
                        add_row(i + 1, i, -q)
                    if s[i + 1][i]:
                        swap_rows(i, i + 1)
                while s[i][i + 1]:
                    q = s[i][i + 1] // s[i][i]
                    add_col(i + 1, i, -q)
                if s[i][i] < 0:
                    for j in range(c):
                        s[i][j] = -s[i][j]
                    for j in range(r):
                        u[i][j] = -u[i][j]
                if s[i + 1][i + 1] < 0:
                    for j in range(c):
                        s[i + 1][j] = -s[i + 1][j]
                    for j in range(r):
                        u[i + 1][j] = -u[i + 1][j]
                changed = True
    return (IntMatrix.from_rows(s, cols=c), IntMatrix.from_rows(u, cols=r), IntMatrix.from_rows(v, cols=c))


def _solve_row_system(m: IntMatrix, t: tuple[int, ...]) -> tuple[int, ...] | None:
    """Solve x @ m == t over the integers; None when t is outside rowspace(m)."""
    h, u = hermite_normal_form(m)
    rem = list(t)
    coeff = [0] * m.rows
    for i in range(h.rows):
        row = h.data[i]
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            continue
        if rem[piv] % row[piv] != 0:
            return None
        q = rem[piv] // row[piv]
        coeff[i] = q
        if q:
            for j in range(len(rem)):
                rem[j] -= q * row[j]
    if any(rem):
        return None
    return vec_mat(tuple(coeff), u)


def solve_mod_lattice(
    a: IntMatrix, t: tuple[int, ...], lat: IntMatrix
) -> tuple[int, ...] | None:
    """Find an integer row vector e with e @ a congruent to t modulo rowspace(lat).

    Returns None exactly when no solution exists.
    """
    stacked = a.stack(lat)
    if stacked.rows == 0:
        return (0,) * a.rows if not any(t) else None
    if len(t) != stacked.cols:
        raise ValueError("target length mismatch")
    x = _solve_row_system(stacked, t)
    if x is None:
        return None
    return x[: a.rows]


def kernel_mod_lattice(a: IntMatrix, lat: IntMatrix) -> IntMatrix:
    """Basis (as HNF rows) of {e in Z^r : e @ a in rowspace(lat)}."""
    r = a.rows
    if r == 0:
        return IntMatrix.from_rows([], cols=0)
    stacked = a.stack(lat)
    h, u = hermite_normal_form(stacked)
    gens = []
    for i in range(h.rows):
        if not any(h.data[i]):
            gens.append(u.data[i][:r])
    if a.cols == 0:
        # everything lands in the trivial lattice
        return IntMatrix.identity(r)
    basis, _ = hermite_normal_form(IntMatrix.from_rows(gens, cols=r))
    rows = [row for row in basis.data if any(row)]
    return IntMatrix.from_rows(rows, cols=r)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y == g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


__all__ = [
    "IntMatrix",
    "hermite_normal_form",
    "smith_normal_form",
    "solve_mod_lattice",
    "kernel_mod_lattice",
    "ext_gcd",
    "vec_mat",
]


@dataclass(frozen=True)
class AbelianStructure:
    """A direct-product-of-cyclics coordinate frame: one relative order per
    coordinate (>= 2, or None for an infinite cyclic factor)."""

    orders: tuple[int | None, ...]

    def __post_init__(self):
        for m in self.orders:
            if m is not None and m < 2:
                raise ValueError("cyclic factor orders must be >= 2 or None")

    @property
    def rank(self) -> int:
        return len(self.orders)

    def reduce(self, vec) -> tuple[int, ...]:
        if len(vec) != len(self.orders):
            raise ValueError("coordinate length mismatch")
        return tuple(x % m if m is not None else x for x, m in zip(vec, self.orders))


__all__.append("AbelianStructure")
