"""Exact integer and rational linear algebra on plain list-of-list matrices.

Matrices are lists of rows of Python ints (or Fractions where stated).  Basis
matrices carry their vectors as COLUMNS.  All kernels and complements are
saturated, so quotient torsion downstream is meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DependentInput, InternalInconsistency, NotSubgroup


# --- small matrix helpers ---

def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r, c):
    return [[0] * c for _ in range(r)]


def transpose(m):
    return [list(row) for row in zip(*m)] if m else []


def matmul(a, b):
    if not a or not b:
        return []
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(m, v):
    return [sum(x * y for x, y in zip(row, v)) for row in m]


def columns(m):
    return [list(col) for col in zip(*m)] if m else []


def from_columns(cols, nrows=None):
    if not cols:
        return [[] for _ in range(nrows)] if nrows else []
    return [list(row) for row in zip(*cols)]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


# --- Smith normal form ---

def smith_normal_form(m):
    """Return (U, D, V) with U*M*V = D diagonal, U, V unimodular, and the
    diagonal entries nonnegative with d1 | d2 | ... ."""
    nr = len(m)
    nc = len(m[0]) if nr else 0
    a = [list(row) for row in m]
    u = identity(nr)
    v = identity(nc)

    def row_sub(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_sub(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        # move a least-magnitude nonzero entry of the trailing block to (t, t)
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        if piv[0] != t:
            row_swap(t, piv[0])
        if piv[1] != t:
            col_swap(t, piv[1])
        while True:
            pivot = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // pivot
                    row_sub(i, t, q)
                    if a[i][t]:
                        row_swap(t, i)
                        pivot = a[t][t]
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // pivot
                    col_sub(j, t, q)
                    if a[t][j]:
                        col_swap(t, j)
                        pivot = a[t][t]
                        dirty = True
            if dirty:
                continue
            # enforce divisibility of the trailing block by the pivot
            offender = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % pivot:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_sub(t, offender, -1)  # add offending row to pivot row
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, a, v


def snf_diagonal(d):
    n = min(len(d), len(d[0]) if d else 0)
    return [d[i][i] for i in range(n)]


def rank_int(m):
    if not m or not m[0]:
        return 0
    _, d, _ = smith_normal_form(m)
    return sum(1 for x in snf_diagonal(d) if x)


def det_int(m):
    """Bareiss fraction-free determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# --- Hermite normal form (unique row echelon) ---

def row_hnf(m):
    """Row Hermite normal form: pivots positive, entries above pivots reduced
    to [0, pivot).  Zero rows dropped.  Unique for a given row span."""
    if not m:
        return []
    a = [list(row) for row in m]
    nr, nc = len(a), len(a[0])
    r = 0
    for c in range(nc):
        # clear below position r in column c via Euclid
        while True:
            nz = [i for i in range(r, nr) if a[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[i0] = a[i0], a[r]
            done = True
            for i in range(r + 1, nr):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < nr and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == nr:
                break
    return [row for row in a[:r]]


def same_column_lattice(a_cols, b_cols):
    """Do two column matrices span the same integer lattice?"""
    return row_hnf(transpose(a_cols)) == row_hnf(transpose(b_cols))


# --- kernels, images, saturation, solving ---

def kernel_basis(m, ncols=None):
    """Saturated basis (columns) of the integer kernel of m."""
    if not m or not m[0]:
        n = ncols if ncols is not None else (len(m[0]) if m else 0)
        return identity(n)
    _, d, v = smith_normal_form(m)
    nc = len(m[0])
    diag = snf_diagonal(d)
    keep = [j for j in range(nc) if j >= len(diag) or diag[j] == 0]
    cols = columns(v)
    return from_columns([cols[j] for j in keep], nrows=nc)


def solve_int(m, b):
    """One integer solution x of m x = b, or None."""
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u, d, v = smith_normal_form(m)
    y = mat_vec(u, b)
    diag = snf_diagonal(d)
    z = [0] * nc
    for i in range(nr):
        di = diag[i] if i < len(diag) else 0
        if di:
            if y[i] % di:
                return None
            z[i] = y[i] // di
        elif y[i]:
            return None
    return mat_vec(v, z)


def solve_int_matrix(m, b_cols):
    out = []
    for col in columns(b_cols):
        x = solve_int(m, col)
        if x is None:
            return None
        out.append(x)
    return from_columns(out, nrows=len(m[0]) if m else 0)


def saturate(cols):
    """Saturation of the column span inside the ambient Z^n."""
    if not cols or not cols[0]:
        return cols
    n = len(cols)
    t = kernel_basis(transpose(cols), ncols=n)
    if not t or not t[0]:
        return identity(n)
    return kernel_basis(transpose(t), ncols=n)


def unimodular_inverse(m):
    n = len(m)
    det = det_int(m)
    if det not in (1, -1):
        raise InternalInconsistency("matrix is not unimodular")
    a = [[Fraction(x) for x in row] + [Fraction(int(i == k)) for k in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    out = [[x.numerator for x in row[n:]] for row in a]
    for i, row in enumerate(a):
        for x in row[n:]:
            if x.denominator != 1:
                raise InternalInconsistency("unimodular inverse not integral")
    return out


# --- finitely generated abelian quotients ---

@dataclass(frozen=True)
class FgAbelianGroup:
    rank: int
    torsion: tuple  # invariant factors d1 | d2 | ..., each > 1


class QuotientGroup:
    """Quotient of sublattices span(K)/span(I) of Z^n, with explicit free
    generators (ambient coordinates) and a projection map."""

    def __init__(self, k_cols, i_cols):
        n = len(k_cols)
        nk = len(k_cols[0]) if k_cols and k_cols[0] else 0
        self.ambient_dim = n
        self.k_cols = k_cols
        if nk == 0:
            raise NotSubgroup("empty enclosing lattice")
        x = solve_int_matrix(k_cols, i_cols) if (i_cols and i_cols[0]) else zeros(nk, 0)
        if x is None:
            raise NotSubgroup("second lattice is not contained in the first")
        if x and x[0]:
            u, d, _ = smith_normal_form(x)
            diag = snf_diagonal(d)
        else:
            u, diag = identity(nk), []
        self._u = u
        self._rank_rel = sum(1 for e in diag if e)
        self.torsion = tuple(e for e in diag if e > 1)
        self.rank = nk - self._rank_rel
        uinv = unimodular_inverse(u)
        basis = matmul(k_cols, uinv)  # columns: adapted basis of span(K)
        cols = columns(basis)
        self.free_cols = from_columns(cols[self._rank_rel:], nrows=n)
        self._invariants = diag

    @property
    def group(self):
        return FgAbelianGroup(self.rank, self.torsion)

    def project(self, v):
        """Coordinates of v (ambient, must lie in span(K)) in the quotient:
        (free part tuple, torsion residues tuple)."""
        x = solve_int(self.k_cols, v)
        if x is None:
            raise NotSubgroup("vector not in the enclosing lattice")
        y = mat_vec(self._u, x)
        free = tuple(y[self._rank_rel:])
        tors = tuple(y[i] % e for i, e in enumerate(self._invariants) if e > 1)
        return free, tors


def quotient(k_cols, i_cols):
    q = QuotientGroup(k_cols, i_cols)
    return q.group, q


# --- LLL reduction (all-integer variant) ---

def lll_reduce(basis_cols, delta=Fraction(99, 100)):
    """delta-LLL-reduce the lattice spanned by the columns.

    Integer-only arithmetic throughout; raises DependentInput on linearly
    dependent columns."""
    if not (Fraction(1, 4) < delta < 1):
        raise ValueError("delta must lie in (1/4, 1)")
    b = columns(basis_cols)
    n = len(b)
    if n == 0:
        return basis_cols
    p, q = delta.numerator, delta.denominator

    dd = [1] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            u = dot(b[i], b[j])
            for l in range(j):
                u = (dd[l + 1] * u - lam[i][l] * lam[j][l]) // dd[l]
            if j < i:
                lam[i][j] = u
            else:
                dd[i + 1] = u
        if dd[i + 1] == 0:
            raise DependentInput("columns are linearly dependent")

    def red(k, l):
        if 2 * abs(lam[k][l]) > dd[l + 1]:
            r = (2 * lam[k][l] + dd[l + 1]) // (2 * dd[l + 1])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= r * dd[l + 1]
            for i in range(l):
                lam[k][i] -= r * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lmb = lam[k][k - 1]
        bb = (dd[k - 1] * dd[k + 1] + lmb * lmb) // dd[k]
        for i in range(k + 1, n):
            t = lam[i][k]
            lam[i][k] = (dd[k + 1] * lam[i][k - 1] - lmb * t) // dd[k]
            lam[i][k - 1] = (bb * t + lmb * lam[i][k]) // dd[k + 1]
        dd[k] = bb

    k = 1
    while k < n:
        red(k, k - 1)
        if q * dd[k - 1] * dd[k + 1] < p * dd[k] ** 2 - q * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return from_columns(b, nrows=len(basis_cols))


# --- Gram matrix utilities ---

@dataclass(frozen=True)
class GramLattice:
    rank: int
    gram: tuple  # tuple of row tuples, exact entries

    @staticmethod
    def from_rows(rows):
        g = tuple(tuple(x for x in row) for row in rows)
        for i, row in enumerate(g):
            for j, x in enumerate(row):
                if x != g[j][i]:
                    raise InternalInconsistency("Gram matrix not symmetric")
        return GramLattice(len(g), g)

    def rows(self):
        return [list(row) for row in self.gram]


def gram_signature(g):
    """Signature (n_plus, n_minus, n_zero) of a symmetric rational matrix,
    by exact symmetric diagonalization."""
    n = len(g)
    a = [[Fraction(x) for x in row] for row in g]
    active = list(range(n))
    plus = minus = zero = 0

    def sym_add(i, j):  # row/col i += row/col j
        for c in range(n):
            a[i][c] += a[j][c]
        for r in range(n):
            a[r][i] += a[r][j]

    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            off = None
            for i in active:
                for j in active:
                    if i != j and a[i][j] != 0:
                        off = (i, j)
                        break
                if off:
                    break
            if off is None:
                zero += len(active)
                break
            sym_add(off[0], off[1])
            continue
        val = a[piv][piv]
        if val > 0:
            plus += 1
        else:
            minus += 1
        active.remove(piv)
        for i in active:
            if a[i][piv]:
                f = a[i][piv] / val
                for c in range(n):
                    a[i][c] -= f * a[piv][c]
                for r in range(n):
                    a[r][i] -= f * a[r][piv]
    return plus, minus, zero


def is_even_gram(g):
    return all(g[i][i] % 2 == 0 for i in range(len(g)))


def orthogonal_complement(gram, s_cols):
    """Saturated basis of the orthogonal complement of span(S) in the lattice
    with the given Gram matrix (coordinates of the ambient basis)."""
    n = len(gram)
    if not s_cols or not s_cols[0]:
        return identity(n)
    constraints = matmul(transpose(s_cols), gram)
    return kernel_basis(constraints, ncols=n)


def restrict_gram(gram, cols):
    """Gram matrix of the given column vectors under a bilinear form."""
    return matmul(transpose(cols), matmul(gram, cols))


def is_positive_definite(g):
    """Leading principal minors test on a symmetric rational matrix."""
    n = len(g)
    a = [[Fraction(x) for x in row] for row in g]
    det = Fraction(1)
    for k in range(n):
        # Gaussian elimination tracking leading minors
        if a[k][k] == 0:
            return False
        det *= a[k][k]
        if det <= 0:
            return False
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    return True
