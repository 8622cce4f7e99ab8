"""Heuristic Neron-Severi recovery and the Mordell-Weil group and lattice.

Integer relations among period vectors are hunted with staged LLL reduction
(the scaling weight grows in fixed increments so entry sizes stay bounded);
the harvest is saturated, quotiented by the trivial lattice, and the height
pairing is the negated orthogonal projection onto the essential lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import gmpy2

from . import zlattice
from .errors import IndefiniteMWGram, InternalInconsistency, NotSubgroup, TrivNotInNS
from .homology import SurfaceHomology
from .numutil import bits_for, workprec
from .periods import PeriodMatrix


@dataclass(frozen=True)
class Reliability:
    search_bound: float  # B: missed relations need coefficient norm^2 > B
    max_coeff_norm: int  # N: ceil of the largest found coefficient norm
    max_residual: float  # eps: bound on the period residual of found vectors


@dataclass(frozen=True)
class NSReport:
    basis: tuple  # columns in homology coordinates, saturated
    rho: int
    reliability: Reliability


@dataclass(frozen=True)
class MWReport:
    rank: int
    torsion: tuple
    gram: tuple  # rational rows, positive definite, size rank
    generators: tuple  # homology coordinates of free generator lifts


_STAGE_DIGITS = 24


def find_integer_kernel(
    periods: PeriodMatrix, homology: SurfaceHomology, digits: int,
    delta: Fraction = Fraction(99, 100),
) -> NSReport:
    """Saturated sublattice of classes with numerically zero periods."""
    n = homology.basis_size
    s = len(periods.values)
    if s == 0:
        return NSReport(
            tuple(tuple(row) for row in zlattice.identity(n)),
            n,
            Reliability(float("inf"), 0, periods.error_estimate),
        )
    prec = bits_for(digits)
    with workprec(prec):
        rows = []
        for row in periods.values:
            scale = max(abs(z) for z in row)
            if scale == 0:
                scale = gmpy2.mpfr(1)
            rows.append([z.real / scale for z in row])
            rows.append([z.imag / scale for z in row])

        trans = zlattice.identity(n)
        weight_digits = 0
        target = digits - 2 * max(2, digits // 10)
        while weight_digits < target:
            weight_digits = min(weight_digits + _STAGE_DIGITS, target)
            w = gmpy2.mpfr(10) ** weight_digits
            emb = []
            for i in range(n):
                alpha = trans[i]
                resid = []
                for r in rows:
                    acc = gmpy2.mpfr(0)
                    for k in range(n):
                        if alpha[k]:
                            acc += alpha[k] * r[k]
                    resid.append(int(gmpy2.rint(acc * w)))
                emb.append(list(alpha) + resid)
            reduced = zlattice.lll_reduce(zlattice.transpose(emb), delta)
            trans = [col[:n] for col in zlattice.columns(reduced)]

        # harvest with residuals measured on the raw full-precision periods
        keep = []
        rest_norms = []
        res_threshold = gmpy2.mpfr(10) ** (-digits // 2)
        norm_threshold = gmpy2.mpfr(10) ** (digits // 4)
        max_resid = gmpy2.mpfr(0)
        max_norm2 = 0
        for alpha in trans:
            resid = gmpy2.mpfr(0)
            for row in periods.values:
                acc = gmpy2.mpc(0)
                for k in range(n):
                    if alpha[k]:
                        acc += alpha[k] * row[k]
                resid = max(resid, abs(acc))
            norm2 = sum(x * x for x in alpha)
            if resid < res_threshold and gmpy2.sqrt(gmpy2.mpfr(norm2)) < norm_threshold:
                keep.append(list(alpha))
                max_resid = max(max_resid, resid)
                max_norm2 = max(max_norm2, norm2)
            else:
                emb_norm2 = norm2 + sum(
                    int(x) ** 2
                    for x in (
                        int(gmpy2.rint(sum(alpha[k] * r[k] for k in range(n))
                                       * gmpy2.mpfr(10) ** target))
                        for r in rows
                    )
                )
                rest_norms.append(emb_norm2)

        if keep:
            basis_cols = zlattice.saturate(zlattice.from_columns(keep, nrows=n))
        else:
            basis_cols = [[] for _ in range(n)]
        rho = len(basis_cols[0]) if basis_cols and basis_cols[0] else 0
        m_dim = n + 2 * s
        if rest_norms:
            bound = min(rest_norms) / float(2 ** (m_dim - 1))
        else:
            bound = float("inf")
        eps = max(float(max_resid), periods.error_estimate)
        n_coeff = isqrt(max_norm2) if max_norm2 == isqrt(max_norm2) ** 2 else isqrt(max_norm2) + 1
        return NSReport(
            tuple(tuple(col) for col in zlattice.columns(basis_cols)),
            rho,
            Reliability(bound, n_coeff, eps),
        )


def ns_basis_columns(report: NSReport, n: int):
    return zlattice.from_columns([list(c) for c in report.basis], nrows=n)


def trivial_lattice(h: SurfaceHomology):
    """Columns spanning the zero section, the fibre class and all fibre
    components.  The generators are independent; the span is deliberately
    not saturated (its quotient inside NS is the Mordell-Weil torsion)."""
    n = h.basis_size
    cols = []
    o = [0] * n
    o[h.section_index] = 1
    f = [0] * n
    f[h.fibre_index] = 1
    cols.append(o)
    cols.append(f)
    for comps in h.component_embeddings:
        for c in comps:
            cols.append(list(c))
    expected = 2 + sum(len(comps) for comps in h.component_embeddings)
    mat = zlattice.from_columns(cols, nrows=n)
    if zlattice.rank_int(mat) != expected:
        raise InternalInconsistency("trivial lattice generators are dependent")
    return mat


def mordell_weil(ns_cols, triv_cols, h: SurfaceHomology) -> MWReport:
    """Mordell-Weil group as NS/Triv, with the negated height pairing on the
    free part via rational orthogonal projection onto Triv-perp."""
    try:
        group, quot = zlattice.quotient(ns_cols, triv_cols)
    except NotSubgroup as exc:
        raise TrivNotInNS(
            "trivial lattice not contained in the recovered NS lattice"
        ) from exc
    gens = zlattice.columns(quot.free_cols)
    gram = h.gram.rows()
    t_cols = zlattice.columns(triv_cols)
    t_gram = [[Fraction(_pair(gram, a, b)) for b in t_cols] for a in t_cols]
    t_inv = _fraction_inverse_sym(t_gram)
    mw_gram = []
    for gi in gens:
        row = []
        ti = [Fraction(_pair(gram, gi, tc)) for tc in t_cols]
        for gj in gens:
            tj = [Fraction(_pair(gram, gj, tc)) for tc in t_cols]
            corr = Fraction(0)
            for a in range(len(t_cols)):
                for b in range(len(t_cols)):
                    corr += ti[a] * t_inv[a][b] * tj[b]
            row.append(-(Fraction(_pair(gram, gi, gj)) - corr))
        mw_gram.append(row)
    if mw_gram and not zlattice.is_positive_definite(mw_gram):
        raise IndefiniteMWGram("height pairing is not positive definite")
    return MWReport(
        rank=group.rank,
        torsion=group.torsion,
        gram=tuple(tuple(x for x in row) for row in mw_gram),
        generators=tuple(tuple(g) for g in gens),
    )


def shioda_tate_check(rho: int, h: SurfaceHomology, mw_rank: int) -> bool:
    triv_rank = 2 + sum(len(c) for c in h.component_embeddings)
    return mw_rank == rho - triv_rank


def _pair(gram, x, y):
    total = 0
    for i, xi in enumerate(x):
        if xi:
            row = gram[i]
            for j, yj in enumerate(y):
                if yj:
                    total += xi * yj * row[j]
    return total


def _fraction_inverse_sym(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise InternalInconsistency("trivial lattice Gram is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]
