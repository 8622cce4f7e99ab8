"""Holomorphic 2-forms and their periods on the computed homology basis.

The form basis comes from the linear system of a divisor built from local
exponents of the period operator; periods of extension classes are path
integrals of rational-weighted operator solutions, accumulated by the
augmented Taylor recurrence of the continuation module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

import gmpy2

from . import polyutil
from .continuation import (
    NumericMonodromy,
    Transporter,
    _mat_inv,
    _mat_mul,
    gauss_reduce_pair,
    integral_structure,
    local_monodromy,
)
from .errors import (
    ExponentRecoveryFailure,
    FormSingularOnPath,
    InternalInconsistency,
    NonRationalWronskian,
    NumericError,
    SingularChangeOfBasis,
)
from .griffiths_dwork import DiffOperator
from .numutil import bits_for, horner, workprec


# --- Wronskian ---

@dataclass(frozen=True)
class Wronskian:
    """W = scalar * num / den with integer factors and leading coefficient 1,
    known to be rational from integer residues of -b/a."""

    factors: tuple  # ((irreducible int poly, integer exponent), ...)
    num: tuple
    den: tuple
    scalar: Fraction
    sign_flipped: bool  # True if +b/a was needed instead of Abel's -b/a


def _poly_mod(a, q):
    _, r = polyutil.pdivmod(a, q)
    return r


def _poly_invmod(a, q):
    """Inverse of a modulo the irreducible q over the rationals."""
    r0, r1 = [Fraction(x) for x in q], [Fraction(x) for x in polyutil.trim(a)]
    s0, s1 = [], [Fraction(1)]
    while polyutil.trim(r1):
        quo, rem = polyutil.pdivmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, polyutil.padd(s0, polyutil.pscale(polyutil.pmul(quo, s1), -1))
    if polyutil.degree(r0) != 0:
        return None
    inv = polyutil.pscale(s0, Fraction(1) / r0[0])
    return _poly_mod(inv, q)


def _integer_residues(num, den):
    """Exponents e_q with num/den = sum e_q q'/q, or None."""
    if polyutil.degree(num) >= polyutil.degree(den):
        return None
    dp = polyutil.pderiv(den)
    if polyutil.degree(polyutil.poly_gcd(den, dp)) > 0:
        return None  # multiple poles
    out = []
    for q, mult in polyutil.factor_list_int(den):
        if mult != 1:
            return None
        cof, rem = polyutil.pdivmod(den, q)
        assert not rem
        inv = _poly_invmod(polyutil.pmul(cof, polyutil.pderiv(q)), q)
        if inv is None:
            return None
        res = _poly_mod(polyutil.pmul(num, inv), q)
        if polyutil.degree(res) > 0:
            return None
        e = res[0] if res else Fraction(0)
        e = Fraction(e)
        if e.denominator != 1:
            return None
        if e != 0:
            out.append((tuple(q), int(e)))
    return out


def wronskian(op: DiffOperator) -> Wronskian:
    """Solve W'/W = -b/a exactly as a product of integer-power factors."""
    a, b = list(op.a), list(op.b)
    flipped = False
    for sign in (-1, 1):
        nb = polyutil.pscale(b, sign)
        g = polyutil.poly_gcd(nb, a)
        num, r1 = polyutil.pdivmod(nb, g)
        den, r2 = polyutil.pdivmod(a, g)
        assert not r1 and not r2
        if not polyutil.trim(num):
            factors = []
        else:
            factors = _integer_residues(num, den)
        if factors is not None:
            flipped = sign == 1
            break
    else:
        raise NonRationalWronskian("logarithmic derivative has non-integer residues")
    w_num, w_den = [1], [1]
    for q, e in factors:
        power = [1]
        for _ in range(abs(e)):
            power = polyutil.pmul(power, list(q))
        if e > 0:
            w_num = polyutil.pmul(w_num, power)
        else:
            w_den = polyutil.pmul(w_den, power)
    scalar = Fraction(w_den[-1], w_num[-1])
    return Wronskian(tuple(factors), tuple(w_num), tuple(w_den), scalar, flipped)


# --- local exponents and the form divisor ---

def operator_at_infinity(op: DiffOperator) -> DiffOperator:
    """The operator in the chart u = 1/t (cleared to polynomial form)."""
    d = max(polyutil.degree(list(op.a)), polyutil.degree(list(op.b)),
            polyutil.degree(list(op.c)))

    def rev(p):
        q = list(p) + [0] * (d + 1 - len(p))
        return polyutil.trim(list(reversed(q)))

    ra, rb, rc = rev(op.a), rev(op.b), rev(op.c)
    a_new = [0, 0, 0, 0] + ra
    b_new = polyutil.padd([0, 0, 0] + polyutil.pscale(ra, 2),
                          [0, 0] + polyutil.pscale(rb, -1))
    c_new = rc
    # strip common powers of u so the result stays primitive
    shift = 0
    polys = [polyutil.trim(a_new), polyutil.trim(b_new), polyutil.trim(c_new)]
    while all((not p) or (len(p) > 1 and p[0] == 0) for p in polys):
        polys = [p[1:] if p else p for p in polys]
        shift += 1
    a_new, b_new, c_new = polys
    from math import gcd as _gcd

    g = 0
    for p in polys:
        for x in p:
            g = _gcd(g, abs(x))
    if g > 1:
        a_new = [x // g for x in a_new]
        b_new = [x // g for x in b_new]
        c_new = [x // g for x in c_new]
    if a_new and a_new[-1] < 0:
        a_new = [-x for x in a_new]
        b_new = [-x for x in b_new]
        c_new = [-x for x in c_new]
    return DiffOperator(tuple(a_new), tuple(b_new), tuple(c_new))


def _nearest_bounded_rational(x, max_den=12):
    best = None
    for den in range(1, max_den + 1):
        num = round(x * den)
        cand = Fraction(num, den)
        err = abs(x - num / den)
        if best is None or err < best[0]:
            best = (err, cand)
    return best[1], best[0]


def local_exponents(op: DiffOperator, q, digits: int = 40):
    """Frobenius exponents at the roots of the irreducible factor q of the
    leading coefficient (or at infinity for q == "inf"), as exact rationals
    with denominator at most 12."""
    if q == "inf":
        return local_exponents(operator_at_infinity(op), [0, 1], digits)
    a, b, c = list(op.a), list(op.b), list(op.c)
    va = polyutil.valuation(a, q)
    vb = polyutil.valuation(b, q) if polyutil.trim(b) else None
    vc = polyutil.valuation(c, q) if polyutil.trim(c) else None
    cands = [va - 2]
    if vb is not None:
        cands.append(vb - 1)
    if vc is not None:
        cands.append(vc)
    e = min(cands)
    if va - 2 > e:
        raise ExponentRecoveryFailure("irregular singular point")
    from . import numutil

    # evaluation cancels up to the coefficient magnitude; work well above it
    coeff_digits = max(
        (len(str(abs(x))) for p in (a, b, c) for x in p if x), default=1
    )
    eval_digits = digits + 10 + coeff_digits
    root = numutil.roots_int_poly(list(q), eval_digits)[0]
    prec = bits_for(eval_digits)
    with workprec(prec):
        # in the local variable x = t - r the factor contributes q'(r) x, so
        # the leading coefficient of p = q^v * pbar is pbar(r) q'(r)^v
        qp_val = horner(polyutil.pderiv(list(q)), root, prec)

        def lead(p, v):
            quo = list(p)
            for _ in range(v):
                quo, rem = polyutil.pdivmod(quo, q)
                assert not rem
            return horner(quo, root, prec) * qp_val ** v

        alpha = lead(a, va)
        beta = lead(b, vb) if (vb is not None and vb - 1 == e) else gmpy2.mpc(0)
        gamma = lead(c, vc) if (vc is not None and vc == e) else gmpy2.mpc(0)
        # alpha s(s-1) + beta s + gamma = 0
        disc = gmpy2.sqrt((beta - alpha) ** 2 - 4 * alpha * gamma)
        s1 = (alpha - beta + disc) / (2 * alpha)
        s2 = (alpha - beta - disc) / (2 * alpha)
        out = []
        tol = gmpy2.mpfr(10) ** (-digits // 2)
        for s in (s1, s2):
            if abs(s.imag) > tol:
                raise ExponentRecoveryFailure("complex local exponent")
            frac, err = _nearest_bounded_rational(float(s.real), 12)
            refined_err = abs(s.real - gmpy2.mpq(frac.numerator, frac.denominator))
            if refined_err > tol:
                raise ExponentRecoveryFailure(
                    f"exponent {float(s.real)} not close to a denominator-12 rational"
                )
            out.append(frac)
        out.sort()
        return tuple(out)


def verify_exponents_by_monodromy(op, point, gap, exps, digits=25):
    """Eigenvalues of the local monodromy must be exp(2 pi i s)."""
    prec = bits_for(digits)
    m = local_monodromy(op, point, gap / 4, digits)
    with workprec(prec):
        tr = m[0][0] + m[1][1]
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        disc = gmpy2.sqrt(tr * tr - 4 * det)
        eigs = [(tr + disc) / 2, (tr - disc) / 2]
        pi2 = 2 * gmpy2.const_pi()
        expected = []
        for s in exps:
            ang = pi2 * gmpy2.mpq(s.numerator, s.denominator)
            expected.append(gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang)))
        tol = gmpy2.mpfr(10) ** (-digits // 2)
        direct = abs(eigs[0] - expected[0]) < tol and abs(eigs[1] - expected[1]) < tol
        crossed = abs(eigs[0] - expected[1]) < tol and abs(eigs[1] - expected[0]) < tol
        return direct or crossed


@dataclass(frozen=True)
class StillerDivisor:
    finite: tuple  # ((irreducible int poly, order), ...)
    at_infinity: int

    @property
    def degree(self) -> int:
        return self.at_infinity + sum(
            ord_ * (len(q) - 1) for q, ord_ in self.finite
        )


def stiller_divisor(op: DiffOperator, digits: int = 40) -> StillerDivisor:
    """Divisor whose linear system parametrizes holomorphic 2-forms: order
    -floor(s) + 1 at finite singular points, -floor(s) - 3 at infinity, with
    s the larger local exponent."""
    finite = []
    for q, _ in polyutil.factor_list_int(list(op.a)):
        exps = local_exponents(op, q, digits)
        order = -floor(exps[1]) + 1
        finite.append((tuple(q), order))
    s_inf = local_exponents(op, "inf", digits)[1]
    return StillerDivisor(tuple(finite), -floor(s_inf) - 3)


def linear_system_basis(div: StillerDivisor):
    """Rational-function basis of L(div) on the line: numerators t^k times
    forced zeros over the fixed pole denominator."""
    den, zeros = [1], [1]
    for q, order in div.finite:
        for _ in range(abs(order)):
            if order > 0:
                den = polyutil.pmul(den, list(q))
            else:
                zeros = polyutil.pmul(zeros, list(q))
    kmax = polyutil.degree(den) - polyutil.degree(zeros) + div.at_infinity
    dim = div.degree + 1
    if dim <= 0:
        return []
    basis = []
    for k in range(kmax + 1):
        num = [0] * k + zeros
        basis.append((polyutil.trim(num), list(den)))
    if len(basis) != dim:
        raise InternalInconsistency(
            f"linear system dimension {len(basis)} != deg + 1 = {dim}"
        )
    return basis


@dataclass(frozen=True)
class HolomorphicFormBasis:
    divisor: StillerDivisor
    wronskian: Wronskian
    forms: tuple  # ((num, den) integer polynomial pairs, ...), f = num/den
    scalars: tuple  # rational prefactor per form making it monic (constant -> 1)

    @property
    def dimension(self) -> int:
        return len(self.forms)


def holomorphic_form_basis(op: DiffOperator, digits: int = 40) -> HolomorphicFormBasis:
    """Basis of rational weights f with f * (fibre form) ^ dt holomorphic:
    f = Z / W over the linear system of the Stiller divisor."""
    w = wronskian(op)
    div = stiller_divisor(op, digits)
    forms = []
    scalars = []
    for z_num, z_den in linear_system_basis(div):
        num = polyutil.pmul(z_num, list(w.den))
        den = polyutil.pmul(z_den, list(w.num))
        g = polyutil.poly_gcd(num, den)
        if polyutil.degree(g) > 0:
            num, _ = polyutil.pdivmod(num, g)
            den, _ = polyutil.pdivmod(den, g)
        num = polyutil.primitive_int(num)
        den = polyutil.primitive_int(den)
        forms.append((tuple(num), tuple(den)))
        scalars.append(Fraction(den[-1], num[-1]))
    # poles of every form must already be singular points of the operator
    for num, den in forms:
        for q, _ in polyutil.factor_list_int(list(den)):
            if polyutil.valuation(list(op.a), q) == 0:
                raise FormSingularOnPath(
                    "form has a pole away from the operator singularities"
                )
    return HolomorphicFormBasis(div, w, tuple(forms), tuple(scalars))


# --- period integration ---

@dataclass
class PeriodMatrix:
    values: tuple  # rows per form, columns per homology basis class
    digits: int
    error_estimate: float  # heuristic bound on each entry
    scale: object  # complex scale pinning the fibre form normalization


def loop_transports(op, forms, plan, digits):
    """Per-loop transition matrix and quadrature rows at full precision."""
    prec = bits_for(digits)
    tr = Transporter(op, prec, forms=[(list(n), list(d)) for n, d in forms])
    out = []
    with workprec(prec):
        for lp in plan.loops:
            s_mat, q_mat = tr.transport(lp.vertices)
            out.append((s_mat, q_mat))
    return out


def lattice_scale(candidate_pair, true_pair, prec):
    """Complex s with s * (Z c1 + Z c2) = Z w1 + Z w2, or None."""
    with workprec(prec):
        u1, u2 = gauss_reduce_pair(*candidate_pair)
        v1, v2 = gauss_reduce_pair(*true_pair)
        tol = gmpy2.mpfr(10) ** -10

        def in_lattice(z, b1, b2):
            det = (b1 * b2.conjugate()).imag
            al = (z * b2.conjugate()).imag / det
            be = -(z * b1.conjugate()).imag / det
            return abs(al - gmpy2.rint(al)) < tol and abs(be - gmpy2.rint(be)) < tol

        for target in (v1, v2, v1 + v2, v1 - v2):
            for source in (u1, u2):
                for sign in (1, -1):
                    s = sign * target / source
                    if (
                        in_lattice(s * u1, v1, v2)
                        and in_lattice(s * u2, v1, v2)
                        and in_lattice(v1 / s, u1, u2)
                        and in_lattice(v2 / s, u1, u2)
                    ):
                        return s
    return None


def period_integrals(
    op,
    forms: HolomorphicFormBasis,
    plan,
    prim,
    homology,
    digits,
    fibre_lattice_pair=None,
):
    """Periods of the holomorphic forms over the primary basis columns.

    Extension classes are integrated as words of whole loops; components, F
    and O are algebraic cycles with zero holomorphic periods."""
    s_dim = forms.dimension
    size = homology.basis_size
    n_ext = len(prim.extensions)
    n_comp = len(prim.component_coords)
    prec = bits_for(digits)
    if s_dim == 0:
        return PeriodMatrix((), digits, 10.0 ** (-digits), 1)

    transports = loop_transports(op, forms.forms, plan, digits)
    nm = NumericMonodromy([t[0] for t in transports], prec, plan)
    p_mat, rep, residual = integral_structure(nm, fibre_lattice_pair)
    mor = homology.morsified
    finite_blocks = [bl for bl in mor.blocks if not bl.at_infinity]
    if [bl.matrix for bl in finite_blocks] != [lp.matrix for lp in rep.loops]:
        raise InternalInconsistency(
            "full-precision monodromy disagrees with the earlier stage"
        )

    with workprec(prec):
        scale = gmpy2.mpc(1)
        if fibre_lattice_pair is not None:
            cand = (p_mat[0][0], p_mat[0][1])
            s = lattice_scale(cand, fibre_lattice_pair, prec)
            if s is None:
                raise NumericError("period scale anchoring failed")
            scale = s

        inv_cache = {}

        def loop_data(letter):
            idx = abs(letter) - 1
            t_mat, q_mat = transports[idx]
            if letter > 0:
                return t_mat, q_mat
            if letter not in inv_cache:
                t_inv = _mat_inv(t_mat)
                q_rev = [
                    [-(row[0] * t_inv[0][0] + row[1] * t_inv[1][0]),
                     -(row[0] * t_inv[0][1] + row[1] * t_inv[1][1])]
                    for row in q_mat
                ]
                inv_cache[letter] = (t_inv, q_rev)
            return inv_cache[letter]

        rows = [[gmpy2.mpc(0)] * size for _ in range(s_dim)]
        for col, ext in enumerate(prim.extensions):
            eta = ext.cycle
            w = [
                p_mat[0][0] * eta[0] + p_mat[0][1] * eta[1],
                p_mat[1][0] * eta[0] + p_mat[1][1] * eta[1],
            ]
            state = [[gmpy2.mpc(1), gmpy2.mpc(0)], [gmpy2.mpc(0), gmpy2.mpc(1)]]
            acc = [gmpy2.mpc(0)] * s_dim
            for letter in ext.word:
                t_mat, q_mat = loop_data(letter)
                cur = [
                    state[0][0] * w[0] + state[0][1] * w[1],
                    state[1][0] * w[0] + state[1][1] * w[1],
                ]
                for j in range(s_dim):
                    acc[j] += q_mat[j][0] * cur[0] + q_mat[j][1] * cur[1]
                state = _mat_mul(t_mat, state)
            for j in range(s_dim):
                pref = forms.scalars[j]
                rows[j][col] = acc[j] * scale * gmpy2.mpq(
                    pref.numerator, pref.denominator
                )
        # columns n_ext .. n_ext+n_comp+2 are algebraic cycles: zero periods
        values = tuple(tuple(row) for row in rows)
    return PeriodMatrix(values, digits, 10.0 ** (-digits + max(2, digits // 10)), scale)


def full_period_map(homology, prim, primary_periods: PeriodMatrix) -> PeriodMatrix:
    """Period vectors on the homology basis.

    Periods transform as covectors: with M the column matrix of the primary
    basis in homology coordinates, pi_B = M^-T pi_{B'}."""
    size = homology.basis_size
    if not primary_periods.values:
        return primary_periods
    from . import zlattice

    m = zlattice.from_columns([list(c) for c in prim.change_of_basis], nrows=size)
    det = zlattice.det_int(m)
    if det == 0:
        raise SingularChangeOfBasis("primary basis does not span")
    inv = [[Fraction(x, 1) for x in row] for row in _fraction_inverse(m)]
    prec = bits_for(primary_periods.digits)
    with workprec(prec):
        out = []
        for row in primary_periods.values:
            new_row = []
            for i in range(size):
                acc = gmpy2.mpc(0)
                for k in range(size):
                    coeff = inv[k][i]
                    if coeff:
                        acc += gmpy2.mpq(coeff.numerator, coeff.denominator) * row[k]
                new_row.append(acc)
            out.append(tuple(new_row))
    return PeriodMatrix(
        tuple(out), primary_periods.digits, primary_periods.error_estimate,
        primary_periods.scale,
    )


def _fraction_inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
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
    return [row[n:] for row in a]
