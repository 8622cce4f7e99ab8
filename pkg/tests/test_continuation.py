from fractions import Fraction

import gmpy2
import mpmath
import pytest

from ellsurf.continuation import (
    Transporter,
    build_distinguished_loops,
    gauss_reduce_pair,
    integral_structure,
    numeric_monodromy,
    numeric_roots,
)
from ellsurf.errors import NotSquarefree
from ellsurf.fibre_lattice import fibre_period_lattice
from ellsurf.griffiths_dwork import DiffOperator, pencil_from_map, picard_fuchs
from ellsurf.numutil import bits_for, workprec
from ellsurf.sl2z import IDENTITY, kodaira_classify
from ellsurf.morsification import attach_infinity


LEGENDRE_MAP = {(0, 2, 1): [1], (3, 0, 0): [-1], (2, 0, 1): [1, 1], (1, 0, 2): [0, -1]}


@pytest.fixture(scope="module")
def legendre_op():
    return picard_fuchs(pencil_from_map(LEGENDRE_MAP), critical=[0, -1, 1])


def test_numeric_roots_examples():
    rs = numeric_roots([0, -1, 1], 40)  # t(t-1)
    assert [complex(round(r.real), round(r.imag)) for r in rs] == [0j, 1 + 0j]
    rs = numeric_roots([1, 0, 1], 40)  # t^2 + 1
    vals = sorted((complex(r) for r in rs), key=lambda z: z.imag)
    assert abs(vals[0] + 1j) < 1e-35 and abs(vals[1] - 1j) < 1e-35
    with pytest.raises(NotSquarefree):
        numeric_roots([0, 0, 1], 40)  # t^2


def _winding(vertices, point):
    with workprec(200):
        z0 = gmpy2.mpc(point)
        total = gmpy2.mpfr(0)
        for (ar, ai), (br, bi) in zip(vertices, vertices[1:]):
            a = gmpy2.mpc(gmpy2.mpq(ar.numerator, ar.denominator),
                          gmpy2.mpq(ai.numerator, ai.denominator)) - z0
            b = gmpy2.mpc(gmpy2.mpq(br.numerator, br.denominator),
                          gmpy2.mpq(bi.numerator, bi.denominator)) - z0
            total += gmpy2.atan2((b / a).imag, (b / a).real)
        return round(float(total / (2 * gmpy2.const_pi())))


def test_loops_wind_once_around_their_root_only():
    roots = numeric_roots([0, -1, 1], 40)
    plan = build_distinguished_loops(roots)
    pts = [complex(Fraction(re), Fraction(im)) for re, im in plan.roots]
    for k, lp in enumerate(plan.loops):
        for j, p in enumerate(pts):
            expected = 1 if j == lp.root_index else 0
            assert _winding(lp.vertices, p) == expected


def test_composition_winds_once_around_everything():
    # collinear real roots: t(t-1)(t-2)(t-3)
    coeffs = [0, -6, 11, -6, 1]
    roots = numeric_roots(coeffs, 40)
    plan = build_distinguished_loops(roots)
    pts = [complex(Fraction(re), Fraction(im)) for re, im in plan.roots]
    composed = []
    for lp in plan.loops:  # l_1 first
        composed.extend(lp.vertices[:-1])
    composed.append(plan.loops[-1].vertices[-1])
    for p in pts:
        assert _winding(composed, p) == 1


def test_transition_zero_length_is_identity(legendre_op):
    tr = Transporter(legendre_op, bits_for(40))
    s, _ = tr.transport([Fraction(-1, 2), Fraction(-1, 2)])
    with workprec(tr.prec):
        assert abs(s[0][0] - 1) < 1e-35 and abs(s[1][1] - 1) < 1e-35
        assert abs(s[0][1]) < 1e-35 and abs(s[1][0]) < 1e-35


def test_transition_against_hypergeometric_oracle(legendre_op):
    # y = 2F1(1/2, 1/2; 1; t) solves the operator; transport its Cauchy data
    # from -1/2 to i/2 and compare with direct series evaluation
    digits = 45
    tr = Transporter(legendre_op, bits_for(digits))
    s, _ = tr.transport([Fraction(-1, 2), (Fraction(0), Fraction(1, 2))])
    mpmath.mp.dps = digits + 15

    def f(z):
        return mpmath.hyp2f1(mpmath.mpf(1) / 2, mpmath.mpf(1) / 2, 1, z)

    def fp(z):
        return mpmath.hyp2f1(mpmath.mpf(3) / 2, mpmath.mpf(3) / 2, 2, z) / 4

    y0, d0 = f(mpmath.mpf(-1) / 2), fp(mpmath.mpf(-1) / 2)
    y1, d1 = f(mpmath.mpc(0, "0.5")), fp(mpmath.mpc(0, "0.5"))
    with workprec(tr.prec):
        got_y = s[0][0] * gmpy2.mpfr(str(y0)) + s[0][1] * gmpy2.mpfr(str(d0))
        got_d = s[1][0] * gmpy2.mpfr(str(y0)) + s[1][1] * gmpy2.mpfr(str(d0))
        assert abs(got_y - gmpy2.mpc(gmpy2.mpfr(str(y1.real)), gmpy2.mpfr(str(y1.imag)))) < 1e-38
        assert abs(got_d - gmpy2.mpc(gmpy2.mpfr(str(d1.real)), gmpy2.mpfr(str(d1.imag)))) < 1e-38


def test_groupoid_laws(legendre_op):
    digits = 40
    tr = Transporter(legendre_op, bits_for(digits))
    path = [Fraction(-1, 2), (Fraction(-1, 4), Fraction(1, 3)), (Fraction(1, 2), Fraction(1, 2))]
    s_fwd, _ = tr.transport(path)
    s_bwd, _ = tr.transport(list(reversed(path)))
    with workprec(tr.prec):
        prod = [
            [s_bwd[0][0] * s_fwd[0][0] + s_bwd[0][1] * s_fwd[1][0],
             s_bwd[0][0] * s_fwd[0][1] + s_bwd[0][1] * s_fwd[1][1]],
            [s_bwd[1][0] * s_fwd[0][0] + s_bwd[1][1] * s_fwd[1][0],
             s_bwd[1][0] * s_fwd[0][1] + s_bwd[1][1] * s_fwd[1][1]],
        ]
        tol = gmpy2.mpfr(2) ** (-tr.prec // 2)
        assert abs(prod[0][0] - 1) < tol and abs(prod[1][1] - 1) < tol
        assert abs(prod[0][1]) < tol and abs(prod[1][0]) < tol
    # concatenation equals the product of the pieces
    s_a, _ = tr.transport(path[:2])
    s_b, _ = tr.transport(path[1:])
    with workprec(tr.prec):
        comp = [
            [s_b[0][0] * s_a[0][0] + s_b[0][1] * s_a[1][0],
             s_b[0][0] * s_a[0][1] + s_b[0][1] * s_a[1][1]],
            [s_b[1][0] * s_a[0][0] + s_b[1][1] * s_a[1][0],
             s_b[1][0] * s_a[0][1] + s_b[1][1] * s_a[1][1]],
        ]
        for r in range(2):
            for c in range(2):
                assert abs(comp[r][c] - s_fwd[r][c]) < tol


def test_homotopy_invariance(legendre_op):
    digits = 40
    tr = Transporter(legendre_op, bits_for(digits))
    a = [Fraction(-1, 2), (Fraction(-1, 4), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 2))]
    b = [Fraction(-1, 2), (Fraction(-1, 3), Fraction(2, 5)), (Fraction(1, 4), Fraction(1, 2))]
    s_a, _ = tr.transport(a)
    s_b, _ = tr.transport(b)
    with workprec(tr.prec):
        tol = gmpy2.mpfr(2) ** (-tr.prec // 2)
        for r in range(2):
            for c in range(2):
                assert abs(s_a[r][c] - s_b[r][c]) < tol


def test_doubling_precision_doubles_agreement(legendre_op):
    path = [Fraction(-1, 2), (Fraction(1, 3), Fraction(2, 3))]
    vals = {}
    for digits in (30, 60, 120):
        tr = Transporter(legendre_op, bits_for(digits))
        s, _ = tr.transport(path)
        with workprec(bits_for(130)):
            vals[digits] = gmpy2.mpc(s[0][0])
    err_30 = abs(vals[30] - vals[120])
    err_60 = abs(vals[60] - vals[120])
    assert err_30 < 1e-25
    assert err_60 < 1e-65
    assert err_60 < err_30 ** 1.7  # at least doubling of matching digits


def test_loop_monodromy_around_regular_point(legendre_op):
    digits = 40
    tr = Transporter(legendre_op, bits_for(digits))
    # square around t = -2, far from {0, 1}
    verts = [
        (Fraction(-5, 2), Fraction(0)),
        (Fraction(-2), Fraction(1, 2)),
        (Fraction(-3, 2), Fraction(0)),
        (Fraction(-2), Fraction(-1, 2)),
        (Fraction(-5, 2), Fraction(0)),
    ]
    s, _ = tr.transport(verts)
    with workprec(tr.prec):
        tol = gmpy2.mpfr(2) ** (-tr.prec // 2)
        assert abs(s[0][0] - 1) < tol and abs(s[0][1]) < tol


def test_legendre_monodromy_and_integral_structure(legendre_op):
    pen = pencil_from_map(LEGENDRE_MAP)
    roots = numeric_roots([0, -1, 1], 50)
    plan = build_distinguished_loops(roots)
    nm = numeric_monodromy(legendre_op, plan, 50)
    with workprec(nm.prec):
        for m in nm.matrices:  # parabolic with trace 2
            assert abs(m[0][0] + m[1][1] - 2) < 1e-30
    anchor = fibre_period_lattice(pen, plan.basepoint, 40)
    p, rep, resid = integral_structure(nm, fibre_lattice_pair=anchor)
    assert float(resid) < 1e-20
    labels = [kodaira_classify(lp.matrix).type.label for lp in rep.loops]
    assert labels == ["I2", "I2"]
    closed = attach_infinity(rep)
    assert kodaira_classify(closed.loops[-1].matrix).type.label == "I2*"


def test_integral_structure_round_trip(legendre_op):
    # conjugate recovered integral monodromy by a complex matrix and feed it
    # back: the types and residual must reproduce
    pen = pencil_from_map(LEGENDRE_MAP)
    roots = numeric_roots([0, -1, 1], 50)
    plan = build_distinguished_loops(roots)
    nm = numeric_monodromy(legendre_op, plan, 50)
    anchor = fibre_period_lattice(pen, plan.basepoint, 40)
    p1, rep, _ = integral_structure(nm, fibre_lattice_pair=anchor)
    with workprec(nm.prec):
        g = [[gmpy2.mpc(gmpy2.mpfr("1.25"), gmpy2.mpfr("0.5")), gmpy2.mpc(gmpy2.mpfr("-0.3"), gmpy2.mpfr("0.7"))],
             [gmpy2.mpc(gmpy2.mpfr("0.1"), gmpy2.mpfr("-2.0")), gmpy2.mpc(gmpy2.mpfr("0.8"), gmpy2.mpfr("0.05"))]]
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]]
        fake = []
        for n_mat in nm.matrices:
            gm = [[sum(g[r][k] * n_mat[k][c] for k in range(2)) for c in range(2)] for r in range(2)]
            fake.append([[sum(gm[r][k] * ginv[k][c] for k in range(2)) for c in range(2)] for r in range(2)])
        # same geometry in the conjugated solution basis: P becomes g P, so
        # the basepoint period pair (first row of P) transforms with g
        new_anchor = (
            g[0][0] * p1[0][0] + g[0][1] * p1[1][0],
            g[0][0] * p1[0][1] + g[0][1] * p1[1][1],
        )
    nm_fake = type(nm)(fake, nm.prec, nm.plan)
    p2, rep2, resid2 = integral_structure(nm_fake, fibre_lattice_pair=new_anchor)
    labels = [kodaira_classify(lp.matrix).type.label for lp in rep2.loops]
    assert labels == ["I2", "I2"]
    assert float(resid2) < 1e-10


def test_gauss_reduce_pair():
    with workprec(200):
        w1 = gmpy2.mpc(1)
        w2 = gmpy2.mpc(gmpy2.mpfr("17.0"), gmpy2.mpfr("0.5"))
        a, b = gauss_reduce_pair(w1, w2)
        assert abs(a) <= abs(b)
        mu = (b * a.conjugate()).real / abs(a) ** 2
        assert abs(mu) <= 0.5 + 1e-20
