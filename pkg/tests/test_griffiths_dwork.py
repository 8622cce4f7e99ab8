from fractions import Fraction

import pytest
import sympy

from fixtures import K3_PENCIL, LEGENDRE_PENCIL
from ellsurf import polyutil
from ellsurf.errors import (
    DegeneratePencil,
    IsotrivialError,
    NoZeroSection,
    NotHomogeneousDegree3,
    ParseError,
)
from ellsurf.griffiths_dwork import (
    critical_value_polynomial,
    pencil_from_map,
    picard_fuchs,
)
from ellsurf.pipeline import parse_pencil


def legendre_pencil():
    return parse_pencil(LEGENDRE_PENCIL)


def test_parse_k3_pencil():
    pen = parse_pencil(K3_PENCIL)
    assert pen.tdeg == 8
    cm = pen.coeff_map()
    assert cm[(3, 0, 0)] == [1]
    assert cm[(0, 2, 1)] == [-1]


def test_parse_rejects_bad_input():
    with pytest.raises(NoZeroSection):
        parse_pencil("X^3 + Y^3 + Z^3 - t*X*Y*Z")
    with pytest.raises(NotHomogeneousDegree3):
        parse_pencil("X^4 - Y^2*Z^2")
    with pytest.raises(ParseError):
        parse_pencil("X^3 + w*Y^2*Z")
    with pytest.raises(ParseError):
        parse_pencil("X^3 + (")


def test_legendre_critical_values():
    crit = critical_value_polynomial(legendre_pencil())
    assert crit == [0, -1, 1]  # t(t-1) up to normalization


def test_constant_smooth_cubic_rejected():
    pen = pencil_from_map({(3, 0, 0): [1], (1, 2, 0): [1], (0, 0, 3): [1]})
    with pytest.raises(DegeneratePencil):
        critical_value_polynomial(pen)


def hypergeometric_series(n_terms):
    # sum ((1/2)_n / n!)^2 t^n: the fibre period of the Legendre family
    coeff = [Fraction(1)]
    for n in range(1, n_terms):
        coeff.append(coeff[-1] * Fraction(2 * n - 1, 2 * n) ** 2)
    return coeff


def test_legendre_picard_fuchs_against_series_oracle():
    op = picard_fuchs(legendre_pencil(), critical=[0, -1, 1])
    assert (op.a, op.b, op.c) == ((0, -4, 4), (-4, 8), (1,))
    f = hypergeometric_series(55)
    fp = polyutil.pderiv(f)
    fpp = polyutil.pderiv(fp)
    res = polyutil.padd(
        polyutil.padd(polyutil.pmul(list(op.a), fpp), polyutil.pmul(list(op.b), fp)),
        polyutil.pmul(list(op.c), f),
    )
    assert all(x == 0 for x in res[:50])


def test_isotrivial_rejected():
    pen = pencil_from_map({(0, 2, 1): [1], (3, 0, 0): [-1], (0, 0, 3): [0, -1]})
    with pytest.raises(IsotrivialError):
        picard_fuchs(pen)


def test_operator_scale_invariance():
    base = {(0, 2, 1): [1], (3, 0, 0): [-1], (2, 0, 1): [1, 1], (1, 0, 2): [0, -1]}
    op1 = picard_fuchs(pencil_from_map(base), critical=[0, -1, 1])
    scaled = {k: [Fraction(5, 3) * x for x in v] for k, v in base.items()}
    op2 = picard_fuchs(pencil_from_map(scaled), critical=[0, -1, 1])
    assert (op1.a, op1.b, op1.c) == (op2.a, op2.b, op2.c)


@pytest.fixture(scope="module")
def k3_operator_data():
    pen = parse_pencil(K3_PENCIL)
    crit = critical_value_polynomial(pen)
    op = picard_fuchs(pen, critical=crit)
    return pen, crit, op


def test_k3_critical_polynomial_has_16_roots(k3_operator_data):
    _, crit, _ = k3_operator_data
    assert polyutil.degree(crit) == 16
    t = sympy.Symbol("t")
    p = sympy.Poly(list(reversed(crit)), t)
    assert sympy.discriminant(p.as_expr(), t) != 0  # squarefree


def test_k3_operator_order_two_degree_26(k3_operator_data):
    _, _, op = k3_operator_data
    assert op.order == 2
    assert op.degree == 26


def test_operator_singularities_contain_critical_values(k3_operator_data):
    _, crit, op = k3_operator_data
    t = sympy.Symbol("t")
    a = sympy.Poly(list(reversed(op.a)), t)
    for f, _ in sympy.Poly(list(reversed(crit)), t).factor_list()[1]:
        q, r = sympy.div(a, sympy.Poly(f, t))
        assert r == 0
