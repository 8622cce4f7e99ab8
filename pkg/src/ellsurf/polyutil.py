"""Dense univariate polynomial arithmetic on ascending coefficient lists.

Coefficients are Python ints or Fractions; results stay exact.  sympy is used
only for factorization-grade operations (gcd, squarefree part, factor lists).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import sympy

_T = sympy.Symbol("t")


def trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(c):
    c = trim(c)
    return len(c) - 1 if c else -1


def padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pscale(a, s):
    return trim([s * x for x in a])


def pmul(a, b):
    a, b = trim(a), trim(b)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def pderiv(a):
    return trim([i * x for i, x in enumerate(a)][1:])


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def to_sympy(a):
    return sympy.Poly(list(reversed([sympy.Rational(Fraction(x)) for x in a])) or [0], _T)


def from_sympy(p):
    coeffs = list(reversed(p.all_coeffs()))
    out = []
    for c in coeffs:
        r = sympy.Rational(c)
        out.append(Fraction(int(r.p), int(r.q)))
    return trim(out)


def primitive_int(a):
    """Scale a rational-coefficient polynomial to integer coefficients with
    content 1 and positive leading coefficient."""
    a = trim(a)
    if not a:
        return []
    fr = [Fraction(x) for x in a]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return ints


def poly_gcd(a, b):
    return from_sympy(sympy.gcd(to_sympy(a), to_sympy(b)))


def squarefree_part(a):
    g = poly_gcd(a, pderiv(a))
    q, r = pdivmod(a, g)
    assert not r
    return primitive_int(q)


def pdivmod(a, b):
    a = [Fraction(x) for x in trim(a)]
    b = [Fraction(x) for x in trim(b)]
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, x in enumerate(b):
            a[i + shift] -= f * x
        a = trim(a)
        if not a:
            break
    return trim(q), trim(a)


def factor_list_int(a):
    """Monic-free integer irreducible factors with multiplicities."""
    _, factors = to_sympy(a).factor_list()
    out = []
    for f, mult in factors:
        out.append((primitive_int(from_sympy(sympy.Poly(f, _T))), int(mult)))
    return out


def valuation(a, q):
    """Multiplicity of the irreducible factor q in a."""
    v = 0
    cur = trim(a)
    while True:
        quot, rem = pdivmod(cur, q)
        if rem or not quot:
            return v
        v += 1
        cur = quot
