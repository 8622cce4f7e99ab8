"""Arbitrary-precision numeric helpers on top of gmpy2.

Precision is always passed explicitly in bits; callers convert from decimal
digits via `bits_for`.  Complex numbers are gmpy2.mpc throughout.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
import numpy as np

from .errors import NotSquarefree, NumericError

GUARD_BITS = 30


def workprec(bits: int):
    """Context manager activating a gmpy2 context with the given precision."""
    return gmpy2.context(precision=bits)


def bits_for(digits: int, guard: int | None = None) -> int:
    """Working precision in bits for a decimal-digit target, with guard."""
    extra = guard if guard is not None else int(0.1 * digits * 3.33) + GUARD_BITS
    return int(digits * 3.3219280948873626) + 1 + extra


def to_mpfr(x, prec):
    with workprec(prec):
        if isinstance(x, Fraction):
            return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
        return gmpy2.mpfr(x)


def to_mpc(x, prec):
    with workprec(prec):
        if isinstance(x, Fraction):
            return gmpy2.mpc(gmpy2.mpq(x.numerator, x.denominator))
        if isinstance(x, tuple):
            re, im = x
            return gmpy2.mpc(to_mpfr(re, prec), to_mpfr(im, prec))
        return gmpy2.mpc(x)


def horner(coeffs, z, prec):
    """Evaluate a polynomial (ascending coefficients, int/Fraction) at z."""
    with workprec(prec):
        acc = gmpy2.mpc(0)
        for c in reversed(coeffs):
            acc = acc * z
            if isinstance(c, Fraction):
                acc += gmpy2.mpq(c.numerator, c.denominator)
            else:
                acc += c
        return acc


def poly_gcd_degree(p, q):
    """Degree of gcd of two rational-coefficient polynomials (ascending)."""
    a = [Fraction(x) for x in p]
    b = [Fraction(x) for x in q]

    def deg(c):
        while c and c[-1] == 0:
            c.pop()
        return len(c) - 1

    deg(a), deg(b)
    while b:
        if deg(b) < 0:
            break
        # a mod b
        while deg(a) >= deg(b) >= 0:
            f = a[-1] / b[-1]
            shift = deg(a) - deg(b)
            for i, x in enumerate(b):
                a[i + shift] -= f * x
            deg(a)
            if not a:
                break
        a, b = b, a
        if deg(b) < 0:
            break
    return max(deg(a), 0) if a else 0


def is_squarefree(coeffs):
    dp = [i * Fraction(c) for i, c in enumerate(coeffs)][1:]
    return poly_gcd_degree(list(coeffs), dp) == 0


def roots_int_poly(coeffs, digits, require_squarefree=True):
    """All complex roots of a rational-coefficient polynomial, to the given
    number of decimal digits.  Double-precision companion seeds refined by
    Aberth iteration; output sorted by (Re, Im)."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 1:
        return []
    if require_squarefree and not is_squarefree(c):
        raise NotSquarefree("polynomial has repeated roots")
    deg = len(c) - 1
    prec = bits_for(digits)

    if deg == 1:
        r = Fraction(-c[0]) / Fraction(c[1])
        return [to_mpc(r, prec)]

    scale = max(abs(float(Fraction(x))) for x in c)
    seeds = np.roots([float(Fraction(x) / scale) for x in reversed(c)])

    dc = [i * x for i, x in enumerate(c)][1:]
    with workprec(prec):
        zs = [gmpy2.mpc(complex(s)) for s in seeds]
        # tiny deterministic perturbation to split accidental collisions
        for i in range(len(zs)):
            zs[i] += gmpy2.mpc(i + 1, 2 * i + 1) * gmpy2.mpfr(2) ** -45
        target = gmpy2.mpfr(2) ** (-prec + GUARD_BITS // 2)
        cs = [to_mpc(Fraction(x), prec) for x in c]
        dcs = [to_mpc(Fraction(x), prec) for x in dc]

        def ev(poly, z):
            acc = gmpy2.mpc(0)
            for k in reversed(poly):
                acc = acc * z + k
            return acc

        for _ in range(200):
            moved = gmpy2.mpfr(0)
            for i in range(deg):
                z = zs[i]
                pv = ev(cs, z)
                dv = ev(dcs, z)
                s = gmpy2.mpc(0)
                for j in range(deg):
                    if j != i:
                        s += 1 / (z - zs[j])
                denom = dv - pv * s
                if denom == 0:
                    continue
                w = pv / denom
                zs[i] = z - w
                moved = max(moved, abs(w) / max(abs(z), gmpy2.mpfr(1)))
            if moved < target:
                break
        else:
            raise NumericError("root refinement did not converge")
        # final residual check against the scaled polynomial
        bound = gmpy2.mpfr(2) ** (-prec + GUARD_BITS)
        for z in zs:
            rel = abs(ev(cs, z)) / (scale * max(abs(z), gmpy2.mpfr(1)) ** deg)
            if rel > bound:
                raise NumericError("root residual too large")
    zs.sort(key=lambda z: (z.real, z.imag))
    return zs


def mpc_to_decimal_string(z, digits):
    with gmpy2.local_context(gmpy2.context(), precision=bits_for(digits)):
        fmt = "{:." + str(digits) + "e}"
        return fmt.format(z.real), fmt.format(z.imag)
