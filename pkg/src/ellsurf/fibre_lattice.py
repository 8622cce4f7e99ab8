"""Direct period lattice of one smooth fibre.

The defining cubic has no Y^3 term (the section [0:1:0] lies on every
fibre), so the affine chart Z = 1 is quadratic in y and the residue form
restricts to dx / sqrt(D(x)) with D the degree-<=4 discriminant in x.
Periods are contour integrals around pairs of branch points, evaluated by
the trapezoid rule on circles (geometric convergence for closed contours).
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2

from . import numutil, polyutil
from .errors import InternalInconsistency, NumericError
from .numutil import bits_for, workprec


def _chart_discriminant(pencil, t0):
    """Coefficients (ascending in x) of beta^2 - 4*alpha*gamma at t = t0."""
    vals = pencil.eval_xyz(t0)
    alpha = [Fraction(0)] * 2  # y^2 coefficient, linear in x
    beta = [Fraction(0)] * 3
    gamma = [Fraction(0)] * 4
    for (i, j, k), v in vals.items():
        if j == 2:
            alpha[i] += v
        elif j == 1:
            beta[i] += v
        elif j == 0:
            gamma[i] += v
        else:
            raise InternalInconsistency("cubic has a Y^3 term")
    disc = polyutil.padd(
        polyutil.pmul(beta, beta),
        polyutil.pscale(polyutil.pmul(alpha, gamma), -4),
    )
    return polyutil.trim(disc)


def fibre_period_lattice(pencil, t0: Fraction, digits: int):
    """Two generating periods (w1, w2) of the residue form on the fibre at
    the rational parameter t0, as gmpy2 mpc values."""
    disc = _chart_discriminant(pencil, t0)
    deg = polyutil.degree(disc)
    if deg < 3:
        raise NumericError("fibre discriminant degenerates; move the basepoint")
    branch = numutil.roots_int_poly(polyutil.primitive_int(disc), digits + 10)
    prec = bits_for(digits)
    with workprec(prec):
        lead = gmpy2.mpc(Fraction(disc[-1]))
        pts = list(branch)
        # pair consecutive branch points by proximity of the sorted list
        order = sorted(range(len(pts)), key=lambda i: (pts[i].real, pts[i].imag))
        e = [pts[i] for i in order]
        w1 = _pair_period(e, 0, 1, lead, deg, prec, digits)
        w2 = _pair_period(e, 1, 2, lead, deg, prec, digits)
        return w1, w2


def _sqrt_disc(e, lead, deg, x):
    """sqrt(D(x)) from the factored form, branch fixed by principal sqrts of
    the factors (continuity is handled by the caller along contours)."""
    acc = lead
    for r in e:
        acc = acc * (x - r)
    return gmpy2.sqrt(acc)


def _pair_period(e, i, j, lead, deg, prec, digits):
    """Contour integral of dx/sqrt(D) around branch points e[i], e[j]."""
    c = (e[i] + e[j]) / 2
    r_in = abs(e[i] - e[j]) / 2
    r_out = min(
        (abs(p - c) for k, p in enumerate(e) if k not in (i, j)),
        default=r_in * 4,
    )
    if r_out <= r_in:
        raise NumericError("branch points too entangled for a separating circle")
    radius = gmpy2.sqrt(r_in * r_out)
    target = gmpy2.mpfr(10) ** (-digits)
    pi2 = 2 * gmpy2.const_pi()
    n = 32
    prev = None
    while n <= 1 << 18:
        total = gmpy2.mpc(0)
        val_prev = None
        first = None
        for k in range(n):
            theta = pi2 * k / n
            x = c + radius * gmpy2.mpc(gmpy2.cos(theta), gmpy2.sin(theta))
            s = _sqrt_disc(e, lead, deg, x)
            if val_prev is not None and abs(s + val_prev) < abs(s - val_prev):
                s = -s  # keep the branch continuous
            if first is None:
                first = s
            val_prev = s
            dx = radius * gmpy2.mpc(-gmpy2.sin(theta), gmpy2.cos(theta)) * pi2 / n
            total += dx / s
        # closing the loop must return to the starting branch (even number of
        # enclosed branch points)
        s_close = _sqrt_disc(e, lead, deg, c + radius)
        if abs(s_close + val_prev) < abs(s_close - val_prev):
            s_close = -s_close
        if abs(s_close - first) > abs(s_close + first):
            raise NumericError("branch did not close up; wrong enclosure")
        if prev is not None and abs(total - prev) < target * max(abs(total), 1):
            return total
        prev = total
        n *= 2
    raise NumericError("fibre period integral did not converge")
