"""Cubic pencils over Q[t]: critical values and the fibre-period ODE.

The period of the residue form of 1/P_t satisfies a second order equation
Lambda = a(t) d^2 + b(t) d + c(t).  It is computed by pole-order reduction
against the Jacobian ideal, performed exactly at many integer values of t,
followed by modular nullspace interpolation and rational reconstruction of
the coefficient polynomials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import gmpy2
import sympy

from . import numutil, polyutil
from .numutil import workprec
from .errors import (
    DegeneratePencil,
    InternalInconsistency,
    IsotrivialError,
    NoZeroSection,
    NotHomogeneousDegree3,
    SingularReduction,
)

X, Y, Z = sympy.symbols("X Y Z")
T = sympy.Symbol("t")
_VARS = (X, Y, Z)


def monomials_deg(d):
    return [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


MON1 = monomials_deg(1)
MON2 = monomials_deg(2)
MON3 = monomials_deg(3)
MON4 = monomials_deg(4)
MON6 = monomials_deg(6)


@dataclass(frozen=True)
class CubicPencil:
    """Degree-3 form in X, Y, Z with integer t-polynomial coefficients,
    content-normalized.  The zero section [0:1:0] lies on every fibre."""

    coeff: tuple  # ((mono, t-coeff tuple), ...) sorted by monomial
    tdeg: int

    def coeff_map(self):
        return {m: list(c) for m, c in self.coeff}

    def expression(self):
        expr = sympy.Integer(0)
        for (i, j, k), c in self.coeff:
            tp = sum(sympy.Integer(v) * T ** n for n, v in enumerate(c))
            expr += tp * X ** i * Y ** j * Z ** k
        return sympy.expand(expr)

    def eval_xyz(self, t0):
        """Coefficient dict at an exact parameter value."""
        return {m: polyutil.peval(c, t0) for m, c in self.coeff}


def pencil_from_map(cmap) -> CubicPencil:
    """Validate and normalize a {(i,j,k): t-coefficient list} mapping."""
    clean = {}
    for mono, cs in cmap.items():
        cs = polyutil.trim(cs)
        if not cs:
            continue
        if len(mono) != 3 or sum(mono) != 3 or min(mono) < 0:
            raise NotHomogeneousDegree3(f"monomial {mono} is not cubic in X, Y, Z")
        clean[mono] = cs
    if not clean:
        raise NotHomogeneousDegree3("zero polynomial")
    if (0, 3, 0) in clean:
        raise NoZeroSection("P(0,1,0) must vanish identically: no Y^3 term allowed")
    den = 1
    for cs in clean.values():
        for x in cs:
            f = Fraction(x)
            den = den * f.denominator // gcd(den, f.denominator)
    ints = {m: [int(Fraction(x) * den) for x in cs] for m, cs in clean.items()}
    g = 0
    for cs in ints.values():
        for x in cs:
            g = gcd(g, abs(x))
    ints = {m: [x // g for x in cs] for m, cs in ints.items()}
    tdeg = max(len(cs) - 1 for cs in ints.values())
    # the generic fibre must be smooth at the section point [0:1:0]:
    # grad P there is (c_{X Y^2}, 3 c_{Y^3}=0, c_{Y^2 Z}) and must not vanish
    if not ints.get((1, 2, 0)) and not ints.get((0, 2, 1)):
        raise DegeneratePencil("generic fibre is singular at the section [0:1:0]")
    return CubicPencil(tuple(sorted((m, tuple(c)) for m, c in ints.items())), tdeg)


def _partial_map(cmap, axis):
    out = {}
    for mono, cs in cmap.items():
        e = mono[axis]
        if e:
            new = list(mono)
            new[axis] -= 1
            key = tuple(new)
            cur = out.get(key, [])
            out[key] = polyutil.padd(cur, polyutil.pscale(cs, e))
    return out


def _tderiv_map(cmap):
    return {m: polyutil.pderiv(cs) for m, cs in cmap.items() if polyutil.pderiv(cs)}


def _map_mul(a, b):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            key = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
            out[key] = polyutil.padd(out.get(key, []), polyutil.pmul(c1, c2))
    return {m: c for m, c in out.items() if c}


def _mono_mul(cmap, mono):
    return {
        (m[0] + mono[0], m[1] + mono[1], m[2] + mono[2]): c for m, c in cmap.items()
    }


def _vector_of(cmap_at_t, monos):
    return [cmap_at_t.get(m, 0) for m in monos]


# --- critical values ---

_CHARTS = (
    # (substitutions applied to (X, Y, Z), chart variables)
    ({Z: 1}, (X, Y)),
    ({Y: 1}, (X, Z)),
    ({X: 1}, (Y, Z)),
)

_SHEARS = (
    {X: X + 2 * Z, Y: Y + 3 * Z},
    {X: X - Z, Y: Y + 2 * Z},
)


def _candidate_factors(p_expr):
    """Irreducible t-polynomials whose roots may carry singular fibres."""
    grads = [sympy.expand(sympy.diff(p_expr, v)) for v in _VARS]
    factors = {}
    for subs, (u, v) in _CHARTS:
        g = [sympy.expand(gr.subs(subs)) for gr in grads]
        pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
        got = False
        for a, b, c in pairs:
            try:
                r1 = sympy.resultant(g[a], g[b], u)
                r2 = sympy.resultant(g[a], g[c], u)
                if r1 == 0 or r2 == 0:
                    continue
                r = sympy.resultant(sympy.expand(r1), sympy.expand(r2), v)
            except sympy.polys.polyerrors.PolynomialError:
                continue
            if r == 0:
                continue
            rpoly = sympy.Poly(r, T)
            for f, _ in rpoly.factor_list()[1]:
                if f.degree(T) >= 1:
                    key = sympy.Poly(f, T)
                    factors[tuple(key.all_coeffs())] = key
            got = True
            break
        if not got:
            continue
    return list(factors.values())


def _chart_systems(p_expr):
    """Per chart: the three gradient polynomials as {(i,j): t-coeff list}."""
    systems = []
    grads = [sympy.expand(sympy.diff(p_expr, v)) for v in _VARS]
    chart_list = list(_CHARTS)
    for shear in _SHEARS:
        sheared = sympy.expand(p_expr.subs({X: shear[X], Y: shear[Y]}, simultaneous=True))
        sh_grads = [sympy.expand(sympy.diff(sheared, v)) for v in _VARS]
        systems.append(_grids(sh_grads, {Z: 1}, (X, Y)))
    for subs, (u, v) in chart_list:
        systems.insert(0, _grids(grads, subs, (u, v)))
    return systems


def _grids(grads, subs, uv):
    u, v = uv
    out = []
    for g in grads:
        expr = sympy.expand(g.subs(subs))
        poly = sympy.Poly(expr, u, v, T)
        grid = {}
        for (du, dv, dt), coeff in poly.terms():
            key = (du, dv)
            cur = grid.setdefault(key, [])
            while len(cur) <= dt:
                cur.append(0)
            cur[dt] += int(coeff)
        out.append(grid)
    return out


def _eval_grid(grid, t0, prec):
    """Bivariate complex coefficient dict at numeric t0."""
    return {
        uv: numutil.horner(cs, t0, prec)
        for uv, cs in grid.items()
        if polyutil.trim(cs)
    }


def _biv_eval(g, x, y):
    acc = gmpy2.mpc(0)
    for (du, dv), c in g.items():
        acc += c * x ** du * y ** dv
    return acc


def _biv_eval_abs(g, x, y):
    """Sum of absolute term values: the cancellation scale at (x, y)."""
    ax, ay = abs(x), abs(y)
    acc = gmpy2.mpfr(0)
    for (du, dv), c in g.items():
        acc += abs(c) * ax ** du * ay ** dv
    return acc


def _uni_coeffs(g, y, maxdeg):
    """Coefficients in u of a bivariate dict evaluated at v = y."""
    out = [gmpy2.mpc(0)] * (maxdeg + 1)
    for (du, dv), c in g.items():
        out[du] += c * y ** dv
    return out


def _mpc_roots(coeffs):
    """Roots of a small complex polynomial via Durand-Kerner, at the caller's
    working precision.  Multiple roots converge to about half precision."""
    cs = list(coeffs)
    prec = gmpy2.get_context().precision
    cut = max(abs(c) for c in cs) * gmpy2.mpfr(2) ** (-prec + 8) if cs else 0
    while cs and abs(cs[-1]) <= cut:
        cs.pop()
    if len(cs) <= 1:
        return []
    n = len(cs) - 1
    lead = cs[-1]
    monic = [c / lead for c in cs]
    zs = [gmpy2.mpc(0.4, 0.9) ** k + gmpy2.mpc(k, 1) * gmpy2.mpfr(2) ** -20 for k in range(n)]
    stop = gmpy2.mpfr(2) ** (-(6 * prec) // 10)
    for _ in range(60 + 4 * prec):
        moved = gmpy2.mpfr(0)
        for i in range(n):
            z = zs[i]
            num = gmpy2.mpc(0)
            for c in reversed(monic):
                num = num * z + c
            den = gmpy2.mpc(1)
            for j in range(n):
                if j != i:
                    den *= z - zs[j]
            if den == 0:
                continue
            w = num / den
            zs[i] = z - w
            moved = max(moved, abs(w))
        if moved < stop:
            break
    return zs


def _fibre_singular_at(systems, t0, prec, tol):
    """Does some projective point annihilate all three gradients at t0?"""
    with workprec(prec):
        for grids in systems:
            g = [_eval_grid(grid, t0, prec) for grid in grids]
            if not g[0]:
                continue
            for a, b, c in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
                if not g[a] or not g[b]:
                    continue
                du_max = max(k[0] for k in g[a])
                res_grid = _sylvester_resultant_v(g[a], g[b])
                if res_grid is None:
                    continue
                for y0 in _mpc_roots(res_grid):
                    for x0 in _mpc_roots(_uni_coeffs(g[a], y0, du_max)):
                        rel = gmpy2.mpfr(0)
                        for gi in g:
                            den = _biv_eval_abs(gi, x0, y0) + gmpy2.mpfr(1)
                            rel = max(rel, abs(_biv_eval(gi, x0, y0)) / den)
                        if rel < tol:
                            return True
    return False


def _sylvester_resultant_v(ga, gb):
    """Resultant in the first variable as a complex polynomial in the second,
    via evaluation-interpolation on the second variable."""
    da = max(k[0] for k in ga)
    db = max(k[0] for k in gb)
    if da == 0 and db == 0:
        return None
    dv = max(k[1] for k in ga) * db + max(k[1] for k in gb) * da + 1
    ys = [gmpy2.mpc(Fraction(j + 2, 7), Fraction(3, 11)) for j in range(dv + 1)]
    vals = []
    for y in ys:
        ca = _uni_coeffs(ga, y, da)
        cb = _uni_coeffs(gb, y, db)
        vals.append(_sylvester_det(ca, cb))
    # Lagrange interpolation coefficients are not needed; return value pairs
    return _interp_poly(ys, vals)


def _sylvester_det(ca, cb):
    da = len(ca) - 1
    db = len(cb) - 1
    n = da + db
    if n == 0:
        return gmpy2.mpc(1)
    m = [[gmpy2.mpc(0)] * n for _ in range(n)]
    for r in range(db):
        for i, c in enumerate(reversed(ca)):
            m[r][r + i] = c
    for r in range(da):
        for i, c in enumerate(reversed(cb)):
            m[db + r][r + i] = c
    det = gmpy2.mpc(1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) == 0:
            return gmpy2.mpc(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if abs(f):
                for cc in range(col, n):
                    m[r][cc] -= f * m[col][cc]
    return det


def _interp_poly(xs, vals):
    n = len(xs)
    coeffs = [gmpy2.mpc(0)] * n
    for x0, v in zip(xs, vals):
        num = [gmpy2.mpc(1)]
        den = gmpy2.mpc(1)
        for x1 in xs:
            if x1 is not x0:
                num = [
                    (num[i - 1] if i else gmpy2.mpc(0)) - x1 * (num[i] if i < len(num) else gmpy2.mpc(0))
                    for i in range(len(num) + 1)
                ]
                den *= x0 - x1
        f = v / den
        for i, c in enumerate(num):
            coeffs[i] += f * c
    return coeffs


def critical_value_polynomial(pencil: CubicPencil, digits: int = 60):
    """Squarefree integer polynomial whose roots are the finite parameters
    with a singular fibre."""
    p_expr = pencil.expression()
    factors = _candidate_factors(p_expr)
    systems = _chart_systems(p_expr)
    prec = numutil.bits_for(digits)
    # subsidiary root solving loses half precision at multiple roots
    tol = gmpy2.mpfr(10) ** (-digits // 3)
    kept = []
    for f in factors:
        coeffs = [int(c) for c in reversed(f.all_coeffs())]
        roots = numutil.roots_int_poly(coeffs, digits)
        if _fibre_singular_at(systems, roots[0], prec, tol):
            kept.append(coeffs)
    # a pencil that is singular at a generic parameter is rejected
    probe = Fraction(10**6 + 3, 7)
    if _fibre_singular_at(systems, probe, prec, tol):
        raise DegeneratePencil("fibre is singular at a generic parameter")
    if not kept:
        raise DegeneratePencil("no singular fibre found; surface would be a product")
    out = [1]
    for f in kept:
        out = polyutil.pmul(out, f)
    return polyutil.primitive_int(out)


# --- Picard-Fuchs via Griffiths-Dwork reduction at integer parameters ---

class _Reducer:
    """Exact pole-order reduction machinery for one pencil."""

    def __init__(self, pencil: CubicPencil):
        cmap = pencil.coeff_map()
        self.p = cmap
        self.partials = [_partial_map(cmap, axis) for axis in range(3)]
        self.pt = _tderiv_map(cmap)
        self.ptt = _tderiv_map(self.pt)
        self.pt2 = _map_mul(self.pt, self.pt)
        # columns of the degree-3 Jacobian block: x_j * dP/dx_i
        self.cols2 = [
            _mono_mul(self.partials[i], mono) for i in range(3) for mono in MON1
        ]
        # columns of the degree-6 Jacobian block: u * dP/dx_i, u of degree 4
        self.cols3 = [
            _mono_mul(self.partials[i], mono) for i in range(3) for mono in MON4
        ]
        self.q_index = None  # chosen cubic monomial completing the basis

    def columns_at(self, t0):
        c2 = [
            _vector_of({m: polyutil.peval(c, t0) for m, c in col.items()}, MON3)
            for col in self.cols2
        ]
        c3 = [
            _vector_of({m: polyutil.peval(c, t0) for m, c in col.items()}, MON6)
            for col in self.cols3
        ]
        return c2, c3

    def choose_q(self, t0):
        c2, _ = self.columns_at(t0)
        rows = [[col[r] for col in c2] for r in range(len(MON3))]
        for qi in range(len(MON3)):
            trial = [row[:] + [1 if r == qi else 0] for r, row in enumerate(rows)]
            if _rank_frac(trial) == 10:
                self.q_index = qi
                return
        raise SingularReduction("no cubic monomial completes the Jacobian block")

    def reduce2(self, avec, c2):
        """Coordinates (mu, lam) of a cubic numerator over P^2."""
        mat = [[col[r] for col in c2] + [1 if r == self.q_index else 0]
               for r in range(len(MON3))]
        sol = _solve_square_frac(mat, avec)
        if sol is None:
            return None
        lam = sol[9]
        # divergence of (B1, B2, B3): B_i = sum over MON1 of coeff * mono
        mu = Fraction(0)
        for i in range(3):
            for j, mono in enumerate(MON1):
                if mono[i] == 1:
                    mu += sol[3 * i + j]
        return mu, lam

    def reduce3(self, avec, c3):
        """Cubic numerator equal to half the divergence of a Jacobian
        preimage of a sextic numerator."""
        rows = [[col[r] for col in c3] for r in range(len(MON6))]
        sol = _solve_any_int(rows, avec)
        if sol is None:
            return None
        div = {m: Fraction(0) for m in MON3}
        for i in range(3):
            for j, mono in enumerate(MON4):
                coeff = sol[len(MON4) * i + j]
                if coeff and mono[i] > 0:
                    new = list(mono)
                    new[i] -= 1
                    div[tuple(new)] += coeff * mono[i]
        return [x / 2 for x in _vector_of(div, MON3)]


def _rank_frac(rows):
    a = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(a)) if a[r][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for r in range(len(a)):
            if r != row and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        row += 1
        rank += 1
        if row == len(a):
            break
    return rank


def _solve_square_frac(mat, rhs):
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _solve_any_int(rows, rhs):
    """One rational solution of an underdetermined integer system, free
    variables set to zero; None if inconsistent."""
    m = len(rows)
    a = [[Fraction(x) for x in rows[i]] + [Fraction(rhs[i])] for i in range(m)]
    ncols = len(rows[0])
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, m) if a[r][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if a[r][ncols]:
            return None
    sol = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        sol[col] = a[r][ncols]
    return sol


@dataclass(frozen=True)
class DiffOperator:
    """Second order operator a(t) d^2 + b(t) d + c(t), integer coefficients,
    content 1, positive leading coefficient of a."""

    a: tuple
    b: tuple
    c: tuple

    @property
    def order(self) -> int:
        return 2

    @property
    def degree(self) -> int:
        return max(polyutil.degree(list(self.a)),
                   polyutil.degree(list(self.b)),
                   polyutil.degree(list(self.c)))

    def singular_polynomial(self):
        """Squarefree part of the leading coefficient."""
        return polyutil.squarefree_part(list(self.a))

    def to_json(self):
        return {
            "a": [str(x) for x in self.a],
            "b": [str(x) for x in self.b],
            "c": [str(x) for x in self.c],
        }


_PRIME_SEED = (1 << 61) - 1


def _prime_stream():
    p = _PRIME_SEED
    while True:
        p = int(sympy.nextprime(p))
        yield p


def _frac_mod(x: Fraction, p: int):
    den = x.denominator % p
    if den == 0:
        return None
    return x.numerator % p * pow(den, -1, p) % p


def _rational_reconstruct(a, m):
    """Balanced rational n/d = a (mod m) with |n|, d <= sqrt(m/2)."""
    bound = int((m // 2) ** 0.5)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if abs(s1) > bound or s1 == 0:
        return None
    if gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _nullspace_mod_p(rows, p):
    """(pivot columns, one normalized nullvector) of the system mod p, or
    None when a denominator hits the prime."""
    a = []
    for row in rows:
        arow = []
        for x in row:
            v = _frac_mod(x, p) if isinstance(x, Fraction) else x % p
            if v is None:
                return None
            arow.append(v)
        a.append(arow)
    m = len(a)
    ncols = len(a[0])
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, m) if a[r][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = pow(a[row][col], -1, p)
        a[row] = [x * inv % p for x in a[row]]
        for r in range(m):
            if r != row and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return pivots, None
    # normalized nullvector: first free column set to 1, others 0
    f0 = free[0]
    vec = [0] * ncols
    vec[f0] = 1
    for r, col in enumerate(pivots):
        vec[col] = (-a[r][f0]) % p
    return pivots, vec


def _collect_samples(pencil, reducer, needed, samples, critical):
    t0 = samples[-1][0] + 1 if samples else 2
    while len(samples) < needed:
        if polyutil.peval(critical, t0) == 0:
            t0 += 1
            continue
        c2, c3 = reducer.columns_at(t0)
        if reducer.q_index is None:
            reducer.choose_q(t0)
        pt_vec = _vector_of(
            {m: polyutil.peval(c, t0) for m, c in reducer.pt.items()}, MON3
        )
        r1 = reducer.reduce2([-x for x in pt_vec], c2)
        pt2_vec = _vector_of(
            {m: polyutil.peval(c, t0) for m, c in reducer.pt2.items()}, MON6
        )
        c3red = reducer.reduce3([2 * x for x in pt2_vec], c3)
        if r1 is None or c3red is None:
            t0 += 1
            continue
        ptt_vec = _vector_of(
            {m: polyutil.peval(c, t0) for m, c in reducer.ptt.items()}, MON3
        )
        a3 = [x - y for x, y in zip(c3red, ptt_vec)]
        r2 = reducer.reduce2(a3, c2)
        if r2 is None:
            t0 += 1
            continue
        mu1, lam1 = r1
        mu2, lam2 = r2
        samples.append((t0, mu2, mu1, lam2, lam1))
        t0 += 1
    return samples


def _sample_rows(samples, deg):
    rows = []
    for t0, mu2, mu1, lam2, lam1 in samples:
        powers = [Fraction(t0) ** j for j in range(deg + 1)]
        rows.append([mu2 * pw for pw in powers]
                    + [mu1 * pw for pw in powers]
                    + [pw for pw in powers])
        rows.append([lam2 * pw for pw in powers]
                    + [lam1 * pw for pw in powers]
                    + [Fraction(0)] * (deg + 1))
    return rows


def picard_fuchs(pencil: CubicPencil, critical=None, max_degree: int = 140) -> DiffOperator:
    """Minimal second order operator annihilating the fibre periods."""
    if critical is None:
        critical = critical_value_polynomial(pencil)
    reducer = _Reducer(pencil)
    samples = []
    _collect_samples(pencil, reducer, 30, samples, critical)
    if all(s[4] == 0 for s in samples):
        raise IsotrivialError("periods satisfy a first order equation")

    primes = _prime_stream()
    p0 = next(primes)
    p1 = next(primes)
    found_deg = None
    for deg in range(1, max_degree + 1):
        needed = (3 * (deg + 1) + 1) // 2 + 6
        _collect_samples(pencil, reducer, needed, samples, critical)
        rows = _sample_rows(samples[:needed], deg)
        res = _nullspace_mod_p(rows, p0)
        if res is None or res[1] is None:
            continue
        res1 = _nullspace_mod_p(rows, p1)
        if res1 is None or res1[1] is None:
            continue
        found_deg = deg
        break
    if found_deg is None:
        raise SingularReduction(f"no operator of coefficient degree <= {max_degree}")

    deg = found_deg
    needed = (3 * (deg + 1) + 1) // 2 + 6
    rows = _sample_rows(samples[:needed], deg)
    ncols = 3 * (deg + 1)

    residues = {}
    modulus = 1
    pivots_ref = None
    vec = None
    for p in itertools.chain([p0, p1], primes):
        res = _nullspace_mod_p(rows, p)
        if res is None or res[1] is None:
            continue
        pivots, nv = res
        if pivots_ref is None:
            pivots_ref = pivots
        elif pivots != pivots_ref:
            continue
        residues[p] = nv
        modulus = 1
        acc = [0] * ncols
        for q, rv in residues.items():
            if modulus == 1:
                acc = list(rv)
                modulus = q
            else:
                minv = pow(modulus % q, -1, q)
                acc = [
                    (x + modulus * ((y - x) * minv % q)) % (modulus * q)
                    for x, y in zip(acc, rv)
                ]
                modulus *= q
        cand = [_rational_reconstruct(x, modulus) for x in acc]
        if any(v is None for v in cand):
            if len(residues) > 40:
                raise SingularReduction("rational reconstruction failed")
            continue
        if _verify_operator(cand, samples, deg):
            vec = cand
            break
    if vec is None:
        raise SingularReduction("operator reconstruction failed")

    a = polyutil.trim(vec[0:deg + 1])
    b = polyutil.trim(vec[deg + 1:2 * (deg + 1)])
    c = polyutil.trim(vec[2 * (deg + 1):])
    if not a:
        raise IsotrivialError("leading coefficient vanishes: first order equation")
    # clear the common rational scale across all three polynomials
    den = 1
    for x in a + b + c:
        f = Fraction(x)
        den = den * f.denominator // gcd(den, f.denominator)
    ai = [int(Fraction(x) * den) for x in a]
    bi = [int(Fraction(x) * den) for x in b]
    ci = [int(Fraction(x) * den) for x in c]
    g = 0
    for x in ai + bi + ci:
        g = gcd(g, abs(x))
    ai = [x // g for x in ai]
    bi = [x // g for x in bi]
    ci = [x // g for x in ci]
    if ai[-1] < 0:
        ai, bi, ci = [-x for x in ai], [-x for x in bi], [-x for x in ci]
    return DiffOperator(tuple(ai), tuple(bi), tuple(ci))


def _verify_operator(vec, samples, deg):
    a = vec[0:deg + 1]
    b = vec[deg + 1:2 * (deg + 1)]
    c = vec[2 * (deg + 1):]
    for t0, mu2, mu1, lam2, lam1 in samples:
        av = polyutil.peval(a, Fraction(t0))
        bv = polyutil.peval(b, Fraction(t0))
        cv = polyutil.peval(c, Fraction(t0))
        if av * mu2 + bv * mu1 + cv != 0:
            return False
        if av * lam2 + bv * lam1 != 0:
            return False
    return True
