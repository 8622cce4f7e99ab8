"""Numerical analytic continuation of the fibre-period operator.

Transition matrices are computed by Taylor stepping with step length capped
at half the distance to the nearest singular point; error control is
heuristic (guard bits plus digit-doubling consistency in the test suite),
not certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

import gmpy2

from . import numutil, polyutil
from .errors import (
    EllsurfError,
    InternalInconsistency,
    LatticeRecoveryFailure,
    NumericError,
    ProportionalVanishingCycles,
    StepTooClose,
)
from .griffiths_dwork import DiffOperator
from .morsification import Loop, MonodromyRep
from .numutil import bits_for, workprec
from .sl2z import IDENTITY, Mat2Z, kodaira_classify


def numeric_roots(coeffs, digits):
    """Roots of a squarefree rational polynomial, sorted by (Re, Im)."""
    return numutil.roots_int_poly(coeffs, digits, require_squarefree=True)


@dataclass(frozen=True)
class LoopPath:
    """Closed polygon based at the plan basepoint encircling one root
    counterclockwise; vertices are exact rationals (re, im)."""

    root_index: int  # index into the plan's root list
    vertices: tuple  # ((Fraction, Fraction), ...), first == last == basepoint


@dataclass(frozen=True)
class PathPlan:
    basepoint: Fraction
    roots: tuple  # encircled points as (Fraction, Fraction) approximations
    loops: tuple  # LoopPath per root, in composition order l_1, ..., l_r
    margin: Fraction

    def loop_order(self):
        return [lp.root_index for lp in self.loops]

    def to_json(self):
        def fr(x):
            return str(x)

        return {
            "basepoint": fr(self.basepoint),
            "margin": fr(self.margin),
            "roots": [[fr(a), fr(b)] for a, b in self.roots],
            "loops": [
                {
                    "root_index": lp.root_index,
                    "vertices": [[fr(a), fr(b)] for a, b in lp.vertices],
                }
                for lp in self.loops
            ],
        }


def _snap(x, grid):
    return Fraction(round(Fraction(x) / grid)) * grid


def _frac_of_mpfr(x, scale_bits=120):
    m = gmpy2.mpfr(x)
    num = int(gmpy2.rint(m * (1 << scale_bits)))
    return Fraction(num, 1 << scale_bits)


def build_distinguished_loops(
    roots,
    basepoint: Optional[Fraction] = None,
    margin: Fraction = Fraction(1, 4),
    avoid=(),
    prec: int = 200,
):
    """Non-crossing counterclockwise lassos around the given points, ordered
    by angle (then modulus) as seen from a real basepoint left of everything.

    `avoid` lists extra points (apparent singularities) the polygons must
    keep away from; they are not encircled."""
    if not roots:
        raise InternalInconsistency("no roots to encircle")
    if not (0 < margin <= Fraction(1, 3)):
        raise ValueError("margin must lie in (0, 1/3]")
    with workprec(prec):
        pts = [gmpy2.mpc(z) for z in roots] + [gmpy2.mpc(z) for z in avoid]
        n = len(roots)
        res = [p.real for p in pts]
        ims = [p.imag for p in pts]
        lo = min(res)
        hi = max(res)
        spread = max(hi - lo, max(abs(v) for v in ims), gmpy2.mpfr(1))
        if basepoint is None:
            b_val = lo - spread / 2 - 1
            basepoint = Fraction(int(gmpy2.floor(b_val * 16)), 16)
        b = gmpy2.mpc(gmpy2.mpq(basepoint.numerator, basepoint.denominator))

        gaps = []
        for i, p in enumerate(pts):
            d = min(
                (abs(p - q) for j, q in enumerate(pts) if j != i),
                default=spread,
            )
            d = min(d, abs(p - b))
            gaps.append(d)
        radii = [gmpy2.mpfr(margin.numerator) / margin.denominator * g for g in gaps]

        mingap = min(gaps)
        grid = Fraction(1, 1 << max(8, int(-gmpy2.log2(mingap)) + 24))

        def snap_pt(z):
            return (_snap(_frac_of_mpfr(z.real), grid), _snap(_frac_of_mpfr(z.imag), grid))

        # order: angle from b increasing, then distance
        def key(i):
            z = pts[i] - b
            ang = gmpy2.atan2(z.imag, z.real)
            return (int(gmpy2.rint(ang * gmpy2.mpfr(10) ** 35)),
                    int(gmpy2.rint(abs(z) * gmpy2.mpfr(10) ** 30)))

        order = sorted(range(n), key=key)

        loops = []
        for i in order:
            c = pts[i]
            r_i = radii[i]
            u = (b - c) / abs(b - c)
            entry = c + r_i * u
            spoke = _spoke(b, entry, pts, radii, i, prec)
            # octagon counterclockwise starting and ending at the entry point
            base_ang = gmpy2.atan2(u.imag, u.real)
            ring = []
            for k in range(1, 8):
                ang = base_ang + gmpy2.const_pi() * k / 4
                ring.append(c + r_i * gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang)))
            verts = spoke + ring + list(reversed(spoke))
            snapped = [snap_pt(z) for z in verts]
            loops.append(LoopPath(i, tuple(_dedup(snapped))))
        root_pts = [snap_pt(pts[i]) for i in range(n)]
        return PathPlan(basepoint, tuple(root_pts), tuple(loops), margin)


def _dedup(verts):
    out = [verts[0]]
    for v in verts[1:]:
        if v != out[-1]:
            out.append(v)
    if out[0] != out[-1]:
        out.append(out[0])
    return out


def _spoke(b, entry, pts, radii, target, prec):
    """Polyline from b to the entry point with detours around foreign disks.

    The minimal-rotation arc stays on the side the straight segment already
    passes, preserving its homotopy class; an exactly pierced obstacle is
    passed on the left, matching the closer-first ordering convention."""
    out = [b]
    d = entry - b
    length = abs(d)
    u = d / length
    events = []
    for j, p in enumerate(pts):
        if j == target:
            continue
        r = radii[j] * gmpy2.mpfr("1.02")
        # projection parameter of p on the segment
        w = p - b
        s = (w.real * u.real + w.imag * u.imag)
        if s <= 0 or s >= length:
            continue
        foot = b + s * u
        dist = abs(p - foot)
        if dist >= r:
            continue
        half = gmpy2.sqrt(r * r - dist * dist)
        events.append((s, half, p, r))
    events.sort(key=lambda e: e[0])
    pi = gmpy2.const_pi()
    for s, half, p, r in events:
        s0 = s - half * gmpy2.mpfr("1.1")
        s1 = s + half * gmpy2.mpfr("1.1")
        a0 = b + s0 * u
        a1 = b + s1 * u
        ang0 = gmpy2.atan2((a0 - p).imag, (a0 - p).real)
        ang1 = gmpy2.atan2((a1 - p).imag, (a1 - p).real)
        diff = ang1 - ang0
        while diff > pi:
            diff -= 2 * pi
        while diff < -pi:
            diff += 2 * pi
        # near a straight hit the short way is ambiguous: force the left
        # side, i.e. a clockwise sweep as seen from the obstacle
        if abs(abs(diff) - pi) < gmpy2.mpfr("0.2"):
            diff = -abs(diff)
        steps = 4
        out.append(a0)
        for k in range(1, steps):
            ang = ang0 + diff * k / steps
            out.append(p + r * gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang)))
        out.append(a1)
    out.append(entry)
    return out


# --- Taylor transport ---

class Transporter:
    """Fundamental-solution transport for one operator at fixed precision,
    optionally accumulating integrals den(t) I' = num(t) y along the way."""

    def __init__(self, op: DiffOperator, prec: int, forms=(), step_ratio=Fraction(1, 2)):
        self.op = op
        self.prec = prec
        self.step_ratio = step_ratio
        with workprec(prec):
            self.a = [gmpy2.mpc(x) for x in op.a]
            self.b = [gmpy2.mpc(x) for x in op.b]
            self.c = [gmpy2.mpc(x) for x in op.c]
            self.sing = numutil.roots_int_poly(
                op.singular_polynomial(), max(60, int(prec / 3.33)),
            )
            # forms: (num, den) integer coefficient pairs
            self.forms = [
                ([gmpy2.mpc(x) for x in num], [gmpy2.mpc(x) for x in den])
                for num, den in forms
            ]

    def _min_sing_dist(self, z):
        return min((abs(z - s) for s in self.sing), default=gmpy2.mpfr("inf"))

    def segment_margin_ok(self, z0, z1, margin_scale):
        """Distance from the segment to every singular point must exceed the
        scaled local margin."""
        d = z1 - z0
        length = abs(d)
        if length == 0:
            return True
        u = d / length
        for s in self.sing:
            w = s - z0
            t = w.real * u.real + w.imag * u.imag
            t = max(gmpy2.mpfr(0), min(length, t))
            foot = z0 + t * u
            if abs(s - foot) < margin_scale * self._local_gap(s):
                return False
        return True

    def _local_gap(self, s):
        return min(
            (abs(s - q) for q in self.sing if q is not s), default=gmpy2.mpfr(1)
        )

    def transport(self, vertices, state=None, check_margin=None):
        """Continue the fundamental system along a polygon.

        state: (S, Q) with S the 2x2 solution matrix (columns = solutions,
        rows = value/derivative) and Q the s x 2 accumulated integrals; both
        default to identity / zero at the path start."""
        with workprec(self.prec):
            s_mat = [[gmpy2.mpc(1), gmpy2.mpc(0)], [gmpy2.mpc(0), gmpy2.mpc(1)]]
            q_mat = [[gmpy2.mpc(0), gmpy2.mpc(0)] for _ in self.forms]
            if state is not None:
                s_mat = [row[:] for row in state[0]]
                q_mat = [row[:] for row in state[1]]
            pts = [self._to_mpc(v) for v in vertices]
            for z0, z1 in zip(pts, pts[1:]):
                if check_margin is not None and not self.segment_margin_ok(
                    z0, z1, check_margin
                ):
                    raise StepTooClose(
                        f"segment {complex(z0)} -> {complex(z1)} violates the margin"
                    )
                self._segment(z0, z1, s_mat, q_mat)
            return s_mat, q_mat

    def _to_mpc(self, v):
        if isinstance(v, tuple):
            re, im = v
            return gmpy2.mpc(
                gmpy2.mpq(re.numerator, re.denominator),
                gmpy2.mpq(im.numerator, im.denominator),
            )
        return gmpy2.mpc(v)

    def _segment(self, z0, z1, s_mat, q_mat):
        cur = z0
        total = abs(z1 - z0)
        if total == 0:
            return
        u = (z1 - z0) / total
        done = gmpy2.mpfr(0)
        ratio = gmpy2.mpfr(self.step_ratio.numerator) / self.step_ratio.denominator
        while done < total:
            dist = self._min_sing_dist(cur)
            if dist == 0:
                raise StepTooClose("expansion point is singular")
            h_len = min(ratio * dist, total - done)
            h = h_len * u
            self._step(cur, h, s_mat, q_mat)
            done += h_len
            cur += h

    def _step(self, z, h, s_mat, q_mat):
        prec = self.prec
        eps = gmpy2.mpfr(2) ** (-prec - 10)
        a = _shift(self.a, z)
        b = _shift(self.b, z)
        c = _shift(self.c, z)
        da, db, dc = len(a) - 1, len(b) - 1, len(c) - 1
        a0 = a[0]
        if abs(a0) == 0:
            raise StepTooClose("leading coefficient vanishes at expansion point")
        shifted_forms = [
            (_shift(num, z), _shift(den, z)) for num, den in self.forms
        ]
        n_cap = 8 * prec + 256
        for col in range(2):
            y0, y1 = s_mat[0][col], s_mat[1][col]
            coeffs = [y0, y1]
            val = y0 + y1 * h
            der = y1
            hpow = h * h
            scale = max(abs(y0), abs(y1), gmpy2.mpfr(1))
            n = 0
            small = 0
            while True:
                # coefficient of x^n of (a y'' + b y' + c y) = 0
                acc = gmpy2.mpc(0)
                for k in range(1, min(da, n) + 1):
                    acc += a[k] * ((n + 2 - k) * (n + 1 - k)) * coeffs[n + 2 - k]
                for k in range(0, min(db, n) + 1):
                    acc += b[k] * (n + 1 - k) * coeffs[n + 1 - k]
                for k in range(0, min(dc, n) + 1):
                    acc += c[k] * coeffs[n - k]
                cn2 = -acc / (a0 * (n + 2) * (n + 1))
                coeffs.append(cn2)
                term = cn2 * hpow
                val += term
                der += (n + 2) * cn2 * hpow / h
                hpow *= h
                n += 1
                if abs(term) < eps * scale:
                    small += 1
                    if small >= 4 and n > max(da, db, dc) + 4:
                        break
                else:
                    small = 0
                if n > n_cap:
                    raise NumericError("Taylor series did not converge")
            for fi, (num, den) in enumerate(shifted_forms):
                q_mat[fi][col] += _integrate_series(num, den, coeffs, h, prec)
            s_mat[0][col] = val
            s_mat[1][col] = der

    # columns of s_mat updated in place; q_mat accumulates integrals


def _shift(coeffs, z):
    out = list(coeffs)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + z * out[j + 1]
    return out


def _integrate_series(num, den, ycoeffs, h, prec):
    """Value at x=h of I with den(x) I' = num(x) y(x), I(0) = 0."""
    eps = gmpy2.mpfr(2) ** (-prec - 10)
    dnum, dden = len(num) - 1, len(den) - 1
    den0 = den[0]
    if abs(den0) == 0:
        raise StepTooClose("form has a pole at expansion point")
    icoef = [gmpy2.mpc(0)]
    total = gmpy2.mpc(0)
    hpow = h
    n_terms = len(ycoeffs)
    small = 0
    n = 0
    while True:
        # coefficient of x^n in num*y - den'*... solve den * I' = num * y
        rhs = gmpy2.mpc(0)
        for k in range(0, min(dnum, n) + 1):
            if n - k < n_terms:
                rhs += num[k] * ycoeffs[n - k]
        for k in range(1, min(dden, n) + 1):
            rhs -= den[k] * (n + 1 - k) * icoef[n + 1 - k]
        i_next = rhs / (den0 * (n + 1))
        icoef.append(i_next)
        term = i_next * hpow
        total += term
        hpow *= h
        n += 1
        if abs(term) < eps:
            small += 1
            if small >= 4 and n >= n_terms:
                break
        else:
            small = 0
        if n > n_terms + 8 * prec + 256:
            raise NumericError("integral series did not converge")
    return total


@dataclass
class NumericMonodromy:
    matrices: list  # per loop: 2x2 nested list of mpc
    prec: int
    plan: PathPlan


def numeric_monodromy(op: DiffOperator, plan: PathPlan, digits: int) -> NumericMonodromy:
    prec = bits_for(digits)
    tr = Transporter(op, prec)
    out = []
    with workprec(prec):
        for lp in plan.loops:
            s_mat, _ = tr.transport(lp.vertices)
            det = s_mat[0][0] * s_mat[1][1] - s_mat[0][1] * s_mat[1][0]
            if abs(det - 1) > gmpy2.mpfr(2) ** (-prec // 3):
                raise NumericError("transport determinant drifted from 1")
            out.append(s_mat)
    return NumericMonodromy(out, prec, plan)


def local_monodromy(op: DiffOperator, center, radius, digits: int):
    """Transport around a small counterclockwise square centred at a point."""
    prec = bits_for(digits)
    tr = Transporter(op, prec)
    with workprec(prec):
        c = gmpy2.mpc(center)
        r = gmpy2.mpfr(radius)
        verts = [
            c + r, c + r * gmpy2.mpc(0, 1), c - r, c - r * gmpy2.mpc(0, 1), c + r,
        ]
        s_mat, _ = tr.transport(verts)
        return s_mat


# --- integral structure recovery ---

def _mat_mul(a, b):
    return [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]


def _mat_inv(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]


def _mat_vec(a, v):
    return [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]


def _parabolic_fixed_vector(n_mat, tol):
    """Fixed vector of a parabolic power of the matrix, or None."""
    cur = [[gmpy2.mpc(1), gmpy2.mpc(0)], [gmpy2.mpc(0), gmpy2.mpc(1)]]
    for _ in range(1, 7):
        cur = _mat_mul(cur, n_mat)
        tr = cur[0][0] + cur[1][1]
        off = max(abs(cur[0][1]), abs(cur[1][0]), abs(cur[0][0] - 1))
        if abs(tr - 2) < tol and off > tol:
            v1 = [cur[0][1], 1 - cur[0][0]]
            v2 = [1 - cur[1][1], cur[1][0]]
            v = v1 if max(abs(v1[0]), abs(v1[1])) > max(abs(v2[0]), abs(v2[1])) else v2
            norm = max(abs(v[0]), abs(v[1]))
            return [v[0] / norm, v[1] / norm]
    return None


def _round_fraction(x, max_den, tol):
    """Nearest fraction with bounded denominator, or None."""
    if abs(x.imag) > tol:
        return None
    v = x.real
    p0, q0, p1, q1 = 0, 1, 1, 0
    val = v
    for _ in range(64):
        a = int(gmpy2.floor(val))
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        if q1 > max_den:
            return None
        approx = Fraction(p1, q1)
        err = abs(v - gmpy2.mpfr(approx.numerator) / approx.denominator)
        if err < tol:
            return approx
        frac = val - a
        if frac == 0:
            return None
        val = 1 / frac
    return None


def _lattice_key(basis):
    """Homothety-normalized key of a rational lattice basis (columns)."""
    from . import zlattice

    den = 1
    for row in basis:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    ints = [[int(x * den) for x in row] for row in basis]
    h = zlattice.row_hnf(zlattice.columns(ints))
    flat = [x for row in h for x in row]
    g = 0
    for x in flat:
        g = gcd(g, abs(x))
    return tuple(x // g for x in flat) if g else tuple(flat)


def _lattice_contains(basis, vec):
    det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]
    x = (vec[0] * basis[1][1] - vec[1] * basis[0][1]) / det
    y = (-vec[0] * basis[1][0] + vec[1] * basis[0][0]) / det
    return x.denominator == 1 and y.denominator == 1


def _lattice_closed(basis, rka):
    cols = [[basis[0][0], basis[1][0]], [basis[0][1], basis[1][1]]]
    for rk in rka:
        for u in cols:
            img = [
                rk[0][0] * u[0] + rk[0][1] * u[1],
                rk[1][0] * u[0] + rk[1][1] * u[1],
            ]
            if not _lattice_contains(basis, img):
                return False
    return True


def _closure_lattice(rka):
    """Smallest lattice containing Z^2 closed under the rational matrices."""
    from . import zlattice

    basis = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    for _ in range(128):
        if _lattice_closed(basis, rka):
            return basis
        vecs = [[basis[0][0], basis[1][0]], [basis[0][1], basis[1][1]]]
        new_vecs = list(vecs)
        for rk in rka:
            for u in vecs:
                new_vecs.append([
                    rk[0][0] * u[0] + rk[0][1] * u[1],
                    rk[1][0] * u[0] + rk[1][1] * u[1],
                ])
        den = 1
        for u in new_vecs:
            for x in u:
                den = den * x.denominator // gcd(den, x.denominator)
        rows = [[int(x * den) for x in u] for u in new_vecs]
        h = zlattice.row_hnf(rows)
        if len(h) != 2:
            raise LatticeRecoveryFailure("monodromy orbit is not a rank-2 lattice")
        basis = [
            [Fraction(h[0][0], den), Fraction(h[1][0], den)],
            [Fraction(h[0][1], den), Fraction(h[1][1], den)],
        ]
    raise LatticeRecoveryFailure("lattice closure did not stabilize")


def _closed_superlattices(rka, base, levels=5, primes=(2, 3, 5, 7)):
    """Monodromy-closed superlattices of the base, up to homothety, found by
    repeated index-p extension.  Deterministic order."""
    seen = {_lattice_key(base)}
    out = [base]
    frontier = [base]
    for _ in range(levels):
        new_frontier = []
        for lat in frontier:
            b1 = [lat[0][0], lat[1][0]]
            b2 = [lat[0][1], lat[1][1]]
            for p in primes:
                gens = [(1, 0)] + [(k, 1) for k in range(p)]
                for x, y in gens:
                    v = [
                        (x * b1[0] + y * b2[0]) / p,
                        (x * b1[1] + y * b2[1]) / p,
                    ]
                    if (x, y) == (1, 0):
                        cand = [[v[0], b2[0]], [v[1], b2[1]]]
                    else:
                        cand = [[b1[0], v[0]], [b1[1], v[1]]]
                    key = _lattice_key(cand)
                    if key in seen:
                        continue
                    seen.add(key)
                    if _lattice_closed(cand, rka):
                        out.append(cand)
                        new_frontier.append(cand)
        frontier = new_frontier
        if not frontier:
            break
    return out


def _classifiable_types(seq):
    """Kodaira types of the loop matrices plus the closing fibre, or None."""
    try:
        total = IDENTITY
        types = []
        for m in seq:
            types.append(kodaira_classify(m).type)
            total = m * total
        euler = sum(t.euler for t in types)
        if total != IDENTITY:
            t_inf = kodaira_classify(total.inv()).type
            euler += t_inf.euler
        return types, euler
    except EllsurfError:
        return None


def gauss_reduce_pair(w1, w2):
    """Gauss-reduced basis of the lattice Z w1 + Z w2 in the complex plane."""
    a, b = w1, w2
    for _ in range(256):
        if abs(a) > abs(b):
            a, b = b, a
        n2 = abs(a) ** 2
        if n2 == 0:
            raise InternalInconsistency("degenerate complex lattice")
        mu = (b * a.conjugate()).real / n2
        k = int(gmpy2.rint(mu))
        if k == 0:
            return a, b
        b = b - k * a
    raise InternalInconsistency("lattice reduction did not terminate")


def _same_lattice_shape(pair_a, pair_b, tol):
    """Are the complex lattices homothetic?  Checked via a small search over
    unimodular basis changes between the Gauss-reduced bases."""
    a1, a2 = gauss_reduce_pair(*pair_a)
    b1, b2 = gauss_reduce_pair(*pair_b)
    ta = a2 / a1
    for p in range(-2, 3):
        for q in range(-2, 3):
            for r in range(-2, 3):
                for s in range(-2, 3):
                    if p * s - q * r not in (1, -1):
                        continue
                    den = p + q * ta
                    if abs(den) < tol:
                        continue
                    tb = (r + s * ta) / den
                    if abs(tb - b2 / b1) < tol or abs(tb - (b2 / b1).conjugate()) < tol:
                        return True
    return False


def integral_structure(nm: NumericMonodromy, fibre_lattice_pair=None):
    """Basis change P with P^-1 N_i P integral, and the integer monodromy.

    Returns (P, rep, residual).  P retains a global scale ambiguity, which
    rescales all periods uniformly and cancels in every lattice invariant.
    Among monodromy-closed candidate lattices whose matrices carry
    counterclockwise Kodaira classes, the true one is selected by matching
    the homothety class of the candidate period lattice at the basepoint
    against `fibre_lattice_pair`, the directly integrated fibre periods."""
    prec = nm.prec
    with workprec(prec):
        tol = gmpy2.mpfr(2) ** (-prec // 3)
        mats = nm.matrices
        v = None
        for n_mat in mats:
            v = _parabolic_fixed_vector(n_mat, tol)
            if v is not None:
                break
        if v is None:
            for i in range(len(mats)):
                for j in range(i + 1, len(mats)):
                    v = _parabolic_fixed_vector(_mat_mul(mats[j], mats[i]), tol)
                    if v is not None:
                        break
                if v is not None:
                    break
        if v is None:
            raise LatticeRecoveryFailure("no parabolic monodromy found")
        w = None
        best = gmpy2.mpfr(0)
        for n_mat in mats:
            cand = [x - y for x, y in zip(_mat_vec(n_mat, v), v)]
            det = abs(v[0] * cand[1] - v[1] * cand[0])
            if det > best:
                best = det
                w = cand
        if w is None or best < tol:
            raise ProportionalVanishingCycles(
                "all vanishing directions proportional to the first"
            )
        p0 = [[v[0], w[0]], [v[1], w[1]]]
        p0_inv = _mat_inv(p0)

        ks = [_mat_mul(p0_inv, _mat_mul(n_mat, p0)) for n_mat in mats]
        rka = []
        for k in ks:
            rk = [[_round_fraction(k[r][c], 10**6, tol) for c in range(2)] for r in range(2)]
            if any(x is None for row in rk for x in row):
                raise LatticeRecoveryFailure(
                    "monodromy entries did not rationalize; raise precision"
                )
            rka.append(rk)

        base = _closure_lattice(rka)
        candidates = _closed_superlattices(rka, base)
        swap = Mat2Z(0, 1, 1, 0)
        survivors = []
        for cand in candidates:
            ints = []
            ok = True
            for rk in rka:
                det = cand[0][0] * cand[1][1] - cand[0][1] * cand[1][0]
                # K' = G^-1 K G over the rationals, must be integral
                g = cand
                ginv = [
                    [g[1][1] / det, -g[0][1] / det],
                    [-g[1][0] / det, g[0][0] / det],
                ]
                kp = [
                    [
                        sum(ginv[r][s] * rk[s][u] for s in range(2))
                        for u in range(2)
                    ]
                    for r in range(2)
                ]
                kp = [
                    [sum(kp[r][s] * g[s][u] for s in range(2)) for u in range(2)]
                    for r in range(2)
                ]
                if any(x.denominator != 1 for row in kp for x in row):
                    ok = False
                    break
                ints.append(Mat2Z(int(kp[0][0]), int(kp[0][1]), int(kp[1][0]), int(kp[1][1])))
            if not ok:
                continue
            res = _classifiable_types(ints)
            if res is not None:
                survivors.append((res[1], cand, ints, False))
                continue
            flipped = [swap * m * swap for m in ints]
            res = _classifiable_types(flipped)
            if res is not None:
                survivors.append((res[1], cand, flipped, True))
        if not survivors:
            raise LatticeRecoveryFailure(
                "no monodromy-closed lattice yields Kodaira-classifiable matrices"
            )
        survivors.sort(key=lambda s: (-s[0], _lattice_key(s[1])))

        def realize(lattice, flip):
            g_mpc = [
                [gmpy2.mpc(gmpy2.mpq(x.numerator, x.denominator)) for x in row]
                for row in lattice
            ]
            p = _mat_mul(p0, g_mpc)
            if flip:
                p = [[p[0][1], p[0][0]], [p[1][1], p[1][0]]]
            return p

        if len(survivors) > 1 or fibre_lattice_pair is not None:
            if fibre_lattice_pair is None:
                raise LatticeRecoveryFailure(
                    f"{len(survivors)} commensurable lattices classify; a fibre "
                    "period anchor is required to disambiguate"
                )
            shape_tol = gmpy2.mpfr(10) ** -12
            matching = []
            for cand in survivors:
                p = realize(cand[1], cand[3])
                pair = (p[0][0], p[0][1])  # basepoint values of the two
                # integral period functions are the first row of P
                if _same_lattice_shape(pair, fibre_lattice_pair, shape_tol):
                    matching.append(cand)
            if len(matching) != 1:
                raise LatticeRecoveryFailure(
                    f"{len(matching)} candidate lattices match the fibre shape"
                )
            survivors = matching

        _, lattice, ints, flip = survivors[0]
        p_final = realize(lattice, flip)
        p_inv = _mat_inv(p_final)
        residual = gmpy2.mpfr(0)
        for n_mat, m_int in zip(mats, ints):
            k = _mat_mul(p_inv, _mat_mul(n_mat, p_final))
            for r in range(2):
                for c in range(2):
                    ref = (m_int.a, m_int.b, m_int.c, m_int.d)[2 * r + c]
                    residual = max(residual, abs(k[r][c] - ref))
        if residual > tol:
            raise LatticeRecoveryFailure(
                f"integral rounding residual {float(residual):.2e} too large"
            )

        values = []
        for lp in nm.plan.loops:
            re, im = nm.plan.roots[lp.root_index]
            values.append(complex(Fraction(re), Fraction(im)))
        loops = tuple(Loop(m, val) for m, val in zip(ints, values))
        rep = MonodromyRep(loops, complex(nm.plan.basepoint))
        return p_final, rep, residual
