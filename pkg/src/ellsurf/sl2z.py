"""Exact SL2(Z) algebra: fibre-type recognition, conjugators, factorisations.

Conventions used throughout the package:

* matrices act on column vectors;
* factorisation lists are stored as (G1, ..., Gr) with composed product
  Gr * ... * G1, i.e. G1 is applied first;
* simple loops are counterclockwise, so a nodal fibre has monodromy
  conjugate to U = [[1,1],[0,1]] (never to its inverse).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import InternalInconsistency, NotI1, NotKodaira, NotQuasiUnipotent, NotSL2


@dataclass(frozen=True)
class Mat2Z:
    """2x2 integer matrix with exact arithmetic."""

    a: int
    b: int
    c: int
    d: int

    def __mul__(self, other: "Mat2Z") -> "Mat2Z":
        return Mat2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2Z":
        return Mat2Z(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, n: int) -> "Mat2Z":
        if n < 0:
            return self.inv() ** (-n)
        r, base = IDENTITY, self
        while n:
            if n & 1:
                r = base * r
            base = base * base
            n >>= 1
        return r

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def inv(self) -> "Mat2Z":
        if self.det != 1:
            raise NotSL2(f"cannot invert {self} in SL2(Z)")
        return Mat2Z(self.d, -self.b, -self.c, self.a)

    def apply(self, v):
        """Matrix-vector product on an integer pair."""
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    @staticmethod
    def from_rows(rows) -> "Mat2Z":
        (a, b), (c, d) = rows
        return Mat2Z(int(a), int(b), int(c), int(d))

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = Mat2Z(1, 0, 0, 1)
U = Mat2Z(1, 1, 0, 1)
V = Mat2Z(1, 0, -1, 1)
S = Mat2Z(0, -1, 1, 0)


@dataclass(frozen=True)
class KodairaType:
    """Fibre type tag: kind in {I, II, III, IV, I*, II*, III*, IV*}, nu for the
    two infinite families (nu >= 1 for I, nu >= 0 for I*)."""

    kind: str
    nu: int = 0

    def __post_init__(self):
        if self.kind not in ("I", "II", "III", "IV", "I*", "II*", "III*", "IV*"):
            raise ValueError(f"unknown fibre kind {self.kind!r}")
        if self.kind == "I" and self.nu < 1:
            raise ValueError("type I requires nu >= 1")
        if self.kind == "I*" and self.nu < 0:
            raise ValueError("type I* requires nu >= 0")
        if self.kind not in ("I", "I*") and self.nu != 0:
            raise ValueError(f"type {self.kind} carries no nu")

    @property
    def euler(self) -> int:
        if self.kind == "I":
            return self.nu
        if self.kind == "I*":
            return self.nu + 6
        return {"II": 2, "III": 3, "IV": 4, "II*": 10, "III*": 9, "IV*": 8}[self.kind]

    @property
    def components(self) -> int:
        # equal to the factorisation length for I_nu, one less otherwise
        return self.euler if self.kind == "I" else self.euler - 1

    @property
    def label(self) -> str:
        if self.kind == "I":
            return f"I{self.nu}"
        if self.kind == "I*":
            return f"I{self.nu}*"
        return self.kind

    def __str__(self):
        return self.label


def standard_representative(t: KodairaType) -> Mat2Z:
    """Class representative M_T of the type's SL2(Z)-conjugacy class."""
    if t.kind == "I":
        return Mat2Z(1, t.nu, 0, 1)
    if t.kind == "I*":
        return Mat2Z(-1, -t.nu, 0, -1)
    return {
        "II": Mat2Z(1, 1, -1, 0),
        "III": Mat2Z(0, 1, -1, 0),
        "IV": Mat2Z(0, 1, -1, -1),
        "II*": Mat2Z(0, -1, 1, 1),
        "III*": Mat2Z(0, -1, 1, 0),
        "IV*": Mat2Z(-1, -1, 1, 0),
    }[t.kind]


def minimal_factorisation(t: KodairaType) -> list[Mat2Z]:
    """Factor M_T into nodal-type letters, returned as (G1, ..., Gr) with
    product Gr...G1 = M_T.  Every letter is U or V, each conjugate to U."""
    # words written in matrix-product order (leftmost letter applied last)
    if t.kind == "I":
        word = [U] * t.nu
    elif t.kind == "I*":
        word = [U] * t.nu + [V, U] * 3
    else:
        word = {
            "II": [V, U],
            "III": [V, U, V],
            "IV": [V, U] * 2,
            "II*": [V, U] * 5,
            "III*": [V, U, V] + [V, U] * 3,
            "IV*": [V, U] * 4,
        }[t.kind]
    return list(reversed(word))


ALL_FINITE_KINDS = ("II", "III", "IV", "II*", "III*", "IV*")


def _verify_table():
    types = [KodairaType("I", n) for n in range(1, 5)]
    types += [KodairaType("I*", n) for n in range(0, 5)]
    types += [KodairaType(k) for k in ALL_FINITE_KINDS]
    for t in types:
        fac = minimal_factorisation(t)
        prod = IDENTITY
        for g in fac:
            prod = g * prod
        if prod != standard_representative(t) or len(fac) != t.euler:
            raise InternalInconsistency(f"factorisation table broken for {t}")


_verify_table()


def _primitive_column(m: Mat2Z):
    """Primitive vector spanning the column space of M - I (trace-2 M != I),
    sign-fixed so the first nonzero entry is positive."""
    e = [[m.a - 1, m.b], [m.c, m.d - 1]]
    col = (e[0][0], e[1][0])
    if col == (0, 0):
        col = (e[0][1], e[1][1])
    g = gcd(col[0], col[1])
    d = (col[0] // g, col[1] // g)
    lead = d[0] if d[0] != 0 else d[1]
    if lead < 0:
        d = (-d[0], -d[1])
    return d, e


def pl_decompose(m: Mat2Z):
    """Split a nodal monodromy as M = I + d*m with d a primitive column whose
    first nonzero entry is positive.  Returns (d, m) as integer pairs."""
    if m.det != 1:
        raise NotI1(f"{m} is not in SL2(Z)")
    if m.trace != 2 or m == IDENTITY:
        raise NotI1(f"{m} is not of type I1")
    d, e = _primitive_column(m)
    k = 0 if d[0] != 0 else 1
    row = e[k]
    if row[0] % d[k] or row[1] % d[k]:
        raise NotI1(f"{m} - I is not a rank-one integer outer product")
    mv = (row[0] // d[k], row[1] // d[k])
    if (d[0] * mv[0], d[0] * mv[1], d[1] * mv[0], d[1] * mv[1]) != (
        e[0][0], e[0][1], e[1][0], e[1][1],
    ):
        raise NotI1(f"{m} - I is not d*m")
    return d, mv


def _complete_primitive(d):
    """Unimodular matrix with first column the primitive vector d."""
    x, y = d
    g, u, v = _xgcd(x, y)
    assert g == 1
    # det [[x, -v],[y, u]] = xu + vy = 1
    return Mat2Z(x, -v, y, u)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _classify_parabolic(m: Mat2Z):
    """For trace-2 m != I, return (nu, A) with m = A U^nu A^-1, nu > 0.

    Raises NotKodaira when m is conjugate to U^-nu (clockwise nodal loop,
    impossible for an algebraic family with counterclockwise loops)."""
    d, _ = _primitive_column(m)
    a = _complete_primitive(d)
    red = a.inv() * m * a
    # red = [[1, lam],[0, 1]]
    lam = red.b
    if red != Mat2Z(1, lam, 0, 1):
        raise InternalInconsistency(f"parabolic reduction failed for {m}")
    if lam <= 0:
        raise NotKodaira(f"{m} is conjugate to U^{lam}, not a Kodaira class")
    return lam, a


class _QuadPoint:
    """Exact point (p + q*sqrt(-D))/r of the upper half-plane, q > 0, r > 0."""

    __slots__ = ("p", "q", "r", "D")

    def __init__(self, p, q, r, D):
        g = gcd(gcd(abs(p), abs(q)), abs(r))
        if g:
            p, q, r = p // g, q // g, r // g
        if r < 0:
            p, q, r = -p, -q, -r
        assert q > 0 and r > 0
        self.p, self.q, self.r, self.D = p, q, r, D

    def real(self) -> Fraction:
        return Fraction(self.p, self.r)

    def norm2(self) -> Fraction:
        return Fraction(self.p * self.p + self.q * self.q * self.D, self.r * self.r)

    def translate(self, n: int) -> "_QuadPoint":
        return _QuadPoint(self.p + n * self.r, self.q, self.r, self.D)

    def invert_neg(self) -> "_QuadPoint":
        # tau -> -1/tau
        return _QuadPoint(-self.p * self.r, self.q * self.r,
                          self.p * self.p + self.q * self.q * self.D, self.D)

    def equals(self, p, q, r) -> bool:
        return (self.p, self.q, self.r) == (p, q, r)


def _classify_elliptic(m: Mat2Z):
    """Traces -1, 0, 1: reduce the fixed point into the fundamental domain."""
    tr = m.trace
    disc = 4 - tr * tr  # 3 or 4
    if m.c == 0:
        raise InternalInconsistency("elliptic matrix with c = 0")
    # fixed point ((a-d) + i sqrt(disc)) / (2c), imaginary part made positive
    if m.c > 0:
        tau = _QuadPoint(m.a - m.d, 1, 2 * m.c, disc)
    else:
        tau = _QuadPoint(m.d - m.a, 1, -2 * m.c, disc)
    w = IDENTITY
    while True:
        n = _round_half_up(tau.real())
        if n:
            tau = tau.translate(-n)
            w = (U ** (-n)) * w
        n2 = tau.norm2()
        if n2 < 1 or (n2 == 1 and tau.real() > 0):
            tau = tau.invert_neg()
            w = S * w
        else:
            break
    reduced = w * m * w.inv()
    if disc == 4:
        candidates = [KodairaType("III"), KodairaType("III*")]
        if not tau.equals(0, 1, 2):
            raise InternalInconsistency("order-4 fixed point did not reduce to i")
    else:
        candidates = [KodairaType(k) for k in ("II", "II*", "IV", "IV*")]
        if not tau.equals(-1, 1, 2):
            raise InternalInconsistency("order-3/6 fixed point did not reduce to zeta3")
    for t in candidates:
        if reduced == standard_representative(t):
            return t, w.inv()
    raise NotKodaira(f"{m} does not reduce to a Kodaira representative")


def _round_half_up(x: Fraction) -> int:
    from math import floor
    return floor(x + Fraction(1, 2))


@dataclass(frozen=True)
class ConjugacyWitness:
    type: KodairaType
    conjugator: Mat2Z  # A with M = A * M_T * A^-1

    def verify(self, m: Mat2Z) -> bool:
        mt = standard_representative(self.type)
        return self.conjugator * mt * self.conjugator.inv() == m


def kodaira_classify(m: Mat2Z) -> ConjugacyWitness:
    """Recognize the fibre type of a monodromy matrix.

    Returns (T, A) with M = A M_T A^-1 exactly; A is some valid conjugator,
    not canonical."""
    if m.det != 1:
        raise NotSL2(f"det {m} = {m.det} != 1")
    tr = m.trace
    if tr < -2 or tr > 2:
        raise NotQuasiUnipotent(f"trace {tr} outside [-2, 2]")
    if m == IDENTITY:
        raise NotKodaira("identity monodromy: no singular fibre")
    if tr == 2:
        nu, a = _classify_parabolic(m)
        witness = ConjugacyWitness(KodairaType("I", nu), a)
    elif tr == -2:
        if m == -IDENTITY:
            witness = ConjugacyWitness(KodairaType("I*", 0), IDENTITY)
        else:
            nu, a = _classify_parabolic(-m)
            witness = ConjugacyWitness(KodairaType("I*", nu), a)
    else:
        t, a = _classify_elliptic(m)
        witness = ConjugacyWitness(t, a)
    if not witness.verify(m):
        raise InternalInconsistency(f"conjugator check failed for {m}")
    return witness
