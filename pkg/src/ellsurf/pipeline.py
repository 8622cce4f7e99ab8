"""Input parsing, staged orchestration, caching and report emission."""

from __future__ import annotations

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .errors import NotHomogeneousDegree3, ParseError
from .griffiths_dwork import T, X, Y, Z, CubicPencil, pencil_from_map

_PARSE_TRANSFORMS = standard_transformations + (convert_xor,)
_ALLOWED = {"X": X, "Y": Y, "Z": Z, "t": T}


def parse_pencil(text: str) -> CubicPencil:
    """Parse a defining cubic from a string over X, Y, Z, t with rational
    coefficients (both ^ and ** exponent syntax accepted)."""
    try:
        expr = parse_expr(
            text, local_dict=dict(_ALLOWED), transformations=_PARSE_TRANSFORMS,
            evaluate=True,
        )
    except Exception as exc:
        raise ParseError(f"cannot parse pencil: {exc}") from exc
    bad = expr.free_symbols - set(_ALLOWED.values())
    if bad:
        raise ParseError(f"unexpected symbols {sorted(map(str, bad))}")
    expr = sympy.expand(expr)
    try:
        poly = sympy.Poly(expr, X, Y, Z, T, domain="QQ")
    except Exception as exc:
        raise ParseError(f"not a polynomial with rational coefficients: {exc}") from exc
    cmap = {}
    from fractions import Fraction

    for (i, j, k, dt), coeff in poly.terms():
        if i + j + k != 3:
            raise NotHomogeneousDegree3(
                f"monomial X^{i} Y^{j} Z^{k} has degree {i + j + k} != 3"
            )
        cur = cmap.setdefault((i, j, k), [])
        while len(cur) <= dt:
            cur.append(Fraction(0))
        r = sympy.Rational(coeff)
        cur[dt] += Fraction(int(r.p), int(r.q))
    return pencil_from_map(cmap)
