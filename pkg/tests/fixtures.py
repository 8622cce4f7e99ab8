"""Shared fixtures: the rank-19 elliptic K3 monodromy data and helpers."""

from ellsurf.morsification import Loop, MonodromyRep
from ellsurf.sl2z import Mat2Z

# Monodromy matrices of the 16 singular fibres of the elliptic K3 with
# Picard rank 19 (Mordell-Weil rank 9, torsion Z/2).
M1 = Mat2Z(7, 9, -4, -5)
MU = Mat2Z(1, 1, 0, 1)
MA = Mat2Z(3, 1, -4, -1)
MB = Mat2Z(3, 2, -2, -1)

K3_MATRICES = [
    M1,   # 1
    MU,   # 2
    MU,   # 3
    MA,   # 4
    MB,   # 5
    MB,   # 6
    MB,   # 7
    MB,   # 8
    MA,   # 9
    MB,   # 10
    MA,   # 11
    MA,   # 12
    MB,   # 13
    MB,   # 14
    MU,   # 15
    MB,   # 16
]


def k3_rep():
    return MonodromyRep(tuple(Loop(m) for m in K3_MATRICES))


# The Legendre pencil Y^2 Z - X(X-Z)(X-tZ) written out.
LEGENDRE_PENCIL = "Y^2*Z - X*(X - Z)*(X - t*Z)"

# The defining cubic of the K3 above.
K3_A = "93273*t^4 + 58840*t^3 + 102618*t^2 + 35680*t + 14485"
K3_B = (
    "-8590032*t^8 - 78412620*t^7 + 17011856*t^6 + 241822775*t^5"
    " - 19459741*t^4 - 127136490*t^3 + 16161642*t^2 + 15406335*t - 2083725"
)
K3_PENCIL = f"X^3 + 4*({K3_A})*X^2*Z + 512*({K3_B})*X*Z^2 - Y^2*Z"
