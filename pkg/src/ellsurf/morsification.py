"""Formal splitting of singular fibres into nodal fibres.

Each monodromy matrix M_v = A M_T A^-1 is replaced, in place, by the
conjugated letters of the minimal normal factorisation of M_T.  No deformed
surface is built; the ordered matrix list plus provenance ranges is the whole
artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import zlattice
from .errors import IndexOutOfRange, InternalInconsistency
from .sl2z import (
    IDENTITY,
    ConjugacyWitness,
    KodairaType,
    Mat2Z,
    kodaira_classify,
    minimal_factorisation,
    pl_decompose,
)


@dataclass(frozen=True)
class Loop:
    """One generator of the fundamental group: a critical value (None for a
    formal input or the fibre at infinity) and its monodromy matrix."""

    matrix: Mat2Z
    value: Optional[complex] = None
    at_infinity: bool = False


@dataclass(frozen=True)
class MonodromyRep:
    loops: tuple
    basepoint: Optional[complex] = None

    def __post_init__(self):
        for lp in self.loops:
            if lp.matrix.det != 1:
                raise InternalInconsistency(f"{lp.matrix} is not in SL2(Z)")

    @property
    def matrices(self):
        return [lp.matrix for lp in self.loops]

    def total_product(self) -> Mat2Z:
        prod = IDENTITY
        for lp in self.loops:
            prod = lp.matrix * prod
        return prod


def attach_infinity(rep: MonodromyRep) -> MonodromyRep:
    """Append the fibre at infinity when the finite loops do not compose to
    the identity.  The counterclockwise loop around infinity carries the
    inverse of the composed finite product."""
    prod = rep.total_product()
    if prod == IDENTITY:
        return rep
    m_inf = prod.inv()
    kodaira_classify(m_inf)  # raises if the input cannot close up
    return MonodromyRep(rep.loops + (Loop(m_inf, None, True),), rep.basepoint)


@dataclass(frozen=True)
class FibreBlock:
    lo: int  # first thimble index (0-based, inclusive)
    hi: int  # last thimble index (inclusive)
    type: KodairaType
    conjugator: Mat2Z
    matrix: Mat2Z  # the original monodromy of this fibre
    value: Optional[complex] = None
    at_infinity: bool = False

    @property
    def size(self):
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class MorsifiedRep:
    matrices: tuple  # N nodal-type matrices
    blocks: tuple  # one FibreBlock per original fibre, in order
    pl: tuple  # (d, m) pairs of each letter
    basepoint: Optional[complex] = None

    @property
    def size(self) -> int:
        return len(self.matrices)

    @property
    def euler(self) -> int:
        return len(self.matrices)

    def finite_block_count(self) -> int:
        return sum(1 for b in self.blocks if not b.at_infinity)


def morsify(rep: MonodromyRep) -> MorsifiedRep:
    """Split every fibre into nodal letters, preserving per-fibre products."""
    matrices = []
    blocks = []
    for lp in rep.loops:
        w: ConjugacyWitness = kodaira_classify(lp.matrix)
        a = w.conjugator
        a_inv = a.inv()
        letters = [a * g * a_inv for g in minimal_factorisation(w.type)]
        lo = len(matrices)
        matrices.extend(letters)
        hi = len(matrices) - 1
        prod = IDENTITY
        for g in letters:
            prod = g * prod
        if prod != lp.matrix:
            raise InternalInconsistency(f"split of {lp.matrix} does not multiply back")
        blocks.append(FibreBlock(lo, hi, w.type, a, lp.matrix, lp.value, lp.at_infinity))
    pl = tuple(pl_decompose(m) for m in matrices)
    return MorsifiedRep(tuple(matrices), tuple(blocks), pl, rep.basepoint)


def fibre_component_vectors(mor: MorsifiedRep, v: int):
    """Thimble-coordinate basis of the components of fibre v that miss the
    zero section: the kernel of the boundary map restricted to the block.

    For I_nu blocks the chain basis is sign-alternated so the lifted Gram is
    the tridiagonal (-2, -1) matrix; other types get the generic saturated
    kernel basis."""
    if not 0 <= v < len(mor.blocks):
        raise IndexOutOfRange(f"fibre index {v} out of range")
    block = mor.blocks[v]
    n = mor.size
    if block.type.kind == "I":
        vecs = []
        for j in range(block.size - 1):
            x = [0] * n
            sign = 1 if j % 2 == 0 else -1
            x[block.lo + j] = sign
            x[block.lo + j + 1] = -sign
            vecs.append(x)
        return vecs
    dmat = [[mor.pl[i][0][r] for i in range(block.lo, block.hi + 1)] for r in range(2)]
    local = zlattice.kernel_basis(dmat, ncols=block.size)
    vecs = []
    for col in zlattice.columns(local):
        x = [0] * n
        for j, val in enumerate(col):
            x[block.lo + j] = val
        vecs.append(x)
    if len(vecs) != block.type.components - 1:
        raise InternalInconsistency(
            f"fibre {v}: kernel rank {len(vecs)} != components - 1"
        )
    return vecs


def transport(mor: MorsifiedRep, word, gamma):
    """Push a fibre cycle through a word of signed original-loop indices
    (1-based; negative = inverse loop, leftmost letter applied first)."""
    g = (int(gamma[0]), int(gamma[1]))
    for letter in word:
        block = _block_of(mor, letter)
        m = block.matrix if letter > 0 else block.matrix.inv()
        g = m.apply(g)
    return g


def _block_of(mor: MorsifiedRep, letter: int) -> FibreBlock:
    v = abs(letter) - 1
    if letter == 0 or not 0 <= v < len(mor.blocks):
        raise IndexOutOfRange(f"loop index {letter} out of range")
    return mor.blocks[v]


def extension_to_thimbles(mor: MorsifiedRep, word, gamma):
    """Thimble coordinates of the extension of gamma along the word.

    Folds the composition rule tau_{l'l} = tau_l + tau_{l'} . l_* letter by
    letter, expanding each original loop into its nodal letters; an inverse
    letter uses tau_{l^-1}(g) = -tau_l(l^-1_* g)."""
    vec = [0] * mor.size
    g = (int(gamma[0]), int(gamma[1]))
    for letter in word:
        block = _block_of(mor, letter)
        if letter > 0:
            acc = g
            for i in range(block.lo, block.hi + 1):
                mv = mor.pl[i][1]
                vec[i] += mv[0] * acc[0] + mv[1] * acc[1]
                acc = mor.matrices[i].apply(acc)
            g = acc
        else:
            g = block.matrix.inv().apply(g)
            acc = g
            for i in range(block.lo, block.hi + 1):
                mv = mor.pl[i][1]
                vec[i] -= mv[0] * acc[0] + mv[1] * acc[1]
                acc = mor.matrices[i].apply(acc)
    return vec
