"""Second homology of the surface from its nodal monodromy letters.

Builds the boundary matrix B of vanishing cycles and the total extension map
T_inf, takes H = ker B / im T_inf, adjoins the fibre class F and the zero
section O, and equips everything with the intersection form.  The form is
accepted only because the invariant suite (unimodularity, signature, fibre
component Gram matrices) is enforced at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import zlattice
from .errors import (
    EulerNot12Multiple,
    InternalInconsistency,
    NotLefschetzInput,
    SpanFailure,
)
from .morsification import (
    IDENTITY,
    MorsifiedRep,
    extension_to_thimbles,
    fibre_component_vectors,
)
from .zlattice import GramLattice, QuotientGroup


@dataclass(frozen=True)
class SurfaceHomology:
    basis_size: int
    euler: int
    thimble_reps: tuple  # columns (as tuples) in Z^N for the extension part
    fibre_index: int
    section_index: int
    gram: GramLattice
    signature: tuple  # (positive, negative)
    component_embeddings: tuple  # per fibre: tuple of basis-coordinate tuples
    component_thimble_vectors: tuple  # per fibre: tuple of Z^N vectors
    morsified: MorsifiedRep
    quotient: QuotientGroup

    @property
    def geometric_genus(self) -> int:
        return self.euler // 12 - 1

    def project_to_basis(self, thimble_vec):
        """Coordinates in the homology basis of a boundary-free thimble
        vector, using the zero-pairing-with-O lift."""
        free, tors = self.quotient.project(thimble_vec)
        if any(tors):
            raise InternalInconsistency("thimble class has torsion coordinates")
        return list(free) + [0, 0]


def _pair_thimbles(x, y, sigma):
    """Intersection number of two boundary-free thimble combinations.

    Seifert-type form: crossings only occur between an earlier spoke and a
    later one, so the fibre pairing sigma enters one-sided.  On boundary-free
    vectors the two orderings differ only by sign, which makes this form
    symmetric there; antisymmetrizing instead double-counts and breaks the
    descent to the quotient (checked at construction time)."""
    n = len(x)
    total = 0
    for i in range(n):
        if x[i]:
            total -= x[i] * y[i]
            for j in range(i + 1, n):
                s = sigma[i][j]
                if s and y[j]:
                    total -= x[i] * y[j] * s
    return total


def thimble_gram(mor: MorsifiedRep, vectors):
    """Intersection matrix of boundary-free thimble combinations, computed
    directly from the vanishing-cycle data (no quotient needed)."""
    ds = [pl[0] for pl in mor.pl]
    n = mor.size
    sigma = [
        [ds[i][0] * ds[j][1] - ds[i][1] * ds[j][0] for j in range(n)]
        for i in range(n)
    ]
    return [[_pair_thimbles(x, y, sigma) for y in vectors] for x in vectors]


def homology_from_monodromy(mor: MorsifiedRep) -> SurfaceHomology:
    n = mor.size
    e = n
    if e % 12:
        raise EulerNot12Multiple(f"total Euler number {e} is not a multiple of 12")
    prod = IDENTITY
    for m in mor.matrices:
        prod = m * prod
    if prod != IDENTITY:
        raise NotLefschetzInput(
            "letters do not compose to the identity; attach the fibre at infinity first"
        )
    ds = [pl[0] for pl in mor.pl]
    ms = [pl[1] for pl in mor.pl]

    # B has the vanishing cycles as columns; T_inf row i is m_i transported
    # past the earlier letters.
    b = [[d[0] for d in ds], [d[1] for d in ds]]
    t_inf = []
    prefix = IDENTITY
    for i in range(n):
        mi = ms[i]
        t_inf.append([
            mi[0] * prefix.a + mi[1] * prefix.c,
            mi[0] * prefix.b + mi[1] * prefix.d,
        ])
        prefix = mor.matrices[i] * prefix
    bt = zlattice.matmul(b, t_inf)
    if any(x for row in bt for x in row):
        raise InternalInconsistency("im T_inf not contained in ker B")

    k_cols = zlattice.kernel_basis(b, ncols=n)
    quot = QuotientGroup(k_cols, t_inf)
    if quot.torsion:
        raise InternalInconsistency(
            f"extension quotient has torsion {quot.torsion}; unexpected input"
        )
    if quot.rank != e - 4:
        raise InternalInconsistency(
            f"extension quotient rank {quot.rank} != e - 4 = {e - 4}"
        )

    reps = [tuple(col) for col in zlattice.columns(quot.free_cols)]
    sigma = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sigma[i][j] = ds[i][0] * ds[j][1] - ds[i][1] * ds[j][0]

    # the form must vanish on the relations against the whole kernel
    for t_col in zlattice.columns(t_inf):
        for k_col in zlattice.columns(k_cols):
            if _pair_thimbles(t_col, k_col, sigma):
                raise InternalInconsistency("intersection form does not descend")

    size = e - 2
    fibre_index, section_index = e - 4, e - 3
    gram = [[0] * size for _ in range(size)]
    for i, x in enumerate(reps):
        for j in range(i, len(reps)):
            val = _pair_thimbles(x, reps[j], sigma)
            gram[i][j] = gram[j][i] = val
    gram[fibre_index][section_index] = gram[section_index][fibre_index] = 1
    gram[section_index][section_index] = -(e // 12)

    det = zlattice.det_int(gram)
    if det not in (1, -1):
        raise InternalInconsistency(f"homology Gram determinant {det} != +-1")
    pg = e // 12 - 1
    sig = zlattice.gram_signature(gram)
    if sig != (2 * pg + 1, e - 3 - 2 * pg, 0):
        raise InternalInconsistency(f"homology signature {sig} unexpected")

    comp_vecs = []
    comp_coords = []
    for v in range(len(mor.blocks)):
        vecs = fibre_component_vectors(mor, v)
        coords = []
        for x in vecs:
            free, tors = quot.project(x)
            if any(tors):
                raise InternalInconsistency("component class has torsion coordinates")
            coords.append(tuple(free) + (0, 0))
        comp_vecs.append(tuple(tuple(x) for x in vecs))
        comp_coords.append(tuple(coords))

    return SurfaceHomology(
        basis_size=size,
        euler=e,
        thimble_reps=tuple(reps),
        fibre_index=fibre_index,
        section_index=section_index,
        gram=GramLattice.from_rows(gram),
        signature=(sig[0], sig[1]),
        component_embeddings=tuple(comp_coords),
        component_thimble_vectors=tuple(comp_vecs),
        morsified=mor,
        quotient=quot,
    )


def intersection_gram(h: SurfaceHomology) -> GramLattice:
    return h.gram


def component_gram(h: SurfaceHomology, v: int):
    """Intersection matrix of the components of fibre v."""
    cols = zlattice.from_columns(
        [list(c) for c in h.component_embeddings[v]], nrows=h.basis_size
    )
    if not cols or not cols[0]:
        return []
    return zlattice.restrict_gram(h.gram.rows(), cols)


@dataclass(frozen=True)
class Extension:
    word: tuple  # signed 1-based original-loop indices, leftmost first
    cycle: tuple  # starting fibre cycle
    thimble_vector: tuple
    coords: tuple  # coordinates in the homology basis


@dataclass(frozen=True)
class PrimaryBasis:
    extensions: tuple  # Extension records, the Gamma_i
    component_coords: tuple  # flattened Theta coordinates in basis order
    change_of_basis: tuple  # columns of B' expressed in the homology basis
    determinant: int

    @property
    def rank(self) -> int:
        return len(self.change_of_basis)


def _primitive_fixed_vector(w):
    """Primitive integer kernel vector of W - I for W != I with det(W-I)=0."""
    p, q = w.a - 1, w.b
    r, s = w.c, w.d - 1
    cands = [(q, -p), (s, -r)]
    for x, y in cands:
        if x or y:
            from math import gcd
            g = gcd(x, y)
            x, y = x // g, y // g
            if x < 0 or (x == 0 and y < 0):
                x, y = -x, -y
            return (x, y)
    return None


def primary_basis(h: SurfaceHomology, max_word_length: int = 4) -> PrimaryBasis:
    """Extension classes spanning, with the fibre components, F and O, a
    finite-index sublattice of the full homology.

    Words run over the finite original loops only; enumeration is by length
    then lexicographic order, so the output is deterministic."""
    mor = h.morsified
    size = h.basis_size
    finite = [v + 1 for v in range(len(mor.blocks)) if not mor.blocks[v].at_infinity]
    alphabet = []
    for v in finite:
        alphabet.extend([v, -v])

    echelon = []  # Fraction row echelon of accepted coordinate vectors

    def try_add(coords):
        row = [Fraction(c) for c in coords]
        for piv_idx, piv_row in echelon:
            if row[piv_idx]:
                f = row[piv_idx] / piv_row[piv_idx]
                row = [a - f * b for a, b in zip(row, piv_row)]
        for idx, val in enumerate(row):
            if val:
                echelon.append((idx, row))
                return True
        return False

    component_coords = []
    for v in range(len(mor.blocks)):
        for c in h.component_embeddings[v]:
            if not try_add(c):
                raise InternalInconsistency("fibre components not independent")
            component_coords.append(tuple(c))
    f_coord = [0] * size
    f_coord[h.fibre_index] = 1
    o_coord = [0] * size
    o_coord[h.section_index] = 1
    for c in (f_coord, o_coord):
        if not try_add(c):
            raise InternalInconsistency("F or O dependent on components")

    extensions = []
    matrices = {v: mor.blocks[v - 1].matrix for v in finite}
    for length in range(1, max_word_length + 1):
        if len(echelon) == size:
            break
        for word in itertools.product(alphabet, repeat=length):
            if any(word[i] == -word[i + 1] for i in range(length - 1)):
                continue
            w = IDENTITY
            for letter in word:
                m = matrices[abs(letter)]
                w = (m if letter > 0 else m.inv()) * w
            if w == IDENTITY:
                gammas = [(1, 0), (0, 1)]
            else:
                if (w.a - 1) * (w.d - 1) - w.b * w.c != 0:
                    continue
                gamma = _primitive_fixed_vector(w)
                gammas = [gamma] if gamma else []
            for gamma in gammas:
                x = extension_to_thimbles(mor, word, gamma)
                if not any(x):
                    continue
                coords = h.project_to_basis(x)
                if try_add(coords):
                    extensions.append(
                        Extension(tuple(word), gamma, tuple(x), tuple(coords))
                    )
                if len(echelon) == size:
                    break
            if len(echelon) == size:
                break
    if len(echelon) != size:
        raise SpanFailure(
            f"extension words up to length {max_word_length} span rank "
            f"{len(echelon)} < {size}"
        )

    cols = [list(ext.coords) for ext in extensions]
    cols += [list(c) for c in component_coords]
    cols += [f_coord, o_coord]
    m = zlattice.from_columns(cols, nrows=size)
    det = zlattice.det_int(m)
    if det == 0:
        raise InternalInconsistency("change of basis matrix is singular")
    return PrimaryBasis(
        extensions=tuple(extensions),
        component_coords=tuple(component_coords),
        change_of_basis=tuple(tuple(c) for c in cols),
        determinant=det,
    )


def monodromy_fixes_classes(h: SurfaceHomology, prim: PrimaryBasis) -> bool:
    """Dragging the base fibre around any loop must not move extension
    classes: the conjugated word applied to the transported cycle projects to
    the same class in the quotient."""
    mor = h.morsified
    finite = [v + 1 for v in range(len(mor.blocks)) if not mor.blocks[v].at_infinity]
    for ext in prim.extensions:
        for i in finite:
            word = (i,) + ext.word + (-i,)
            gamma = mor.blocks[i - 1].matrix.inv().apply(ext.cycle)
            x = extension_to_thimbles(mor, word, gamma)
            if h.project_to_basis(x) != list(ext.coords):
                return False
    return True
