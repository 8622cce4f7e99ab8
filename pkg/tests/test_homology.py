import pytest

from fixtures import k3_rep
from ellsurf.errors import EulerNot12Multiple, NotLefschetzInput
from ellsurf.homology import (
    component_gram,
    homology_from_monodromy,
    monodromy_fixes_classes,
    primary_basis,
    thimble_gram,
)
from ellsurf.morsification import (
    Loop,
    MonodromyRep,
    attach_infinity,
    fibre_component_vectors,
    morsify,
)
from ellsurf.sl2z import U, V, KodairaType, Mat2Z, kodaira_classify
from ellsurf.zlattice import (
    det_int,
    is_even_gram,
    kernel_basis,
    mat_vec,
)

# Gamma(2)-style Legendre monodromy: I2 at 0 and at 1, I2* at infinity.
LEGENDRE_MATRICES = (Mat2Z(1, 2, 0, 1), Mat2Z(1, 0, -2, 1))


def k3_homology():
    return homology_from_monodromy(morsify(k3_rep()))


def test_k3_lattice_is_even_unimodular_of_rank_22():
    h = k3_homology()
    assert h.euler == 24
    assert h.basis_size == 22
    g = h.gram.rows()
    assert det_int(g) in (1, -1)
    assert is_even_gram(g)
    assert h.signature == (3, 19)
    assert h.geometric_genus == 1


def test_k3_kernel_rank():
    mor = morsify(k3_rep())
    b = [[pl[0][k] for pl in mor.pl] for k in range(2)]
    k = kernel_basis(b, ncols=24)
    assert len(k[0]) == 22


def test_k3_thimble_reps_have_no_boundary():
    h = k3_homology()
    mor = h.morsified
    b = [[pl[0][k] for pl in mor.pl] for k in range(2)]
    for rep in h.thimble_reps:
        assert mat_vec(b, list(rep)) == [0, 0]


def test_legendre_homology_from_matrices():
    rep = attach_infinity(MonodromyRep(tuple(Loop(m) for m in LEGENDRE_MATRICES)))
    types = [kodaira_classify(lp.matrix).type for lp in rep.loops]
    assert types == [KodairaType("I", 2), KodairaType("I", 2), KodairaType("I*", 2)]
    h = homology_from_monodromy(morsify(rep))
    assert h.euler == 12
    assert h.basis_size == 10
    g = h.gram.rows()
    assert det_int(g) in (1, -1)
    assert not is_even_gram(g)  # O.O = -1
    assert h.signature == (1, 9)


def test_twelve_nodal_letters_unimodular():
    mats = [U, V] * 6
    rep = MonodromyRep(tuple(Loop(m) for m in mats))
    h = homology_from_monodromy(morsify(rep))
    assert h.basis_size == 10
    assert det_int(h.gram.rows()) in (1, -1)
    assert h.signature == (1, 9)


def test_rejects_open_or_wrong_euler():
    with pytest.raises(NotLefschetzInput):
        homology_from_monodromy(morsify(MonodromyRep(tuple(Loop(U) for _ in range(12)))))
    # six letters only: Euler number not a multiple of 12
    mats = [U, V] * 3
    with pytest.raises(EulerNot12Multiple):
        homology_from_monodromy(morsify(MonodromyRep(tuple(Loop(m) for m in mats))))
    # closing (VU)^3 = -I at infinity gives a valid e = 12 surface instead
    rep = attach_infinity(MonodromyRep(tuple(Loop(m) for m in mats)))
    h = homology_from_monodromy(morsify(rep))
    assert h.basis_size == 10


def test_split_inu_component_grams():
    # split I_nu components carry the negated Cartan-shaped tridiagonal form
    for nu in range(2, 9):
        rep = MonodromyRep((Loop(Mat2Z(1, nu, 0, 1)),))
        mor = morsify(rep)
        vecs = fibre_component_vectors(mor, 0)
        g = thimble_gram(mor, vecs)
        expected = [
            [-2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(nu - 1)]
            for i in range(nu - 1)
        ]
        assert g == expected
    g3 = thimble_gram(
        morsify(MonodromyRep((Loop(Mat2Z(1, 3, 0, 1)),))),
        fibre_component_vectors(morsify(MonodromyRep((Loop(Mat2Z(1, 3, 0, 1)),))), 0),
    )
    assert g3 == [[-2, -1], [-1, -2]]
    assert det_int(g3) == 3


def test_k3_component_classes_are_minus_two_curves():
    h = k3_homology()
    for v, block in enumerate(h.morsified.blocks):
        g = component_gram(h, v)
        if block.type == KodairaType("I", 2):
            assert g == [[-2]]
        else:
            assert g == []


def test_fibre_and_section_pairings():
    h = k3_homology()
    g = h.gram.rows()
    f, o = h.fibre_index, h.section_index
    assert g[f][f] == 0
    assert g[f][o] == 1
    assert g[o][o] == -2  # -e/12
    for i in range(h.basis_size - 2):
        assert g[i][f] == 0 and g[i][o] == 0


def test_k3_primary_basis():
    h = k3_homology()
    prim = primary_basis(h)
    assert len(prim.extensions) == 12  # 22 = 12 + 8 components + F + O
    assert prim.determinant != 0
    assert len(prim.change_of_basis) == 22


def test_k3_monodromy_invariance():
    h = k3_homology()
    prim = primary_basis(h)
    assert monodromy_fixes_classes(h, prim)


def test_legendre_primary_basis_needs_no_extensions():
    rep = attach_infinity(MonodromyRep(tuple(Loop(m) for m in LEGENDRE_MATRICES)))
    h = homology_from_monodromy(morsify(rep))
    prim = primary_basis(h)
    assert len(prim.extensions) == 0
    assert abs(prim.determinant) >= 1
