import random

import pytest

from fixtures import K3_MATRICES, k3_rep
from ellsurf.errors import IndexOutOfRange
from ellsurf.morsification import (
    Loop,
    MonodromyRep,
    attach_infinity,
    extension_to_thimbles,
    fibre_component_vectors,
    morsify,
    transport,
)
from ellsurf.sl2z import IDENTITY, U, V, KodairaType, Mat2Z, kodaira_classify


def compose(mats):
    prod = IDENTITY
    for m in mats:
        prod = m * prod
    return prod


def test_k3_morsification_matches_worked_example():
    mor = morsify(k3_rep())
    assert mor.size == 24  # 8 + 8*2
    # positions (1-based) of each letter value, per the worked example
    letters = {i + 1: mor.matrices[i] for i in range(24)}
    assert letters[1] == Mat2Z(7, 9, -4, -5)
    for i in (2, 3, 22):
        assert letters[i] == U
    for i in (4, 13, 16, 17):
        assert letters[i] == Mat2Z(3, 1, -4, -1)
    rest = set(range(1, 25)) - {1, 2, 3, 22, 4, 13, 16, 17}
    for i in rest:
        assert letters[i] == Mat2Z(2, 1, -1, 0)
    # provenance ranges cover [0, 24) contiguously in order
    pos = 0
    for block, orig in zip(mor.blocks, K3_MATRICES):
        assert block.lo == pos
        pos = block.hi + 1
        assert compose(mor.matrices[block.lo:block.hi + 1]) == orig
    assert pos == 24


def test_single_nodal_fibre_is_kept():
    rep = MonodromyRep((Loop(U),))
    mor = morsify(rep)
    assert mor.size == 1
    assert mor.blocks[0].lo == 0 and mor.blocks[0].hi == 0
    assert mor.matrices[0] == U


def test_i2_letters_are_canonical():
    rep = MonodromyRep((Loop(Mat2Z(3, 2, -2, -1)),))
    mor = morsify(rep)
    assert list(mor.matrices) == [Mat2Z(2, 1, -1, 0)] * 2


def test_product_preservation():
    rng = random.Random(17)
    mats = []
    for _ in range(6):
        b = IDENTITY
        for _ in range(rng.randint(1, 8)):
            b = b * rng.choice([U, V, U.inv(), V.inv()])
        t = rng.choice(["I", "I*", "II", "III*", "IV"])
        nu = rng.randint(1, 4) if t in ("I", "I*") else 0
        from ellsurf.sl2z import standard_representative
        mats.append(b * standard_representative(KodairaType(t, nu)) * b.inv())
    rep = MonodromyRep(tuple(Loop(m) for m in mats))
    mor = morsify(rep)
    assert compose(mor.matrices) == compose(mats)
    assert mor.size == sum(kodaira_classify(m).type.euler for m in mats)


def test_attach_infinity():
    # two nodal fibres whose product is not the identity
    rep = MonodromyRep((Loop(U), Loop(V)))
    closed = attach_infinity(rep)
    assert len(closed.loops) == 3
    assert closed.loops[2].at_infinity
    assert closed.total_product() == IDENTITY
    # already closed input is returned unchanged
    mats = [U, V] * 6
    rep = MonodromyRep(tuple(Loop(m) for m in mats))
    assert compose(mats) == IDENTITY
    assert attach_infinity(rep) is rep


def test_component_vectors_split_i2():
    rep = MonodromyRep((Loop(Mat2Z(3, 2, -2, -1)), Loop(Mat2Z(3, 2, -2, -1))))
    mor = morsify(rep)
    vecs = fibre_component_vectors(mor, 0)
    assert vecs == [[1, -1, 0, 0]]
    vecs = fibre_component_vectors(mor, 1)
    assert vecs == [[0, 0, 1, -1]]


def test_component_vectors_i3_kernel():
    rep = MonodromyRep((Loop(Mat2Z(1, 3, 0, 1)),))
    mor = morsify(rep)
    vecs = fibre_component_vectors(mor, 0)
    assert len(vecs) == 2
    for x in vecs:
        s = [
            sum(x[i] * mor.pl[i][0][r] for i in range(mor.size))
            for r in range(2)
        ]
        assert s == [0, 0]


def test_component_vectors_ii_empty():
    rep = MonodromyRep((Loop(Mat2Z(1, 1, -1, 0)),))
    mor = morsify(rep)
    assert fibre_component_vectors(mor, 0) == []
    with pytest.raises(IndexOutOfRange):
        fibre_component_vectors(mor, 1)


def test_component_count_matches_type():
    mor = morsify(k3_rep())
    for v, block in enumerate(mor.blocks):
        vecs = fibre_component_vectors(mor, v)
        assert len(vecs) == block.type.components - 1


def test_extension_trivial_cases():
    mor = morsify(MonodromyRep((Loop(U), Loop(V))))
    # cycle invariant along its own loop extends to zero
    d = (1, 0)  # vanishing direction of U, m = (0, 1)
    assert extension_to_thimbles(mor, [1], d) == [0, 0]
    # unit pairing gives the thimble itself
    assert extension_to_thimbles(mor, [1], (0, 1)) == [1, 0]


def test_extension_worked_example():
    mor = morsify(k3_rep())
    vec = extension_to_thimbles(mor, [5, -6], (0, 1))
    expected = [0] * 24
    expected[4], expected[5], expected[6], expected[7] = 1, 1, -1, -1
    assert vec == expected


def test_boundary_identity_random_words():
    rng = random.Random(23)
    mor = morsify(k3_rep())
    r = len(mor.blocks)
    for _ in range(100):
        word = [rng.choice([1, -1]) * rng.randint(1, r) for _ in range(rng.randint(1, 5))]
        gamma = (rng.randint(-5, 5), rng.randint(-5, 5))
        x = extension_to_thimbles(mor, word, gamma)
        boundary = [
            sum(x[i] * mor.pl[i][0][k] for i in range(mor.size)) for k in range(2)
        ]
        moved = transport(mor, word, gamma)
        assert boundary == [moved[0] - gamma[0], moved[1] - gamma[1]]
