import pytest
from conftest import structure

from poissonbv.calculus import modular_vector, structure_from_terms
from poissonbv.homology import (
    CHAIN,
    COCHAIN,
    Duality,
    HomologyClass,
    NotACycle,
    NotHomogeneous,
    assemble,
    build_complex,
    dimension_table,
    poincare_duality_check,
    weight_range,
)

W = 3


def _nonzero(table):
    return {k: v for k, v in table.items() if v}


@pytest.mark.parametrize("variant", [COCHAIN, CHAIN])
def test_square_zero_on_every_slice(any_fixture, variant):
    nu = modular_vector(any_fixture) if variant == CHAIN else None
    cx, slices = assemble(any_fixture, nu, variant, window=W)
    assert slices
    for s in slices:
        p, w, _ = s.address
        assert cx.square_zero(p, w)


def test_zero_structure_keeps_everything():
    pi = structure("F0")
    cx = build_complex(pi, None, COCHAIN)
    for (p, w, _), dim in dimension_table(cx, W).items():
        assert dim == len(cx.basis(p, w))


def test_symplectic_cohomology_is_de_rham():
    cx = build_complex(structure("F1"), None, COCHAIN)
    assert _nonzero(dimension_table(cx, W)) == {(0, 0, None): 1}


def test_symplectic_homology_is_the_volume_class():
    pi = structure("F1")
    cx = build_complex(pi, modular_vector(pi), CHAIN)
    assert _nonzero(dimension_table(cx, W)) == {(2, 2, None): 1}


def test_F2_casimirs_are_constants():
    cx = build_complex(structure("F2"), None, COCHAIN)
    table = dimension_table(cx, W)
    assert {k: v for k, v in _nonzero(table).items() if k[0] == 0} == {(0, 0, None): 1}


@pytest.mark.parametrize("name", ["F2", "F3"])
def test_euler_characteristic_per_weight(name):
    # weight-preserving differential: the alternating sum of dimensions is the same for C and H
    pi = structure(name)
    assert pi.weight_shift() == 0
    cx = build_complex(pi, None, COCHAIN)
    for w in weight_range(W):
        chi_c = sum((-1) ** p * len(cx.basis(p, w)) for p in cx.degrees)
        chi_h = sum((-1) ** p * cx.homology(p, w).dim for p in cx.degrees if cx.basis(p, w))
        assert chi_c == chi_h


def test_inhomogeneous_bivector_is_rejected():
    pi = structure_from_terms(2, [(1, (0, 0), (0, 1)), (1, (1, 1), (0, 1))])
    with pytest.raises(NotHomogeneous):
        assemble(pi, None, COCHAIN, window=1)


def test_classes_boundaries_and_cycles():
    pi = structure("F2")
    cx = build_complex(pi, None, COCHAIN)
    c = pi.carrier
    h0 = cx.homology(0, 0)
    (one,) = h0.classes()
    assert one.representative == c.one()
    assert not one.is_zero() and one.degree == 0
    # delta of a function is a boundary at degree 1
    f = c.gen("x", 0) * c.gen("x", 1)
    b = cx.differential(f)
    h1 = cx.homology(1, 2)
    assert h1.is_boundary(b)
    # a non-cocycle is rejected
    with pytest.raises(NotACycle):
        h1.class_of(c.gen("x", 0) * c.gen("x", 0) * c.gen("x", 0) * c.gen("vx", 0))


def test_class_identity_ignores_the_representative():
    a = HomologyClass("cochain", (0, 0, None), lambda: 1 / 0, (1,))
    b = HomologyClass("cochain", (0, 0, None), "anything", (1,))
    assert a == b and hash(a) == hash(b)
    assert a != HomologyClass("chain", (0, 0, None), None, (1,))


@pytest.mark.parametrize("name", ["F1", "F2"])
def test_duality_at_small_window(name):
    pi = structure(name)
    nu = modular_vector(pi)
    cochain = build_complex(pi, None, COCHAIN)
    chain = build_complex(pi, nu, CHAIN)
    rank, dims = poincare_duality_check(cochain, chain, Duality(cochain, chain), 2)
    assert rank.passed and dims.passed and rank.checked == dims.checked > 0
