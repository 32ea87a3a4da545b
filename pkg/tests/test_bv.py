import functools

import pytest
from conftest import structure

from poissonbv.bv import (
    BRACKET_SIGN,
    CORRUPT_DELTA,
    BVEngine,
    CyclicMaps,
    check_bv_axioms,
    corrupt_delta,
    generation_check,
    gravity_suite,
    les_check,
    lie_jacobi_check,
    negate_delta,
    ses_check,
)
from poissonbv.koszul import koszul_dual
from poissonbv.spectral import Unsupported


@functools.lru_cache(maxsize=None)
def engine(name, window, dual=False):
    pi = structure(name)
    if dual:
        return BVEngine(koszul_dual(pi).dual, window, kind="exterior")
    return BVEngine(pi, window)


@pytest.mark.parametrize("name, dual", [("F1", False), ("F2", False), ("F3", False), ("F2", True), ("F3", True)])
def test_bv_axioms_small_window(name, dual):
    e = engine(name, 2, dual)
    results = check_bv_axioms(e, bracket_sign=BRACKET_SIGN[e.kind])
    assert [r.name for r in results] == ["Delta(1) = 0", "Delta^2 = 0", "seven-term identity", "Delta generates the Schouten bracket"]
    for r in results:
        assert r.passed, (r.name, r.witness)
    # on F1 the only class is the unit, so no triple has a degree in range
    assert (results[2].checked > 0) == (name != "F1")


def test_bv_axioms_on_the_zero_structure():
    # every polyvector is a class, so products and brackets are far from trivial
    e = engine("F0", 1)
    assert all(r.passed for r in check_bv_axioms(e, bracket_sign=BRACKET_SIGN["polynomial"]))


def test_the_bracket_sign_is_not_arbitrary():
    e = engine("F0", 1)
    res = generation_check(e, bracket_sign=-BRACKET_SIGN["polynomial"])
    assert not res.passed and res.witness is not None


def test_negated_delta_is_detected():
    e = engine("F0", 1)
    e.delta_override = negate_delta
    try:
        res = generation_check(e, bracket_sign=BRACKET_SIGN["polynomial"])
    finally:
        e.delta_override = None
    assert not res.passed


def test_corrupted_delta_is_detected():
    e = engine("F0", 1)
    e.delta_override = corrupt_delta(1)
    try:
        results = check_bv_axioms(e, bracket_sign=BRACKET_SIGN["polynomial"])
    finally:
        e.delta_override = None
    assert not all(r.passed for r in results)


def test_cup_product_is_graded_commutative():
    e = engine("F0", 1)
    cls = e.classes()
    for a in cls:
        for b in cls:
            ab, ba = e.cup(a, b), e.cup(b, a)
            if ab is None:
                assert ba is None
                continue
            s = -1 if a.degree * b.degree % 2 else 1
            assert ab.coordinates == tuple(s * c for c in ba.coordinates)


def test_unit_is_neutral():
    e = engine("F2", 2)
    one = e.unit()
    for a in e.classes():
        assert e.cup(one, a) == a


def test_non_semisimple_structure_is_refused():
    with pytest.raises(Unsupported):
        BVEngine(structure("F4"), 1)


def test_gravity_suite_on_F2():
    e = engine("F2", 2)
    results = gravity_suite(e, 4)
    assert all(r.passed for r in results), [(r.name, r.witness) for r in results if not r.passed]
    names = [r.name for r in results]
    for nn, mm in [(2, 1), (2, 2), (3, 0), (3, 1), (4, 0)]:
        assert f"gravity relation n={nn}, m={mm}" in names
    assert "gravity skew-symmetry" in names


def test_exact_sequences_on_F2():
    maps = CyclicMaps(engine("F2", 2))
    degrees = range(-2, 3)
    assert ses_check(maps, degrees, 2).passed
    assert les_check(maps, degrees, 2).passed


def test_corrupt_delta_mutation_has_a_witness():
    results = gravity_suite(engine("F2", 2), 4, mutation=CORRUPT_DELTA)
    failed = [r for r in results if not r.passed]
    assert failed and failed[0].witness is not None


def test_unknown_mutation():
    with pytest.raises(ValueError):
        gravity_suite(engine("F2", 2), 4, mutation="nonsense")


def test_binary_bracket_is_a_graded_lie_bracket_on_F0():
    maps = CyclicMaps(engine("F0", 2))
    res = lie_jacobi_check(maps)
    assert res.passed and res.checked > 0


def test_brackets_on_F0_are_nonzero():
    maps = CyclicMaps(engine("F0", 2))
    cls = maps.classes()
    assert any(
        (x := maps.bracket([a, b])) is not None and not x.is_zero() for a in cls for b in cls
    )

