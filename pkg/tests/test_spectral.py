from fractions import Fraction as Q

import pytest
from conftest import structure
from hypothesis import given, settings
from hypothesis import strategies as st

from poissonbv.calculus import modular_vector, structure_from_terms
from poissonbv.graded import polynomial_carrier
from poissonbv.linalg import RationalMatrix
from poissonbv.oracle import divergence_oracle, oracle_eigenvalues
from poissonbv.spectral import (
    NOT_LINEAR,
    NOT_SEMISIMPLE,
    SEMISIMPLE,
    UNSUPPORTED_FIELD,
    analyze_modular,
    characteristic_polynomial,
    eigencoordinates,
    homotopy_suite,
    quasi_isomorphism_suite,
    rational_roots,
    slot_weights,
    transport,
)


@pytest.mark.parametrize(
    "name, eigenvalues",
    [("F0", [0, 0]), ("F1", [0, 0]), ("F2", [-1, 1]), ("F3", [Q(-3, 2), Q(1, 2), 1])],
)
def test_semisimple_verdicts(name, eigenvalues):
    spec = analyze_modular(modular_vector(structure(name)))
    assert spec.verdict == SEMISIMPLE
    assert sorted(spec.eigenvalues) == eigenvalues


def test_F4_is_not_semisimple():
    spec = analyze_modular(modular_vector(structure("F4")))
    assert spec.verdict == NOT_SEMISIMPLE
    assert not spec.semisimple
    # nilpotent: characteristic polynomial t^2
    assert list(spec.char_poly) == [0, 0, 1]


@pytest.mark.parametrize("name", ["F0", "F1", "F2", "F3", "F4"])
def test_divergence_oracle_agrees(name):
    pi = structure(name)
    assert divergence_oracle(pi) == modular_vector(pi)


@pytest.mark.parametrize("name", ["F2", "F3"])
def test_oracle_eigenvalues_agree(name):
    pi = structure(name)
    ev = oracle_eigenvalues(divergence_oracle(pi))
    assert ev == sorted(analyze_modular(modular_vector(pi)).eigenvalues)


def test_nonlinear_modular_vector():
    # pi = x1^2 x2 D1 D2 has a quadratic modular vector
    pi = structure_from_terms(2, [(1, (2, 1), (0, 1))])
    assert analyze_modular(modular_vector(pi)).verdict == NOT_LINEAR


def test_irrational_spectrum_is_unsupported():
    c = polynomial_carrier(2)
    # rotation field x2 D1 - x1 D2 has eigenvalues +-i
    nu = c.gen("x", 1) * c.gen("vx", 0) - c.gen("x", 0) * c.gen("vx", 1)
    assert analyze_modular(nu).verdict == UNSUPPORTED_FIELD


def test_non_diagonal_semisimple_field_is_diagonalized():
    R = RationalMatrix.from_dense([[1, 1], [0, 1]])
    pi = transport(structure("F2"), R)
    nu = modular_vector(pi)
    spec = analyze_modular(nu)
    assert spec.semisimple and spec.change_of_basis is not None
    assert sorted(spec.eigenvalues) == [-1, 1]
    new, new_nu = eigencoordinates(pi, nu, spec)
    assert analyze_modular(new_nu).is_diagonal


def test_slot_weights_pair_coordinates_with_duals():
    c = polynomial_carrier(2)
    w = slot_weights(c, [Q(1, 2), -1])
    assert w[c.slot("x", 0)] == Q(1, 2) and w[c.slot("vx", 0)] == Q(-1, 2)
    assert w[c.slot("dx", 1)] == -1 and w[c.slot("vx", 1)] == 1


def test_characteristic_polynomial_hand_value():
    M = RationalMatrix.from_dense([[2, 1], [0, 3]])
    assert characteristic_polynomial(M) == [6, -5, 1]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), min_size=1, max_size=4))
def test_rational_roots_recovers_a_factored_polynomial(roots):
    coeffs = [Q(1)]
    for r in roots:
        # multiply by (t - r)
        coeffs = [Q(0)] + coeffs
        for k in range(len(coeffs) - 1):
            coeffs[k] -= r * coeffs[k + 1]
    found, rest = rational_roots(coeffs)
    assert len(rest) == 1
    assert sorted(r for r, k in found.items() for _ in range(k)) == sorted(roots)


@pytest.mark.parametrize("name", ["F2", "F3"])
def test_homotopy_and_quasi_isomorphism_at_small_window(name):
    pi = structure(name)
    assert homotopy_suite(pi, 2).passed
    dims, homotopy = quasi_isomorphism_suite(pi, 2)
    assert dims.passed and homotopy.passed
