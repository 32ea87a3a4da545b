from fractions import Fraction as Q

import pytest
from conftest import structure
from hypothesis import given, settings
from hypothesis import strategies as st

from poissonbv.calculus import (
    CHAIN_LEVEL,
    NotPolyvector,
    PoissonStructure,
    VolumeForm,
    apply_vector_field,
    contract,
    contraction_identity_suite,
    de_rham,
    divergence,
    evaluate,
    jacobi_check,
    modular_vector,
    pinned_top_contraction,
    poisson_boundary,
    poisson_bracket,
    poisson_coboundary,
    quadratic_structure,
    schouten,
    structure_from_terms,
    twisted_boundary,
)
from poissonbv.graded import exterior_carrier, polynomial_carrier

P3 = polynomial_carrier(3)


def x(i, c=P3):
    return c.gen("x", i)


def D(i, c=P3):
    return c.gen("vx", i)


def dx(i, c=P3):
    return c.gen("dx", i)


# --- hand values ------------------------------------------------------------


def test_bracket_of_coordinates_on_F2():
    pi = structure("F2")
    c = pi.carrier
    assert poisson_bracket(pi, x(0, c), x(1, c)) == x(0, c) * x(1, c)
    assert poisson_bracket(pi, x(1, c), x(0, c)) == -(x(0, c) * x(1, c))


def test_vector_field_acts_by_derivation():
    X = x(1) * D(0)
    assert apply_vector_field(X, x(0) * x(0)) == 2 * x(0) * x(1)


def test_schouten_of_vector_fields_is_the_commutator():
    X, Y = x(1) * D(0), x(0) * x(2) * D(1)
    f = x(0) * x(1) * x(2)
    lhs = apply_vector_field(schouten(X, Y), f)
    rhs = apply_vector_field(X, apply_vector_field(Y, f)) - apply_vector_field(Y, apply_vector_field(X, f))
    assert lhs == rhs


def test_schouten_with_a_function():
    X = x(1) * D(0)
    assert schouten(X, x(0) * x(0)) == 2 * x(0) * x(1)


def test_coboundary_of_a_function():
    # delta(f)(g) = {g, f}
    pi = structure("F2")
    c = pi.carrier
    df = poisson_coboundary(pi, x(0, c))
    assert evaluate(df, [x(1, c)]) == -(x(0, c) * x(1, c))


def test_fixtures_are_poisson(any_fixture):
    ok, witness = jacobi_check(any_fixture)
    assert ok and witness is None


def test_jacobi_failure_has_witness():
    # {x1, x2} = x3 and {x2, x3} = x2 leave the jacobiator {x1, x2} = x3
    pi = structure_from_terms(3, [(1, (0, 0, 1), (0, 1)), (1, (0, 1, 0), (1, 2))])
    ok, witness = jacobi_check(pi)
    assert not ok and witness


def test_structure_requires_a_bivector():
    with pytest.raises(NotPolyvector):
        PoissonStructure(P3, D(0))


@pytest.mark.parametrize(
    "name, expected",
    [
        ("F0", {}),
        ("F1", {}),
        ("F2", {((1, 0), (1, 0)): 1, ((0, 1), (0, 1)): -1}),
        ("F3", {((1, 0, 0), (1, 0, 0)): Q(1, 2), ((0, 1, 0), (0, 1, 0)): 1, ((0, 0, 1), (0, 0, 1)): Q(-3, 2)}),
        ("F4", {((1, 0), (0, 1)): -2}),
    ],
)
def test_modular_vector_hand_values(name, expected):
    pi = structure(name)
    c = pi.carrier
    nu = c.zero()
    for (exps, frame), coeff in expected.items():
        t = c.one().scale(coeff)
        for i, e in enumerate(exps):
            for _ in range(e):
                t = t * x(i, c)
        for j, e in enumerate(frame):
            if e:
                t = t * D(j, c)
        nu = nu + t
    assert modular_vector(pi) == nu


def test_divergence_hand_value():
    c = polynomial_carrier(2)
    assert divergence(x(0, c) * D(0, c)) == c.one()
    assert divergence(x(1, c) * D(0, c)) == c.zero()


def test_contraction_conventions():
    c = polynomial_carrier(2)
    vol = VolumeForm.standard(c).form
    assert contract(D(0, c), vol) == dx(1, c)
    assert contract(D(1, c), vol) == -dx(0, c)
    # i_(X^Y) = i_X o i_Y
    assert contract(D(0, c) * D(1, c), vol) == contract(D(0, c), contract(D(1, c), vol))

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_pinned_top_contraction(n):
    assert pinned_top_contraction(polynomial_carrier(n)) == (-1) ** (n * (n - 1) // 2)
    assert pinned_top_contraction(exterior_carrier(n)) == (-1) ** (n * (n + 1) // 2)


def test_chain_level_contraction_identity_on_F2():
    results = contraction_identity_suite(structure("F2"), 2, CHAIN_LEVEL)
    assert all(r.passed for r in results)
    assert sum(r.checked for r in results) > 0


# --- property tests ------------------------------------------------------------

coeffs = st.integers(-3, 3)


@st.composite
def polyvectors(draw, carrier=P3, max_terms=3, max_exp=2):
    n = carrier.n
    out = carrier.zero()
    p = draw(st.integers(0, n))
    for _ in range(draw(st.integers(0, max_terms))):
        t = carrier.one().scale(draw(coeffs))
        for i in range(n):
            for _ in range(draw(st.integers(0, max_exp))):
                t = t * x(i, carrier)
        frame = draw(st.lists(st.integers(0, n - 1), min_size=p, max_size=p, unique=True))
        for j in frame:
            t = t * D(j, carrier)
        out = out + t
    return out


@st.composite
def quadratic_bivectors(draw):
    constants = {}
    for i1 in range(3):
        for i2 in range(i1, 3):
            for j1, j2 in ((0, 1), (0, 2), (1, 2)):
                if draw(st.booleans()) and draw(st.booleans()):
                    constants[((i1, i2), (j1, j2))] = draw(st.integers(-2, 2))
    return quadratic_structure(3, constants)


def _jacobiator(pi, f, g, h):
    b = lambda u, v: poisson_bracket(pi, u, v)  # noqa: E731
    return b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))


@settings(max_examples=40, deadline=None)
@given(quadratic_bivectors())
def test_jacobi_check_agrees_with_the_jacobiator(pi):
    ok, _ = jacobi_check(pi)
    assert ok == (not _jacobiator(pi, x(0), x(1), x(2)))


@settings(max_examples=40, deadline=None)
@given(polyvectors(), polyvectors())
def test_schouten_graded_antisymmetry(P, Q_):
    from poissonbv.calculus import polyvector_degree

    if not P or not Q_:
        return
    p, q = polyvector_degree(P), polyvector_degree(Q_)
    sign = -1 if (p - 1) * (q - 1) % 2 == 0 else 1
    assert schouten(P, Q_) == sign * schouten(Q_, P)


@settings(max_examples=25, deadline=None)
@given(polyvectors())
def test_coboundary_squares_to_zero_and_is_the_bracket_with_pi(P):
    pi = structure("F3")
    assert poisson_coboundary(pi, poisson_coboundary(pi, P)) == pi.carrier.zero()
    assert poisson_coboundary(pi, P) == schouten(pi.bivector, P)


@st.composite
def forms(draw, carrier=P3):
    out = carrier.zero()
    for _ in range(draw(st.integers(0, 3))):
        t = carrier.one().scale(draw(coeffs))
        for i in range(3):
            for _ in range(draw(st.integers(0, 2))):
                t = t * x(i, carrier)
        for j in draw(st.lists(st.integers(0, 2), max_size=3, unique=True)):
            t = t * dx(j, carrier)
        out = out + t
    return out


@settings(max_examples=25, deadline=None)
@given(forms())
def test_boundaries_square_to_zero(w):
    pi = structure("F3")
    nu = modular_vector(pi)
    assert de_rham(de_rham(w)) == P3.zero()
    assert poisson_boundary(pi, poisson_boundary(pi, w)) == P3.zero()
    assert twisted_boundary(pi, nu, twisted_boundary(pi, nu, w)) == P3.zero()
