import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poissonbv.fixtures import DOCUMENTS, NAMES, fixture
from poissonbv.inputs import InputError, load, parse_input, parse_rational, to_document


def doc(terms, parity="even", variables=("x1", "x2")):
    return {"variables": list(variables), "parity": parity, "bivector": terms}


def term(coeff="1", monomial=None, frame=(1, 2)):
    return {"coeff": coeff, "monomial": monomial or {}, "frame": list(frame)}


@pytest.mark.parametrize(
    "document, location",
    [
        ([], "$"),
        ({"variables": ["x1"], "parity": "even"}, "$"),
        (doc([], variables=[]), "variables"),
        (doc([], variables=["x1", "x1"]), "variables"),
        (doc([], variables=["1x"]), "variables[0]"),
        (doc([], parity="neutral"), "parity"),
        (doc({}), "bivector"),
        (doc([term(coeff="1/0")]), "bivector[0].coeff"),
        (doc([term(coeff="0.5")]), "bivector[0].coeff"),
        (doc([term(coeff=1.5)]), "bivector[0].coeff"),
        (doc([term(monomial={"y": 1})]), "bivector[0].monomial"),
        (doc([term(monomial={"x1": -1})]), "bivector[0].monomial.x1"),
        (doc([term(frame=(1, 1))]), "bivector[0].frame"),
        (doc([term(frame=(1, 3))]), "bivector[0].frame"),
        (doc([term(frame=(1,))]), "bivector[0].frame"),
        (doc([term(), term(frame=(2, 1))]), "bivector[1]"),
        (doc([{**term(), "extra": 1}]), "bivector[0]"),
        (doc([term(monomial={"xi1": 2})], parity="odd", variables=("xi1", "xi2")), "bivector[0].monomial.xi1"),
    ],
)
def test_malformed_documents_name_the_location(document, location):
    with pytest.raises(InputError) as exc:
        parse_input(document)
    assert exc.value.location == location


def test_rationals():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational(4) == 4
    with pytest.raises(InputError):
        parse_rational(True)


def test_exterior_frame_may_repeat_an_index():
    pi = parse_input(doc([term(monomial={"xi1": 1, "xi2": 1}, frame=(1, 1))], parity="odd", variables=("xi1", "xi2")))
    assert pi.carrier.carrier_kind == "exterior" and pi.bivector


def test_fixture_documents_round_trip():
    for name in NAMES:
        pi = fixture(name)
        assert parse_input(to_document(pi)) == pi
        assert parse_input(json.loads(json.dumps(DOCUMENTS[name]))) == pi


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixture("F9")


def test_load_reports_json_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"variables": [}')
    with pytest.raises(InputError) as exc:
        load(p)
    assert exc.value.location.startswith("line 1")


@settings(max_examples=50, deadline=None)
@given(
    st.dictionaries(
        st.tuples(st.integers(0, 2), st.integers(0, 2), st.sampled_from([(1, 2), (1, 3), (2, 3)])),
        st.fractions(min_value=-3, max_value=3, max_denominator=5).filter(bool),
        max_size=4,
    )
)
def test_round_trip_random_documents(entries):
    names = ["a", "b", "c"]
    terms = [term(str(c), {names[i]: e for i, e in zip((0, 1), (e1, e2)) if e}, f) for (e1, e2, f), c in entries.items()]
    pi = parse_input(doc(terms, variables=names))
    assert parse_input(to_document(pi)) == pi
