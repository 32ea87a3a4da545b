"""The standard test structures F0..F4 as input documents."""

from __future__ import annotations

from .inputs import parse_input


def _term(coeff, monomial, frame):
    return {"coeff": coeff, "monomial": monomial, "frame": frame}


DOCUMENTS = {
    # the zero structure on two variables
    "F0": {"variables": ["x1", "x2"], "parity": "even", "bivector": []},
    # the constant symplectic structure; its scaling weight is -2
    "F1": {"variables": ["x1", "x2"], "parity": "even", "bivector": [_term("1", {}, [1, 2])]},
    "F2": {"variables": ["x1", "x2"], "parity": "even", "bivector": [_term("1", {"x1": 1, "x2": 1}, [1, 2])]},
    # diagonal quadratic family with a rational sample of constants
    "F3": {
        "variables": ["x1", "x2", "x3"],
        "parity": "even",
        "bivector": [
            _term("1", {"x1": 1, "x2": 1}, [1, 2]),
            _term("-1/2", {"x1": 1, "x3": 1}, [1, 3]),
            _term("2", {"x2": 1, "x3": 1}, [2, 3]),
        ],
    },
    # nilpotent modular vector
    "F4": {"variables": ["x1", "x2"], "parity": "even", "bivector": [_term("1", {"x1": 2}, [1, 2])]},
}

NAMES = tuple(sorted(DOCUMENTS))


def fixture(name):
    """The PoissonStructure of a named fixture."""
    try:
        return parse_input(DOCUMENTS[name])
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}") from None
