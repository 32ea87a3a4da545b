"""Reading and writing Poisson structures as JSON documents.

A document looks like::

    {"variables": ["x1", "x2"], "parity": "even",
     "bivector": [{"coeff": "1", "monomial": {"x1": 1, "x2": 1}, "frame": [1, 2]}]}

``parity`` is "even" for a polynomial algebra and "odd" for an exterior
algebra.  A term is ``coeff * monomial * D_i D_j`` with 1-based frame
indices.  On polynomial carriers the frame is antisymmetric and i = j is
rejected; on exterior carriers the coderivations are even, so the frame is
symmetric and i = j is allowed.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .calculus import PoissonStructure
from .graded import Element, exterior_carrier, polynomial_carrier

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")
_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class InputError(ValueError):
    """A malformed document; ``location`` points at the offending field."""

    def __init__(self, location, message):
        super().__init__(f"{location}: {message}")
        self.location = location


def parse_rational(text, location="coeff"):
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(location, f"expected a rational string, got {text!r}")
    s = str(text)
    if not _RATIONAL.match(s):
        raise InputError(location, f"malformed rational {s!r}")
    try:
        return Fraction(s.replace(" ", ""))
    except ZeroDivisionError:
        raise InputError(location, f"zero denominator in {s!r}") from None


def parse_input(document):
    """PoissonStructure from a decoded JSON object (see the module docstring)."""
    if not isinstance(document, dict):
        raise InputError("$", "the document must be a JSON object")
    for key in ("variables", "parity", "bivector"):
        if key not in document:
            raise InputError("$", f"missing field {key!r}")
    names = document["variables"]
    if not isinstance(names, list) or not names:
        raise InputError("variables", "expected a nonempty list of names")
    for k, s in enumerate(names):
        if not isinstance(s, str) or not _NAME.match(s):
            raise InputError(f"variables[{k}]", f"invalid variable name {s!r}")
    if len(set(names)) != len(names):
        raise InputError("variables", "variable names must be distinct")
    parity = document["parity"]
    if parity not in ("even", "odd"):
        raise InputError("parity", f"expected 'even' or 'odd', got {parity!r}")
    n = len(names)
    carrier = polynomial_carrier(n, names) if parity == "even" else exterior_carrier(n, names)
    coord, direction = ("x", "vx") if parity == "even" else ("xi", "vxi")
    terms = document["bivector"]
    if not isinstance(terms, list):
        raise InputError("bivector", "expected a list of terms")
    index = {s: i for i, s in enumerate(names)}
    seen = {}
    out = carrier.zero()
    for t, term in enumerate(terms):
        loc = f"bivector[{t}]"
        if not isinstance(term, dict):
            raise InputError(loc, "a term must be an object")
        extra = set(term) - {"coeff", "monomial", "frame"}
        if extra:
            raise InputError(loc, f"unknown fields {sorted(extra)}")
        c = parse_rational(term.get("coeff"), f"{loc}.coeff")
        mono = term.get("monomial", {})
        if not isinstance(mono, dict):
            raise InputError(f"{loc}.monomial", "expected an object of exponents")
        m = [0] * len(carrier)
        for var in sorted(mono, key=lambda v: index.get(v, -1)):
            e = mono[var]
            if var not in index:
                raise InputError(f"{loc}.monomial", f"unknown variable {var!r}")
            if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                raise InputError(f"{loc}.monomial.{var}", f"exponent must be a nonnegative integer, got {e!r}")
            if parity == "odd" and e > 1:
                raise InputError(f"{loc}.monomial.{var}", "odd variables square to zero")
            m[carrier.slot(coord, index[var])] = e
        frame = term.get("frame")
        if not isinstance(frame, list) or len(frame) != 2 or not all(isinstance(i, int) and not isinstance(i, bool) for i in frame):
            raise InputError(f"{loc}.frame", "expected two 1-based indices")
        i, j = frame
        for k in (i, j):
            if not 1 <= k <= n:
                raise InputError(f"{loc}.frame", f"index {k} out of range 1..{n}")
        if parity == "even" and i == j:
            raise InputError(f"{loc}.frame", "frame indices must differ")
        key = (tuple(m), tuple(sorted((i, j))))
        if key in seen:
            raise InputError(loc, f"duplicate term (same monomial and frame as bivector[{seen[key]}])")
        seen[key] = t
        piece = Element(carrier, {tuple(m): c}) * carrier.gen(direction, i - 1) * carrier.gen(direction, j - 1)
        out = out + piece
    return PoissonStructure(carrier, out)


def load(path):
    """Parse a JSON file into a PoissonStructure."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {exc.lineno} column {exc.colno}", f"invalid JSON: {exc.msg}") from None
    return parse_input(doc)


def to_document(pi):
    """JSON-ready document reproducing pi (inverse of parse_input up to term order)."""
    carrier = pi.carrier
    even = carrier.carrier_kind == "polynomial"
    coord, direction = ("x", "vx") if even else ("xi", "vxi")
    names = [carrier.generators[carrier.slot(coord, i)].name for i in range(carrier.n)]
    dslots = carrier.slots(direction)
    terms = []
    for m, c in sorted(pi.bivector.terms.items()):
        frame = [i + 1 for i, k in enumerate(dslots) for _ in range(m[k])]
        mono = {names[i]: m[carrier.slot(coord, i)] for i in range(carrier.n) if m[carrier.slot(coord, i)]}
        # rebuild the term from (coeff, monomial, frame) and fix the sign
        probe = Element(carrier, {tuple(m[k] if k not in dslots else 0 for k in range(len(m))): 1})
        probe = probe * carrier.gen(direction, frame[0] - 1) * carrier.gen(direction, frame[1] - 1)
        sign = probe.coeff(m)
        terms.append({"coeff": str(c / sign), "monomial": mono, "frame": frame})
    return {"variables": names, "parity": "even" if even else "odd", "bivector": terms}
