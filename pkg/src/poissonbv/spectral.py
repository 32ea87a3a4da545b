"""Semisimplicity of the modular vector and the eigenweight grading."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .calculus import PoissonStructure, schouten
from .graded import Element, polynomial_carrier, substitute
from .linalg import RationalMatrix

SEMISIMPLE = "semisimple"
NOT_SEMISIMPLE = "not-semisimple"
NOT_LINEAR = "not-linear"
UNSUPPORTED_FIELD = "unsupported-field"


class Unsupported(RuntimeError):
    """Raised when an operation needs a semisimple rational spectrum."""


def function_slots(carrier):
    return carrier.slots("x") if carrier.carrier_kind == "polynomial" else carrier.slots("xi")


@dataclass(frozen=True)
class ModularSpectrum:
    verdict: str
    matrix: RationalMatrix | None = None
    char_poly: tuple = ()
    eigenvalues: tuple = ()
    multiplicities: tuple = ()
    change_of_basis: RationalMatrix | None = None

    @property
    def semisimple(self):
        return self.verdict == SEMISIMPLE

    @property
    def is_diagonal(self):
        return self.semisimple and self.change_of_basis is None


def linear_action(nu):
    """Matrix M with nu(f_i) = sum_j M[i, j] f_j on the coordinate generators, or None."""
    carrier = nu.carrier
    fs = function_slots(carrier)
    n = carrier.n
    rows = []
    for i in range(n):
        image = schouten(nu, carrier.gen("x" if carrier.carrier_kind == "polynomial" else "xi", i))
        row = {}
        for m, c in image.terms.items():
            hits = [j for j, k in enumerate(fs) if m[k]]
            if sum(m) != 1 or len(hits) != 1:
                return None
            row[hits[0]] = c
        rows.append(row)
    return RationalMatrix(n, n, rows)


def characteristic_polynomial(M):
    """Coefficients [c_0, ..., c_n] of det(t I - M), by Faddeev-LeVerrier."""
    n = M.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = RationalMatrix.zeros(n, n)
    ident = RationalMatrix.identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = M @ (Mk + ident.scale(c))
        trace = sum((Mk[i, i] for i in range(n)), Fraction(0))
        c = -trace / k
        coeffs[n - k] = c
    return coeffs


def _divisors(a):
    a = abs(a)
    out = set()
    for d in range(1, isqrt(a) + 1):
        if a % d == 0:
            out.add(d)
            out.add(a // d)
    return sorted(out)


def _evaluate(coeffs, t):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _deflate(coeffs, r):
    """Divide by (t - r), assuming r is a root."""
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    carry = Fraction(0)
    for k in range(n, 0, -1):
        carry = coeffs[k] + carry * r
        out[k - 1] = carry
    return out


def rational_roots(coeffs):
    """Rational roots with multiplicity, plus the leftover factor's coefficients."""
    coeffs = [Fraction(c) for c in coeffs]
    roots = {}
    while len(coeffs) > 1 and coeffs[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        coeffs = coeffs[1:]
    progress = True
    while len(coeffs) > 1 and progress:
        progress = False
        den = 1
        for c in coeffs:
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [int(c * den) for c in coeffs]
        for p in _divisors(ints[0]):
            for q in _divisors(ints[-1]):
                for r in (Fraction(p, q), Fraction(-p, q)):
                    if _evaluate(coeffs, r) == 0:
                        roots[r] = roots.get(r, 0) + 1
                        coeffs = _deflate(coeffs, r)
                        progress = True
                        break
                if progress:
                    break
            if progress:
                break
    return roots, coeffs


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def analyze_modular(nu):
    """Decide whether nu is a diagonalizable linear field over the rationals."""
    M = linear_action(nu)
    if M is None:
        return ModularSpectrum(NOT_LINEAR)
    n = M.rows
    poly = characteristic_polynomial(M)
    roots, rest = rational_roots(poly)
    mult = tuple(sorted(roots.items()))
    if len(rest) > 1:
        return ModularSpectrum(UNSUPPORTED_FIELD, M, tuple(poly), (), mult)
    ident = RationalMatrix.identity(n)
    for r, k in roots.items():
        if n - (M - ident.scale(r)).rank() != k:
            return ModularSpectrum(NOT_SEMISIMPLE, M, tuple(poly), (), mult)
    diagonal = all(j == i for i, row in enumerate(M.data) for j in row)
    if diagonal:
        return ModularSpectrum(SEMISIMPLE, M, tuple(poly), tuple(M[i, i] for i in range(n)), mult)
    # rows of R are left eigenvectors; y = R x are eigencoordinates
    rows, eig = [], []
    for r, _ in sorted(roots.items()):
        for v in (M - ident.scale(r)).transpose().nullspace():
            rows.append({j: c for j, c in enumerate(v) if c})
            eig.append(r)
    R = RationalMatrix(n, n, rows)
    return ModularSpectrum(SEMISIMPLE, M, tuple(poly), tuple(eig), mult, R)


def transport(pi, R):
    """The structure pi written in coordinates y = R x (polynomial carriers)."""
    carrier = pi.carrier
    n = carrier.n
    Rinv = R.inverse()
    target = polynomial_carrier(n, names=[f"y{i + 1}" for i in range(n)])
    images = [None] * len(carrier)
    for i in range(n):
        x = target.zero()
        for k in range(n):
            if Rinv[i, k]:
                x = x + target.gen("x", k).scale(Rinv[i, k])
        images[carrier.slot("x", i)] = x
        v = target.zero()
        for k in range(n):
            if R[k, i]:
                v = v + target.gen("vx", k).scale(R[k, i])
        images[carrier.slot("vx", i)] = v
        images[carrier.slot("dx", i)] = target.zero()
    return PoissonStructure(target, substitute(pi.bivector, images, target))


def eigencoordinates(pi, nu, spectrum):
    """(pi, nu) unchanged when nu is diagonal; otherwise both transported."""
    if not spectrum.semisimple:
        raise Unsupported(f"modular vector is {spectrum.verdict}")
    if spectrum.change_of_basis is None:
        return pi, nu
    new = transport(pi, spectrum.change_of_basis)
    from .calculus import modular_vector

    return new, modular_vector(new)


def slot_weights(carrier, eigenvalues):
    """Modular eigenweight of every generator slot.

    Coordinates and their differentials carry lambda_i; the dual symbols
    (coordinate vector fields, xi*) carry -lambda_i.
    """
    w = [Fraction(0)] * len(carrier)
    kinds = ("x", "dx") if carrier.carrier_kind == "polynomial" else ("xi", "dxi")
    duals = ("vx",) if carrier.carrier_kind == "polynomial" else ("vxi", "sxi")
    for i, lam in enumerate(eigenvalues):
        for k in kinds:
            w[carrier.slot(k, i)] = Fraction(lam)
        for k in duals:
            w[carrier.slot(k, i)] = -Fraction(lam)
    return tuple(w)


def modular_weight(m, weights):
    """Sum of the eigenweights over the factors of the monomial m."""
    return sum((Fraction(weights[k]) * e for k, e in enumerate(m) if e), Fraction(0))


def element_modular_weights(e, weights):
    return {modular_weight(m, weights) for m in e.terms}


def homotopy_identity_check(b, B, basis, lam, carrier):
    """Check b B + B b = lam * Id on the given basis of one lambda-slice.

    Returns ``(True, None)`` or ``(False, witness)``.
    """
    for m in basis:
        e = Element(carrier, {m: 1})
        lhs = b(B(e)) + B(b(e))
        if lhs != e.scale(lam):
            return False, {"basis": m, "lhs": lhs, "expected": e.scale(lam)}
    return True, None


def _graded_setup(pi):
    from .calculus import modular_vector

    nu = modular_vector(pi)
    spectrum = analyze_modular(nu)
    if spectrum.change_of_basis is not None and pi.carrier.carrier_kind != "polynomial":
        raise Unsupported("exterior structures must already be in eigencoordinates")
    pi, nu = eigencoordinates(pi, nu, spectrum)
    if spectrum.change_of_basis is not None:
        spectrum = analyze_modular(nu)
    return pi, nu, slot_weights(pi.carrier, spectrum.eigenvalues)


def _mixed_operators(pi, nu):
    """(space, b, B, chain variant) of the twisted chain-type complex of pi."""
    from .calculus import (
        coform_boundary,
        coforms,
        de_rham,
        dual_de_rham,
        forms,
        twisted_boundary,
    )
    from .homology import CHAIN, EXTERIOR_TWISTED

    if pi.carrier.carrier_kind == "polynomial":
        return forms(pi.carrier), (lambda e: twisted_boundary(pi, nu, e)), de_rham, CHAIN
    return coforms(pi.carrier), (lambda e: coform_boundary(pi, nu, e)), dual_de_rham, EXTERIOR_TWISTED


def homotopy_suite(pi, window=4):
    """b B + B b = lam * Id on every lam-slice of the twisted chain-type complex in the window.

    On polynomial carriers b is the twisted boundary and B = d on forms; on
    exterior carriers they are the twisted coform boundary and d*.  The
    lam = 0 slices are exactly the mixed-complex condition.  Returns a
    CheckResult whose detail counts the slices with lam = 0 and lam != 0.
    """
    from .homology import weight_range
    from .results import CheckResult

    pi, nu, weights = _graded_setup(pi)
    carrier = pi.carrier
    space, b, B, _ = _mixed_operators(pi, nu)
    res = CheckResult("homotopy identity", True, detail={"zero": 0, "nonzero": 0})
    for p in range(carrier.n + 1):
        for w in weight_range(window):
            for lam in sorted({modular_weight(m, weights) for m in space.basis(p, w)}):
                basis = space.basis(p, w, modular=weights, lam=lam)
                ok, witness = homotopy_identity_check(b, B, basis, lam, carrier)
                res.checked += 1
                res.detail["zero" if lam == 0 else "nonzero"] += 1
                if not ok:
                    res.passed = False
                    res.witness = {"slice": (p, w, lam), **{k: str(v) for k, v in witness.items()}}
                    return res
    return res


def weight_zero_subcomplex(pi, window=4):
    """The modular-weight-zero mixed complex (b, B) of pi."""
    from .bv import MixedComplexData
    from .homology import build_complex

    pi, nu, weights = _graded_setup(pi)
    _, _, B, variant = _mixed_operators(pi, nu)
    chain = build_complex(pi, nu, variant, weights)
    return MixedComplexData(chain, B, pi.n, chain.weight_step, 0, window)


def quasi_isomorphism_suite(pi, window=4):
    """The inclusion of the weight-zero part is a quasi-isomorphism, slice by slice.

    Two results: homology dimensions of CP^0 and CP agree on every
    (degree, w) slice, and on every lam != 0 slice the homotopy
    (1/lam)(b B + B b) equals Id - i o p (which is Id there, while
    p o i = Id on CP^0 because both maps are coordinate inclusions).
    """
    from .homology import build_complex, weight_range
    from .results import CheckResult

    pi, nu, weights = _graded_setup(pi)
    carrier = pi.carrier
    _, b, B, variant = _mixed_operators(pi, nu)
    cx = build_complex(pi, nu, variant, weights)
    dims = CheckResult("weight-zero homology equals full homology", True, detail={"table": {}})
    homotopy = CheckResult("contracting homotopy off weight zero", True)
    for p in range(carrier.n + 1):
        for w in weight_range(window):
            if not cx.basis(p, w):
                continue
            full = cx.homology(p, w).dim
            zero = cx.homology(p, w, 0).dim if cx.basis(p, w, 0) else 0
            dims.checked += 1
            dims.detail["table"][(p, w)] = (zero, full)
            if zero != full and dims.passed:
                dims.passed = False
                dims.witness = {"slice": (p, w), "weight-zero": zero, "full": full}
            for m in cx.basis(p, w):
                lam = modular_weight(m, weights)
                if lam == 0:
                    continue
                # off weight zero, Id - i o p is the identity
                e = Element(carrier, {m: 1})
                h = b(B(e)) + B(b(e))
                homotopy.checked += 1
                if h.scale(1 / lam) != e and homotopy.passed:
                    homotopy.passed = False
                    homotopy.witness = {"slice": (p, w, lam), "basis": str(e)}
    return [dims, homotopy]


def project_lambda(e, weights, lam):
    """Component of e of modular weight lam."""
    lam = Fraction(lam)
    return Element(e.carrier, {m: c for m, c in e.terms.items() if modular_weight(m, weights) == lam})


__all__ = [
    "ModularSpectrum",
    "Unsupported",
    "analyze_modular",
    "characteristic_polynomial",
    "homotopy_suite",
    "quasi_isomorphism_suite",
    "weight_zero_subcomplex",
    "eigencoordinates",
    "homotopy_identity_check",
    "linear_action",
    "modular_weight",
    "project_lambda",
    "rational_roots",
    "slot_weights",
    "transport",
]
