"""Koszul duality between quadratic Poisson polynomials and Poisson exterior algebras.

The dual of a quadratic structure on R[x_1..x_n] lives on Lambda(xi_1..xi_n)
and has the same structure constants with the roles of coordinates and
directions exchanged.  The correspondences

    Psi : x_i -> Dxi_i,  Dx_i -> xi_i          (polyvectors to polyvectors)
    Phi : x_i -> Dxi_i,  dx_i -> xi_i*         (forms to coforms)

are algebra maps given on generators; all Koszul signs come from the
multiplication on the exterior carrier.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import (
    PoissonStructure,
    coform_boundary,
    coforms,
    contract_volume,
    expand_quadratic,
    exterior_coboundary,
    forms,
    jacobi_check,
    modular_vector,
    poisson_coboundary,
    polyvectors,
    twisted_boundary,
)
from .graded import Element, exterior_carrier, operator_matrix, substitute
from .homology import (
    CHAIN,
    COCHAIN,
    EXTERIOR_COCHAIN,
    EXTERIOR_TWISTED,
    build_complex,
    weight_range,
)
from .results import CheckResult
from .spectral import analyze_modular, slot_weights


class NotQuadratic(ValueError):
    """Koszul duality is only defined for quadratic structures."""


class JacobiMismatch(RuntimeError):
    """The primal and dual Jacobi checks disagree."""


@dataclass(frozen=True)
class DualPair:
    primal: PoissonStructure
    dual: PoissonStructure
    constants: dict
    primal_jacobi: bool
    dual_jacobi: bool

    @property
    def n(self):
        return self.primal.n


def koszul_dual(pi, *, require_poisson=True):
    """The Koszul-dual structure on the exterior algebra with the same constants."""
    if pi.carrier.carrier_kind != "polynomial":
        raise ValueError("the primal structure must live on a polynomial carrier")
    if not pi.is_quadratic:
        raise NotQuadratic("the bivector is not quadratic, so it has no Koszul dual")
    carrier = exterior_carrier(pi.n)
    constants = dict(pi.quadratic_constants)
    dual = PoissonStructure(carrier, expand_quadratic(carrier, constants), constants)
    ok_primal, _ = jacobi_check(pi)
    ok_dual, _ = jacobi_check(dual)
    if ok_primal != ok_dual:
        raise JacobiMismatch(f"Jacobi holds on the {'primal' if ok_primal else 'dual'} side only")
    if require_poisson and not ok_primal:
        raise ValueError("the bivector does not satisfy the Jacobi identity")
    return DualPair(pi, dual, constants, ok_primal, ok_dual)


def _images(source, target, third):
    n = source.n
    images = [None] * len(source)
    for i in range(n):
        images[source.slot("x", i)] = target.gen("vxi", i)
        images[source.slot("vx", i)] = target.gen("xi", i)
        images[source.slot("dx", i)] = target.gen(third, i)
    return images


def psi(P, target=None):
    """Polyvectors on A to polyvectors on A^!: x_i -> Dxi_i, Dx_i -> xi_i."""
    target = target or exterior_carrier(P.carrier.n)
    if any(m[k] for m in P.terms for k in P.carrier.slots("dx")):
        raise ValueError("psi acts on polyvectors only")
    return substitute(P, _images(P.carrier, target, "sxi"), target)


def phi(omega, target=None):
    """Forms on A to coforms on A^!: x_i -> Dxi_i, dx_i -> xi_i*."""
    target = target or exterior_carrier(omega.carrier.n)
    if any(m[k] for m in omega.terms for k in omega.carrier.slots("vx")):
        raise ValueError("phi acts on forms only")
    return substitute(omega, _images(omega.carrier, target, "sxi"), target)


# --- checks -----------------------------------------------------------------


def modular_correspondence_check(pair):
    """Psi(nu) = nu^!, both sides computed from their own divergence."""
    nu = modular_vector(pair.primal)
    nu_dual = modular_vector(pair.dual)
    image = psi(nu, pair.dual.carrier)
    ok = image == nu_dual
    return CheckResult(
        "modular correspondence",
        ok,
        1,
        witness=None if ok else {"psi(nu)": str(image), "nu!": str(nu_dual)},
        detail={"nu": str(nu), "nu!": str(nu_dual)},
    )


def _slices(space, n, window):
    for p in range(n + 1):
        for w in weight_range(window):
            basis = space.basis(p, w)
            if basis:
                yield p, w, basis


def bijectivity_check(pair, window=4):
    """Psi and Phi are square, full-rank matrices between corresponding slices."""
    res = CheckResult("psi and phi are slice bijections", True, 0)
    E = pair.dual.carrier
    A = pair.primal.carrier
    for name, src, dst, op in (
        ("psi", polyvectors(A), polyvectors(E), lambda e: psi(e, E)),
        ("phi", forms(A), coforms(E), lambda e: phi(e, E)),
    ):
        for p, w, basis in _slices(src, pair.n, window):
            cod = dst.basis(p, w)
            M = operator_matrix(op, basis, cod, carrier=A, codomain_carrier=E)
            res.checked += 1
            if len(cod) != len(basis) or M.rank() != len(basis):
                res.passed = False
                res.witness = {"map": name, "slice": (p, w), "rows": len(cod), "cols": len(basis)}
                return res
    return res


def psi_chain_map_check(pair, window=4):
    """Psi o delta = delta^! o Psi on every polyvector basis element of the window."""
    res = CheckResult("psi is a chain map", True, 0)
    E = pair.dual.carrier
    for p, w, basis in _slices(polyvectors(pair.primal.carrier), pair.n, window):
        for m in basis:
            e = Element(pair.primal.carrier, {m: 1})
            lhs = psi(poisson_coboundary(pair.primal, e), E)
            rhs = exterior_coboundary(pair.dual, psi(e, E))
            res.checked += 1
            if lhs != rhs:
                res.passed = False
                res.witness = {"slice": (p, w), "basis": str(e), "lhs": str(lhs), "rhs": str(rhs)}
                return res
    return res


def phi_chain_map_check(pair, window=4, phi_map=None):
    """Phi o d_nu = (twisted coform boundary with nu^!) o Phi on forms of the window."""
    phi_map = phi_map or phi
    res = CheckResult("phi is a chain map", True, 0)
    E = pair.dual.carrier
    nu, nu_dual = modular_vector(pair.primal), modular_vector(pair.dual)
    for p, w, basis in _slices(forms(pair.primal.carrier), pair.n, window):
        for m in basis:
            e = Element(pair.primal.carrier, {m: 1})
            lhs = phi_map(twisted_boundary(pair.primal, nu, e), E)
            rhs = coform_boundary(pair.dual, nu_dual, phi_map(e, E))
            res.checked += 1
            if lhs != rhs:
                res.passed = False
                res.witness = {"slice": (p, w), "basis": str(e), "lhs": str(lhs), "rhs": str(rhs)}
                return res
    return res


def SQUARE_SIGN(p):
    """Pinned sign of the duality square on polyvector degree p: (-1)^p.

    The two contractions follow different pairing conventions (nested
    derivatives on forms, the Frobenius pairing on coforms), so the square
    commutes only up to this per-degree sign; the sign-table test records it.
    """
    return -1 if p % 2 else 1


def corrupted_phi(degree):
    """Mutation: Phi with its sign dropped on forms of one degree."""

    def mutated(omega, target=None):
        out = phi(omega, target)
        part = Element(omega.carrier, {m: c for m, c in omega.terms.items() if sum(m[k] for k in omega.carrier.slots("dx")) == degree})
        return out - phi(part, target).scale(2)

    return mutated


def pd_square_check(pair, window=4, phi_map=None):
    """The duality square Phi o i_(-)vol = SQUARE_SIGN(p) * i^!_(-)vol^! o Psi, slice by slice.

    ``detail["signs"]`` records, per degree, the sign actually observed (or
    None when no slice of that degree is nonzero after both maps).
    """
    phi_map = phi_map or phi
    E = pair.dual.carrier
    res = CheckResult("duality square", True, 0, detail={"signs": {}, "pinned": {}})
    observed = res.detail["signs"]
    for p, w, basis in _slices(polyvectors(pair.primal.carrier), pair.n, window):
        res.detail["pinned"][p] = SQUARE_SIGN(p)
        for m in basis:
            e = Element(pair.primal.carrier, {m: 1})
            top = phi_map(contract_volume(e), E)
            bottom = contract_volume(psi(e, E))
            res.checked += 1
            if top == bottom:
                s = 1
            elif top == -bottom:
                s = -1
            else:
                s = 0
            if s and observed.get(p, s) == s:
                observed[p] = s
            else:
                observed[p] = None
            if s != SQUARE_SIGN(p):
                res.passed = False
                res.witness = {"slice": (p, w), "basis": str(e), "top": str(top), "bottom": str(bottom)}
                return res
    return res


def _dims(cx, window, lam_map=None, weights=False):
    out = {}
    for p in cx.degrees:
        for w in weight_range(window):
            lams = cx.lambdas(p, w) if weights else [None]
            for lam in lams:
                if cx.basis(p, w, lam):
                    out[(p, w, lam)] = cx.homology(p, w, lam).dim
    return out


def dimension_correspondence(pair, window=4):
    """Homology dimensions on both sides at corresponding addresses.

    Polyvector cohomology of A at (p, w, lam) is compared with that of A^! at
    (p, w, -lam); twisted form homology of A with the twisted coform complex
    of A^! at the same correspondence.  Modular weights are used only when
    the modular vector is semisimple.
    """
    A, D = pair.primal, pair.dual
    nu, nu_dual = modular_vector(A), modular_vector(D)
    spec = analyze_modular(nu)
    graded = spec.semisimple and spec.change_of_basis is None
    wA = slot_weights(A.carrier, spec.eigenvalues) if graded else None
    wD = slot_weights(D.carrier, spec.eigenvalues) if graded else None
    results = []
    for label, (va, vb, ta, tb) in {
        "cohomology": (COCHAIN, EXTERIOR_COCHAIN, None, None),
        "twisted homology": (CHAIN, EXTERIOR_TWISTED, nu, nu_dual),
    }.items():
        ca = build_complex(A, ta, va, wA)
        cb = build_complex(D, tb, vb, wD)
        da = _dims(ca, window, weights=graded)
        res = CheckResult(f"{label} dimensions agree", True, 0, detail={"table": {}})
        for (p, w, lam), dim in sorted(da.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0)):
            other = (p, w, None if lam is None else -lam)
            db = cb.homology(*other).dim if cb.basis(*other) else 0
            res.checked += 1
            res.detail["table"][(p, w, lam)] = (dim, db)
            if dim != db and res.passed:
                res.passed = False
                res.witness = {"address": (p, w, lam), "primal": dim, "dual": db}
        results.append(res)
    return results


def koszul_suite(pi, window=4):
    """All Koszul checks for one quadratic structure."""
    pair = koszul_dual(pi)
    out = [modular_correspondence_check(pair), bijectivity_check(pair, window)]
    out.append(psi_chain_map_check(pair, window))
    out.append(phi_chain_map_check(pair, window))
    out.append(pd_square_check(pair, window))
    out.extend(dimension_correspondence(pair, window))
    return pair, out


__all__ = [
    "DualPair",
    "JacobiMismatch",
    "NotQuadratic",
    "SQUARE_SIGN",
    "bijectivity_check",
    "corrupted_phi",
    "dimension_correspondence",
    "koszul_dual",
    "koszul_suite",
    "modular_correspondence_check",
    "pd_square_check",
    "phi",
    "phi_chain_map_check",
    "psi",
    "psi_chain_map_check",
]
