"""Polyvectors, forms and the Poisson operators on them.

Polynomial carriers hold R[x] with odd symbols ``Dx_i`` (the coordinate
vector fields) and ``dx_i``.  Exterior carriers hold Lambda(xi) with even
``Dxi_i``, even ``dxi_i`` and odd ``xi_i*``.  A polyvector is an element in
the coordinate and ``D`` generators; a form is an element in the coordinate
and ``d`` generators.

Conventions (pinned by tests):

* a polyvector ``f Dx_{k1}...Dx_{kp}`` evaluates on functions by the
  determinant ``f det[d f_b / d x_{k_a}]``;
* contraction is ``i_{X^Y} = i_X o i_Y``, each ``i_{Dx_k}`` being the left
  derivative in ``dx_k``;
* the volume forms are ``dx_1...dx_n`` and ``xi_1*...xi_n*``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .graded import (
    CarrierSpec,
    Element,
    coordinates,
    count,
    from_coordinates,
    left_derivative,
    monomial_product,
    multiply,
    operator_matrix,
    polynomial_carrier,
    right_derivative,
    scaling_weight,
    slice_basis,
)


class NotPolyvector(ValueError):
    pass


class InternalInconsistency(RuntimeError):
    """A structural identity that must hold failed; signals a convention bug."""


# --- spaces ---------------------------------------------------------------


@dataclass(frozen=True)
class Space:
    """A family of finite slices inside a carrier.

    ``allowed`` are the generator slots that may occur, ``degree_slots`` the
    ones whose count is the degree of a monomial.
    """

    label: str
    carrier: CarrierSpec
    allowed: tuple
    degree_slots: tuple

    def degree(self, m):
        return count(m, self.degree_slots)

    def weight(self, m):
        return scaling_weight(self.carrier, m)

    def basis(self, degree, weight, modular=None, lam=None):
        mod = None if modular is None else (modular, Fraction(lam))
        return slice_basis(
            self.carrier,
            self.allowed,
            weight=weight,
            counts=[(self.degree_slots, degree)],
            modular=mod,
        )

    def contains(self, e):
        allowed = set(self.allowed)
        return all(all(k in allowed for k, v in enumerate(m) if v) for m in e.terms)


def polyvectors(carrier):
    if carrier.carrier_kind == "polynomial":
        return Space("X(A)", carrier, carrier.slots("x") + carrier.slots("vx"), carrier.slots("vx"))
    return Space("X(A!)", carrier, carrier.slots("xi") + carrier.slots("vxi"), carrier.slots("xi"))


def forms(carrier):
    if carrier.carrier_kind == "polynomial":
        return Space("Omega(A)", carrier, carrier.slots("x") + carrier.slots("dx"), carrier.slots("dx"))
    return Space("Omega(A!)", carrier, carrier.slots("xi") + carrier.slots("dxi"), carrier.slots("xi"))


def coforms(carrier):
    """X_{A!}(A^coalg) = Hom(Omega(A!), k), spanned by Dxi and xi* monomials."""
    if carrier.carrier_kind != "exterior":
        raise ValueError("coforms live on exterior carriers")
    return Space("X(A!,A!*)", carrier, carrier.slots("vxi") + carrier.slots("sxi"), carrier.slots("sxi"))


def _function_slots(carrier):
    return carrier.slots("x") if carrier.carrier_kind == "polynomial" else carrier.slots("xi")


def _direction_slots(carrier):
    return carrier.slots("vx") if carrier.carrier_kind == "polynomial" else carrier.slots("vxi")


def _form_slots(carrier):
    return carrier.slots("dx") if carrier.carrier_kind == "polynomial" else carrier.slots("dxi")


def polyvector_degree(P):
    """Number of direction factors; raises if P is not homogeneous."""
    dirs = _direction_slots(P.carrier)
    degs = {count(m, dirs) for m in P.terms}
    if len(degs) > 1:
        raise NotPolyvector("polyvector is not homogeneous")
    return degs.pop() if degs else 0


def _check_polyvector(P):
    allowed = set(polyvectors(P.carrier).allowed)
    for m in P.terms:
        if any(v and k not in allowed for k, v in enumerate(m)):
            raise NotPolyvector("element is not a polyvector")


def _check_form(w):
    allowed = set(forms(w.carrier).allowed)
    for m in w.terms:
        if any(v and k not in allowed for k, v in enumerate(m)):
            raise ValueError("element is not a form")


# --- Poisson structures ---------------------------------------------------


@dataclass(frozen=True)
class PoissonStructure:
    carrier: CarrierSpec
    bivector: Element
    quadratic_constants: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        _check_polyvector(self.bivector)
        if self.bivector and polyvector_degree(self.bivector) != 2:
            raise NotPolyvector("a Poisson structure must be a bivector")
        if self.quadratic_constants is None:
            object.__setattr__(self, "quadratic_constants", extract_quadratic_constants(self.bivector))
        elif expand_quadratic(self.carrier, self.quadratic_constants) != self.bivector:
            raise ValueError("quadratic constants do not reproduce the bivector")

    @property
    def n(self):
        return self.carrier.n

    @property
    def is_quadratic(self):
        return self.quadratic_constants is not None

    def weight_shift(self):
        """Scaling weight of the bivector; None when it is not homogeneous."""
        ws = {scaling_weight(self.carrier, m) for m in self.bivector.terms}
        if not ws:
            return 0
        if len(ws) > 1:
            return None
        return ws.pop()


def extract_quadratic_constants(bivector):
    """``{((i1, i2), (j1, j2)): c}`` with i1 <= i2 and j1 < j2, or None.

    On polynomial carriers the key means ``c x_i1 x_i2 Dx_j1 Dx_j2``; on
    exterior carriers it means ``c xi_j1 xi_j2 Dxi_i1 Dxi_i2``.
    """
    carrier = bivector.carrier
    fs, ds = _function_slots(carrier), _direction_slots(carrier)
    out = {}
    for m, c in bivector.terms.items():
        fi = [i for i, k in enumerate(fs) for _ in range(m[k])]
        di = [i for i, k in enumerate(ds) for _ in range(m[k])]
        if len(fi) != 2 or len(di) != 2:
            return None
        if carrier.carrier_kind == "polynomial":
            key = (tuple(fi), tuple(di))
        else:
            key = (tuple(di), tuple(fi))
        out[key] = c
    return out


def expand_quadratic(carrier, constants):
    """Bivector from quadratic structure constants (either carrier kind)."""
    out = carrier.zero()
    for ((i1, i2), (j1, j2)), c in constants.items():
        if carrier.carrier_kind == "polynomial":
            t = carrier.gen("x", i1) * carrier.gen("x", i2) * carrier.gen("vx", j1) * carrier.gen("vx", j2)
        else:
            t = carrier.gen("xi", j1) * carrier.gen("xi", j2) * carrier.gen("vxi", i1) * carrier.gen("vxi", i2)
        out = out + t.scale(c)
    return out


def bivector_from_matrix(carrier, entries):
    """Polynomial bivector ``sum_{j<k} entries[(j, k)] Dx_j Dx_k``; entries are Elements."""
    out = carrier.zero()
    for (j, k), f in entries.items():
        out = out + f * carrier.gen("vx", j) * carrier.gen("vx", k)
    return out


# --- functions and vector fields -----------------------------------------


def partial(f, i):
    """d f / d x_i for a polynomial (or any element; x_i is even)."""
    return left_derivative(f, f.carrier.slot("x", i))


def evaluate(P, args):
    """Value of a polynomial polyvector on the functions ``args``."""
    carrier = P.carrier
    vx = carrier.slots("vx")
    x = carrier.slots("x")
    p = len(args)
    if not P:
        return carrier.zero()
    if polyvector_degree(P) != p:
        raise ValueError("wrong number of arguments")
    dcache = {}

    def d(i, b):
        if (i, b) not in dcache:
            dcache[(i, b)] = partial(args[b], i)
        return dcache[(i, b)]

    out = carrier.zero()
    for m, c in P.terms.items():
        K = [i for i, k in enumerate(vx) if m[k]]
        coeff = [0] * len(m)
        for k in x:
            coeff[k] = m[k]
        coeff = Element(carrier, {tuple(coeff): c})
        det = carrier.zero()
        for perm in permutations(range(p)):
            sign = _perm_sign(perm)
            term = carrier.one()
            for a in range(p):
                term = term * d(K[a], perm[a])
                if not term:
                    break
            if term:
                det = det + (term if sign > 0 else -term)
        out = out + coeff * det
    return out


def _perm_sign(perm):
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def apply_vector_field(X, f):
    """X(f) for a polynomial vector field X and function f."""
    return evaluate(X, [f])


def poisson_bracket(pi, f, g):
    """{f, g} = pi(f, g) on a polynomial carrier."""
    if not pi.bivector:
        return pi.carrier.zero()
    return evaluate(pi.bivector, [f, g])


# --- Schouten bracket -----------------------------------------------------


def _conjugate_pairs(carrier):
    if carrier.carrier_kind == "polynomial":
        return list(zip(carrier.slots("x"), carrier.slots("vx")))
    return list(zip(carrier.slots("xi"), carrier.slots("vxi")))


def schouten(P, Q):
    """Schouten-Nijenhuis bracket; on vector fields it is the commutator."""
    _check_polyvector(P)
    _check_polyvector(Q)
    if P.carrier != Q.carrier:
        raise ValueError("carrier mismatch")
    out = P.carrier.zero()
    for q, p in _conjugate_pairs(P.carrier):
        a = right_derivative(P, p)
        if a:
            b = left_derivative(Q, q)
            if b:
                out = out + multiply(a, b)
        a = right_derivative(P, q)
        if a:
            b = left_derivative(Q, p)
            if b:
                out = out - multiply(a, b)
    return out


def jacobi_check(pi):
    """``(True, None)`` when [pi, pi] = 0, else ``(False, [pi, pi])``."""
    w = schouten(pi.bivector, pi.bivector)
    return (not w, None if not w else w)


# --- cochain differential -------------------------------------------------


def poisson_coboundary(pi, P):
    """Lichnerowicz differential from the alternating-sum formula.

    delta(P)(f_0..f_p) = sum_i (-1)^i {f_i, P(..^f_i..)}
                       + sum_{i<j} (-1)^(i+j) P({f_i, f_j}, ..^f_i..^f_j..)
    evaluated on coordinate functions.  On exterior carriers delta is the
    bracket with pi (same sign table as the polynomial formula).
    """
    carrier = pi.carrier
    if carrier.carrier_kind == "exterior":
        return exterior_coboundary(pi, P)
    _check_polyvector(P)
    if not P or not pi.bivector:
        return carrier.zero()
    p = polyvector_degree(P)
    n = carrier.n
    if p + 1 > n:
        return carrier.zero()
    xs = [carrier.gen("x", i) for i in range(n)]
    bracket = {}

    def br(i, j):
        if (i, j) not in bracket:
            bracket[(i, j)] = poisson_bracket(pi, xs[i], xs[j])
        return bracket[(i, j)]

    out = carrier.zero()
    for K in combinations(range(n), p + 1):
        val = carrier.zero()
        for i in range(p + 1):
            rest = [xs[k] for k in K[:i] + K[i + 1 :]]
            inner = evaluate(P, rest) if p else P
            if inner:
                val = val + poisson_bracket(pi, xs[K[i]], inner).scale((-1) ** i)
        for i, j in combinations(range(p + 1), 2):
            g = br(K[i], K[j])
            if not g:
                continue
            rest = [xs[k] for t, k in enumerate(K) if t not in (i, j)]
            val = val + evaluate(P, [g] + rest).scale((-1) ** (i + j))
        if val:
            frame = carrier.one()
            for k in K:
                frame = frame * carrier.gen("vx", k)
            out = out + val * frame
    return out


def exterior_coboundary(pi, P):
    """delta on Lambda(xi, Dxi): the bracket with pi^!, signed like the polynomial case."""
    _check_polyvector(P)
    out = P.carrier.zero()
    for deg, part in P.homogeneous_parts(lambda m: count(m, P.carrier.slots("xi"))).items():
        out = out + schouten(pi.bivector, part).scale(COBOUNDARY_SIGN(deg))
    return out


def COBOUNDARY_SIGN(p):
    """Exterior side: delta(P) = COBOUNDARY_SIGN(p) * [pi!, P].

    The minus sign makes the substitution x_i -> Dxi_i, Dx_i -> xi_i a chain
    map, because it swaps the roles of the two members of each conjugate
    pair and so reverses the Schouten bracket.  Polynomial delta equals
    +[pi, P] in every degree.
    """
    return -1


# --- forms ----------------------------------------------------------------


def de_rham(omega):
    """Exterior derivative d = sum_i dx_i d/dx_i acting from the left."""
    carrier = omega.carrier
    out = carrier.zero()
    for q, dq in zip(_function_slots(carrier), _form_slots(carrier)):
        t = left_derivative(omega, q)
        if t:
            out = out + multiply(Element(carrier, {_unit(carrier, dq): 1}), t)
    return out


def _unit(carrier, slot):
    m = [0] * len(carrier)
    m[slot] = 1
    return tuple(m)


def contract(phi, omega):
    """Interior product i_phi(omega) with i_{X^Y} = i_X o i_Y."""
    carrier = phi.carrier
    fslots = _function_slots(carrier)
    dslots = _direction_slots(carrier)
    formslots = _form_slots(carrier)
    out = carrier.zero()
    for m, c in phi.terms.items():
        t = omega
        for d, f in reversed(list(zip(dslots, formslots))):
            for _ in range(m[d]):
                t = left_derivative(t, f)
                if not t:
                    break
            if not t:
                break
        if not t:
            continue
        coeff = [0] * len(m)
        for k in fslots:
            coeff[k] = m[k]
        out = out + multiply(Element(carrier, {tuple(coeff): c}), t)
    return out


def poisson_boundary(pi, omega):
    """Koszul-Brylinski boundary on polynomial forms, from the explicit formula.

    d_pi(m df_1..df_p) = sum_i (-1)^(i-1) {m, f_i} df_1..^..df_p
                       + sum_{i<j} (-1)^(j-i) m d{f_i, f_j} df_1..^..^..df_p
    """
    return _boundary(pi, None, omega)


def twisted_boundary(pi, nu, omega):
    """Boundary of CP_*(A, A_nu): poisson_boundary plus the contraction with nu.

    Warns when nu is not a Poisson derivation.
    """
    if nu is not None and nu and schouten(nu, pi.bivector):
        warnings.warn("nu is not a Poisson derivation; d_nu may not square to zero")
    return _boundary(pi, nu, omega)


def _boundary(pi, nu, omega):
    carrier = pi.carrier
    if carrier.carrier_kind == "exterior":
        return exterior_boundary(pi, nu, omega)
    _check_form(omega)
    n = carrier.n
    xs = [carrier.gen("x", i) for i in range(n)]
    dxs = [carrier.gen("dx", i) for i in range(n)]
    dx = carrier.slots("dx")
    bracket = {}

    def br(i, j):
        if (i, j) not in bracket:
            bracket[(i, j)] = poisson_bracket(pi, xs[i], xs[j])
        return bracket[(i, j)]

    nu_x = [apply_vector_field(nu, xs[i]) if nu else carrier.zero() for i in range(n)]
    out = carrier.zero()
    for mono, c in omega.terms.items():
        K = [i for i in range(n) if mono[dx[i]]]
        mlist = list(mono)
        for k in dx:
            mlist[k] = 0
        m = Element(carrier, {tuple(mlist): c})
        p = len(K)
        for i in range(p):
            rest = carrier.one()
            for t, k in enumerate(K):
                if t != i:
                    rest = rest * dxs[k]
            coef = poisson_bracket(pi, m, xs[K[i]]) if pi.bivector else carrier.zero()
            if nu_x[K[i]]:
                coef = coef + nu_x[K[i]] * m
            if coef:
                out = out + (coef * rest).scale((-1) ** i)
        for i, j in combinations(range(p), 2):
            g = br(K[i], K[j])
            if not g:
                continue
            rest = carrier.one()
            for t, k in enumerate(K):
                if t not in (i, j):
                    rest = rest * dxs[k]
            out = out + (m * de_rham(g) * rest).scale((-1) ** (j - i))
    return out


def boundary_via_contraction(pi, omega):
    """[i_pi, d] = i_pi d - d i_pi, the carrier-independent form of the boundary."""
    return contract(pi.bivector, de_rham(omega)) - de_rham(contract(pi.bivector, omega))


def BOUNDARY_SIGN():
    """d_pi = BOUNDARY_SIGN() * (i_pi d - d i_pi); agrees with the explicit polynomial formula."""
    return -1


def exterior_boundary(pi, nu, omega):
    """Boundary on Omega(A!) = Lambda(xi, dxi), optionally twisted by nu."""
    out = boundary_via_contraction(pi, omega).scale(BOUNDARY_SIGN())
    if nu is not None and nu:
        out = out + contract(nu, omega)
    return out


# --- volume forms, divergence, modular vector -----------------------------


@dataclass(frozen=True)
class VolumeForm:
    carrier: CarrierSpec
    form: Element

    @classmethod
    def standard(cls, carrier):
        if carrier.carrier_kind == "polynomial":
            f = carrier.one()
            for i in range(carrier.n):
                f = f * carrier.gen("dx", i)
        else:
            f = carrier.one()
            for i in range(carrier.n):
                f = f * carrier.gen("sxi", i)
        return cls(carrier, f)


def contract_volume(phi, vol=None):
    """phi |-> i_phi(vol).  On exterior carriers this is the Frobenius map into coforms."""
    carrier = phi.carrier
    if vol is None:
        vol = VolumeForm.standard(carrier)
    if carrier.carrier_kind == "polynomial":
        return contract(phi, vol.form)
    return frobenius_contract(phi)


def frobenius_contract(phi):
    """i_phi(eta!) as a coform.

    ``xi_I Dxi^a`` goes to ``e(I) Dxi^a xi*_{I^c}`` where ``xi_I xi_{I^c} =
    s(I) xi_1...xi_n`` and ``e(I) = s(I) (-1)^{p(p+1)/2}`` for ``p = |I|``.  The
    extra factor comes from pairing ``<xi_I, xi*_I> = (-1)^{|xi_I||xi*_I|}
    xi*_I(xi_I)`` with nested evaluation.
    """
    carrier = phi.carrier
    n = carrier.n
    xi, vxi, sxi = carrier.slots("xi"), carrier.slots("vxi"), carrier.slots("sxi")
    out = {}
    for m, c in phi.terms.items():
        I = [i for i in range(n) if m[xi[i]]]
        comp = [i for i in range(n) if i not in I]
        p = len(I)
        s, _ = monomial_product(carrier, _unit_many(carrier, [xi[i] for i in I]), _unit_many(carrier, [xi[i] for i in comp]))
        s *= (-1) ** (p * (p + 1) // 2)
        mm = [0] * len(m)
        for i in range(n):
            mm[vxi[i]] = m[vxi[i]]
        for i in comp:
            mm[sxi[i]] = 1
        mm = tuple(mm)
        out[mm] = out.get(mm, 0) + s * c
    return Element(carrier, out)


def _unit_many(carrier, slots):
    m = [0] * len(carrier)
    for k in slots:
        m[k] = 1
    return tuple(m)


def divergence(P, vol=None):
    """Div = i^{-1} o D o i with D = d (polynomial) or d* (exterior)."""
    carrier = P.carrier
    _check_polyvector(P)
    if carrier.carrier_kind == "polynomial":
        image = de_rham(contract_volume(P, vol))
    else:
        image = dual_de_rham(contract_volume(P, vol))
    return contract_volume_inverse(image, carrier, vol)


def contract_volume_inverse(target, carrier, vol=None):
    """Solve i_phi(vol) = target slice by slice."""
    n = carrier.n
    cod = forms(carrier) if carrier.carrier_kind == "polynomial" else coforms(carrier)
    dom = polyvectors(carrier)
    out = carrier.zero()
    parts = target.homogeneous_parts(lambda m: (cod.degree(m), cod.weight(m)))
    for (deg, w), part in sorted(parts.items()):
        dbasis = dom.basis(n - deg, w - n)
        cbasis = cod.basis(deg, w)
        M = operator_matrix(lambda e: contract_volume(e, vol), dbasis, cbasis, carrier=carrier)
        sol = M.solve(coordinates(part, cbasis))
        if sol is None or M.rank() != len(dbasis) or len(dbasis) != len(cbasis):
            raise InternalInconsistency(f"contraction with the volume form is singular at degree {deg}, weight {w}")
        out = out + from_coordinates(carrier, dbasis, sol)
    return out


def modular_vector(pi, vol=None):
    """nu = -Div(pi); checks that nu is a Poisson derivation and a 1-cocycle."""
    nu = -divergence(pi.bivector, vol)
    if schouten(nu, pi.bivector):
        raise InternalInconsistency("modular vector is not a Poisson derivation")
    if poisson_coboundary(pi, nu):
        raise InternalInconsistency("modular vector is not a Poisson cocycle")
    return nu


# --- exterior duals -------------------------------------------------------


def gram_factor(carrier, m):
    """Pairing weight a! of a coform or form monomial (product of even exponents' factorials)."""
    from math import factorial

    f = 1
    for k, g in enumerate(carrier.generators):
        if not g.parity and m[k] > 1:
            f *= factorial(m[k])
    return f


def coform_to_form(carrier, m):
    """Form monomial paired with a coform monomial (Dxi -> dxi, xi* -> xi)."""
    out = [0] * len(m)
    for a, b in zip(carrier.slots("vxi"), carrier.slots("dxi")):
        out[b] = m[a]
    for a, b in zip(carrier.slots("sxi"), carrier.slots("xi")):
        out[b] = m[a]
    return tuple(out)


def form_to_coform(carrier, m):
    out = [0] * len(m)
    for a, b in zip(carrier.slots("vxi"), carrier.slots("dxi")):
        out[a] = m[b]
    for a, b in zip(carrier.slots("sxi"), carrier.slots("xi")):
        out[a] = m[b]
    return tuple(out)


def transpose_operator(op, u, degree_step, weight_step=0):
    """Adjoint of an operator on Omega(A!) acting on the coform u.

    ``op`` maps form degree q to q + degree_step (degree = number of xi's) and
    scaling weight by weight_step.  (T* u)(omega) = u(T omega).
    """
    carrier = u.carrier
    frm = forms(carrier)
    out = {}
    for m, c in u.terms.items():
        fm = coform_to_form(carrier, m)
        q = frm.degree(fm) - degree_step
        w = frm.weight(fm) - weight_step
        if q < 0:
            continue
        for dm in frm.basis(q, w):
            image = op(Element(carrier, {dm: 1}))
            val = image.coeff(fm)
            if val:
                val = val * c * gram_factor(carrier, fm)
                cm = form_to_coform(carrier, dm)
                val = val / gram_factor(carrier, cm)
                out[cm] = out.get(cm, 0) + val
    return Element(carrier, out)


def dual_de_rham(u):
    """d* on coforms: the adjoint of d on Omega(A!) (pinned sign DUAL_DE_RHAM_SIGN)."""
    return transpose_operator(de_rham, u, degree_step=-1).scale(DUAL_DE_RHAM_SIGN())


def DUAL_DE_RHAM_SIGN():
    """d* = -d^T: the graded transpose of the odd map d."""
    return -1


def coform_boundary(pi, nu, u):
    """Differential of X(A!, A!*_nu): adjoint of the (twisted) boundary on Omega(A!)."""
    step = 1
    ws = pi.weight_shift() or 0
    return transpose_operator(lambda w: exterior_boundary(pi, nu, w), u, degree_step=step, weight_step=ws).scale(
        COFORM_BOUNDARY_SIGN()
    )


def COFORM_BOUNDARY_SIGN():
    return 1


# --- convenience constructors ---------------------------------------------


def quadratic_structure(n, constants):
    """Polynomial Poisson structure from {((i1, i2), (j1, j2)): c} (0-based)."""
    carrier = polynomial_carrier(n)
    constants = {k: Fraction(v) for k, v in constants.items()}
    return PoissonStructure(carrier, expand_quadratic(carrier, constants))


def structure_from_terms(n, terms, carrier=None):
    """Bivector sum c * x^a Dx_j Dx_k from ``[(c, a, (j, k))]`` (0-based)."""
    carrier = carrier or polynomial_carrier(n)
    out = carrier.zero()
    for c, a, (j, k) in terms:
        mono = [0] * len(carrier)
        for i, e in enumerate(a):
            mono[carrier.slot("x", i)] = e
        t = Element(carrier, {tuple(mono): Fraction(c)}) * carrier.gen("vx", j) * carrier.gen("vx", k)
        out = out + t
    return PoissonStructure(carrier, out)


# --- contraction identities -------------------------------------------------

LITERAL = "literal"
CHAIN_LEVEL = "chain-level"


def contraction_identity(pi, phi, nu=None, form=LITERAL):
    """Both sides ``(lhs, rhs)`` of an identity comparing delta(phi) with the boundary of i_phi(vol).

    On polynomial carriers, with p = |phi|:

    * ``LITERAL``: lhs = (-1)^(p-1) d_pi(i_phi vol) - i_phi i_nu vol;
    * ``CHAIN_LEVEL``: lhs = -d_nu(i_phi vol), the form in which the
      contraction is a chain map under the pinned conventions;

    and rhs = i_{delta phi} vol in both cases.  On exterior carriers both
    forms mean lhs = (twisted coform boundary)(Frobenius image of phi).
    """
    carrier = pi.carrier
    if nu is None:
        nu = modular_vector(pi)
    rhs = contract_volume(exterior_coboundary(pi, phi) if carrier.carrier_kind == "exterior" else poisson_coboundary(pi, phi))
    if carrier.carrier_kind == "exterior":
        return coform_boundary(pi, nu, contract_volume(phi)), rhs
    image = contract_volume(phi)
    if form == CHAIN_LEVEL:
        return -twisted_boundary(pi, nu, image), rhs
    if form != LITERAL:
        raise ValueError(f"unknown form {form!r}")
    p = polyvector_degree(phi) if phi else 0
    vol = VolumeForm.standard(carrier).form
    lhs = poisson_boundary(pi, image).scale((-1) ** (p - 1)) - contract(phi, contract(nu, vol))
    return lhs, rhs


def pinned_top_contraction(carrier):
    """Coefficient c with i_{D_1...D_n}(vol) = c, recorded by the convention tests."""
    if carrier.carrier_kind == "polynomial":
        top = carrier.one()
        for i in range(carrier.n):
            top = top * carrier.gen("vx", i)
        return contract(top, VolumeForm.standard(carrier).form).coeff(carrier.unit_monomial())
    top = carrier.one()
    for i in range(carrier.n):
        top = top * carrier.gen("xi", i)
    return frobenius_contract(top).coeff(carrier.unit_monomial())


def contraction_identity_suite(pi, window=4, form=LITERAL, nu=None):
    """contraction_identity on every polyvector basis element of the window, one result per degree."""
    from .results import CheckResult

    carrier = pi.carrier
    if nu is None:
        nu = modular_vector(pi)
    space = polyvectors(carrier)
    label = "exterior" if carrier.carrier_kind == "exterior" else form
    out = []
    for p in range(carrier.n + 1):
        res = CheckResult(f"contraction identity ({label}), degree {p}", True)
        for w in range(-window, window + 1):
            for m in space.basis(p, w):
                e = Element(carrier, {m: 1})
                lhs, rhs = contraction_identity(pi, e, nu, form)
                res.checked += 1
                if lhs != rhs:
                    res.detail["failures"] = res.detail.get("failures", 0) + 1
                    if res.passed:
                        res.passed = False
                        res.witness = {"basis": str(e), "slice": (p, w), "lhs": str(lhs), "rhs": str(rhs)}
        out.append(res)
    return out
