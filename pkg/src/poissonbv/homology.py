"""Finite slices of the Poisson (co)chain complexes and their homology."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .calculus import (
    coform_boundary,
    coforms,
    contract_volume,
    forms,
    poisson_coboundary,
    polyvectors,
    twisted_boundary,
)
from .graded import Leakage, coordinates, from_coordinates, operator_matrix
from .linalg import Echelon, RationalMatrix, SubspaceCoordinates
from .spectral import modular_weight

COCHAIN = "cochain"
CHAIN = "chain"
EXTERIOR_COCHAIN = "exterior-cochain"
EXTERIOR_TWISTED = "exterior-twisted"
VARIANTS = (COCHAIN, CHAIN, EXTERIOR_COCHAIN, EXTERIOR_TWISTED)


class NotHomogeneous(ValueError):
    """The bivector has no scaling weight, so slices are not preserved."""


class NotACycle(ValueError):
    pass


class WindowExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ComplexSlice:
    address: tuple
    basis: tuple
    in_matrix: RationalMatrix
    out_matrix: RationalMatrix


class HomologyClass:
    """A homology class: coordinates in the slice's class basis plus a representative.

    The representative may be given as a zero-argument callable; it is then
    built on first access, so pure coordinate arithmetic never touches
    polynomials.  Equality and hashing use (label, address, coordinates).
    """

    __slots__ = ("complex_label", "address", "coordinates", "_rep", "_hash")

    def __init__(self, complex_label, address, representative, coordinates):
        self.complex_label = complex_label
        self.address = tuple(address)
        self.coordinates = tuple(coordinates)
        self._rep = representative
        self._hash = None

    @property
    def representative(self):
        if callable(self._rep):
            self._rep = self._rep()
        return self._rep

    @property
    def degree(self):
        return self.address[0]

    def is_zero(self):
        return not any(self.coordinates)

    def _key(self):
        return (self.complex_label, self.address, self.coordinates)

    def __eq__(self, other):
        if not isinstance(other, HomologyClass):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"HomologyClass({self.complex_label!r}, {self.address!r}, {self.coordinates!r})"


class SliceHomology:
    """Homology of one slice with a fixed basis of representatives."""

    def __init__(self, complex_, address, sl):
        self.complex = complex_
        self.address = address
        self.slice = sl
        self.basis = sl.basis
        size = len(sl.basis)
        image = sl.in_matrix.column_space() if sl.in_matrix.cols else []
        kernel = sl.out_matrix.nullspace() if sl.out_matrix.rows else [
            [Fraction(int(i == j)) for i in range(size)] for j in range(size)
        ]
        ech = Echelon(size)
        for v in image:
            ech.add(v)
        img_ech = Echelon(size)
        for v in image:
            img_ech.add(v)
        reps = []
        for v in kernel:
            if ech.add(v):
                red = img_ech.reduce(v)
                reps.append([red.get(i, Fraction(0)) for i in range(size)])
        self.reps = reps
        self.image = image
        self.dim = len(reps)
        self._coords = SubspaceCoordinates(size, reps, image) if size else None
        self._rep_elements = [None] * len(reps)
        self._classes = None

    def coordinates(self, vec):
        if self._coords is None:
            return []
        try:
            return self._coords.coordinates(vec)
        except ValueError as exc:
            raise NotACycle(f"vector at {self.address} is not a cycle") from exc

    def representative(self, i):
        """Representative element of the i-th basis class (cached)."""
        return self._basis_element(i)

    def classes(self):
        """The basis classes of this slice (cached)."""
        if self._classes is None:
            self._classes = [self.make_class([Fraction(int(i == j)) for j in range(self.dim)]) for i in range(self.dim)]
        return list(self._classes)

    def _basis_element(self, i):
        if self._rep_elements[i] is None:
            self._rep_elements[i] = from_coordinates(self.complex.carrier, self.basis, self.reps[i])
        return self._rep_elements[i]

    def make_class(self, coords, exact=False):
        """Class with the given coordinates; ``exact`` promises they are already Fractions."""
        coords = tuple(coords) if exact else tuple(Fraction(c) for c in coords)

        def build():
            rep = self.complex.carrier.zero()
            for i, c in enumerate(coords):
                if c:
                    rep = rep + self._basis_element(i).scale(c)
            return rep

        return HomologyClass(self.complex.label, self.address, build, coords)

    def class_of(self, e):
        try:
            vec = coordinates(e, self.basis)
        except Leakage as exc:
            raise NotACycle(f"element does not lie in slice {self.address}") from exc
        return HomologyClass(self.complex.label, self.address, e, tuple(self.coordinates(vec)))

    def is_boundary(self, e):
        return all(c == 0 for c in self.class_of(e).coordinates)


class Complex:
    """A (co)chain complex sliced by (degree, scaling weight, modular weight).

    ``weights`` are per-slot modular eigenweights; when given, slices can be
    restricted to one eigenvalue.
    """

    def __init__(self, label, space, differential, degree_step, weight_step, degrees, weights=None):
        self.label = label
        self.space = space
        self.carrier = space.carrier
        self.differential = differential
        self.degree_step = degree_step
        self.weight_step = weight_step
        self.degrees = tuple(degrees)
        self.weights = weights
        self._basis = {}
        self._matrix = {}
        self._homology = {}

    def _key(self, degree, weight, lam):
        if lam is not None and self.weights is None:
            raise ValueError("complex has no modular grading")
        return (degree, weight, None if lam is None else Fraction(lam))

    def basis(self, degree, weight, lam=None):
        key = self._key(degree, weight, lam)
        if key not in self._basis:
            if degree not in self.degrees:
                self._basis[key] = ()
            else:
                self._basis[key] = tuple(
                    self.space.basis(degree, weight, modular=None if lam is None else self.weights, lam=lam)
                )
        return self._basis[key]

    def target(self, degree, weight):
        return degree + self.degree_step, weight + self.weight_step

    def source(self, degree, weight):
        return degree - self.degree_step, weight - self.weight_step

    def matrix(self, degree, weight, lam=None):
        """Matrix of the differential leaving the slice (degree, weight, lam)."""
        key = self._key(degree, weight, lam)
        if key not in self._matrix:
            dom = self.basis(degree, weight, lam)
            cod = self.basis(*self.target(degree, weight), lam)
            self._matrix[key] = operator_matrix(self.differential, dom, cod, carrier=self.carrier)
        return self._matrix[key]

    def slice(self, degree, weight, lam=None):
        sd, sw = self.source(degree, weight)
        return ComplexSlice(
            self._key(degree, weight, lam),
            self.basis(degree, weight, lam),
            self.matrix(sd, sw, lam),
            self.matrix(degree, weight, lam),
        )

    def homology(self, degree, weight, lam=None):
        key = self._key(degree, weight, lam)
        if key not in self._homology:
            self._homology[key] = SliceHomology(self, key, self.slice(degree, weight, lam))
        return self._homology[key]

    def address_of(self, e):
        """(degree, weight, lam) of a homogeneous element (lam None without weights)."""
        keys = {
            (
                self.space.degree(m),
                self.space.weight(m),
                None if self.weights is None else modular_weight(m, self.weights),
            )
            for m in e.terms
        }
        if len(keys) != 1:
            raise ValueError("element is not homogeneous")
        return keys.pop()

    def class_of(self, e, lam_graded=True):
        d, w, lam = self.address_of(e)
        return self.homology(d, w, lam if lam_graded else None).class_of(e)

    def lambdas(self, degree, weight):
        if self.weights is None:
            return [None]
        return sorted({modular_weight(m, self.weights) for m in self.basis(degree, weight)})

    def square_zero(self, degree, weight, lam=None):
        t = self.target(degree, weight)
        return (self.matrix(*t, lam) @ self.matrix(degree, weight, lam)).is_zero()


def weight_range(window):
    return range(-window, window + 1)


def assemble(pi, module_twist=None, variant=COCHAIN, window=4, weights=None):
    """The complex of the given variant together with its slices inside the window.

    ``module_twist`` is the modular vector for the twisted variants (chain
    and exterior-twisted); None leaves the module untwisted.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    shift = pi.weight_shift()
    if shift is None:
        raise NotHomogeneous("the bivector is not homogeneous in the scaling weight; slices are not preserved")
    cx = build_complex(pi, module_twist, variant, weights)
    slices = []
    for p in cx.degrees:
        for w in weight_range(window):
            lams = cx.lambdas(p, w) if weights is not None else [None]
            for lam in lams:
                if cx.basis(p, w, lam):
                    if not cx.square_zero(p, w, lam):
                        raise ArithmeticError(f"d^2 != 0 at {(p, w, lam)}")
                    slices.append(cx.slice(p, w, lam))
    return cx, slices


def build_complex(pi, module_twist=None, variant=COCHAIN, weights=None):
    carrier = pi.carrier
    shift = pi.weight_shift()
    if shift is None:
        raise NotHomogeneous("the bivector is not homogeneous in the scaling weight; slices are not preserved")
    n = carrier.n
    degrees = range(n + 1)
    if variant == COCHAIN or variant == EXTERIOR_COCHAIN:
        _expect(carrier, "polynomial" if variant == COCHAIN else "exterior")
        return Complex(variant, polyvectors(carrier), lambda P: poisson_coboundary(pi, P), 1, shift, degrees, weights)
    if variant == CHAIN:
        _expect(carrier, "polynomial")
        nu = module_twist
        return Complex(variant, forms(carrier), lambda w: twisted_boundary(pi, nu, w), -1, shift, degrees, weights)
    _expect(carrier, "exterior")
    nu = module_twist
    return Complex(variant, coforms(carrier), lambda u: coform_boundary(pi, nu, u), -1, -shift, degrees, weights)


def _expect(carrier, kind):
    if carrier.carrier_kind != kind:
        raise ValueError(f"this variant needs a {kind} carrier")


def dimension_table(cx, window, lam_graded=False):
    """{(degree, weight, lam): dim H} over the window, nonzero slices only."""
    out = {}
    for p in cx.degrees:
        for w in weight_range(window):
            for lam in cx.lambdas(p, w) if lam_graded else [None]:
                if cx.basis(p, w, lam):
                    out[(p, w, lam)] = cx.homology(p, w, lam).dim
    return out


# --- duality --------------------------------------------------------------


class Duality:
    """Chain-level duality phi = contraction with the volume form.

    Maps the cochain complex of polyvectors to the twisted chain complex of
    forms (polynomial case) or to the twisted coform complex (exterior case).
    """

    def __init__(self, cochain, chain, volume_weight=None):
        self.cochain = cochain
        self.chain = chain
        self.carrier = cochain.carrier
        self.n = self.carrier.n
        self.volume_weight = volume_weight or Fraction(0)
        self._matrices = {}

    def chain_map(self, phi):
        return contract_volume(phi)

    def image_address(self, address):
        p, w, lam = address
        return (self.n - p, w + self.n, None if lam is None else lam + self.volume_weight)

    def preimage_address(self, address):
        q, w, lam = address
        return (self.n - q, w - self.n, None if lam is None else lam - self.volume_weight)

    def duality_map(self, cls):
        rep = cls.representative
        if self.cochain.differential(rep):
            raise NotACycle("representative is not a cocycle")
        target = self.chain.homology(*self.image_address(cls.address))
        return target.class_of(self.chain_map(rep))

    def matrix(self, address):
        """Matrix of the chain map from the cochain slice at address to its image slice."""
        key = tuple(address)
        if key not in self._matrices:
            dom = self.cochain.basis(*address)
            cod = self.chain.basis(*self.image_address(address))
            self._matrices[key] = operator_matrix(self.chain_map, dom, cod, carrier=self.carrier)
        return self._matrices[key]

    def duality_inverse(self, cls):
        src = self.preimage_address(cls.address)
        M = self.matrix(src)
        cod = self.chain.basis(*cls.address)
        sol = M.solve(coordinates(cls.representative, cod))
        if sol is None:
            raise ArithmeticError("contraction with the volume form is not invertible on this slice")
        phi = from_coordinates(self.carrier, self.cochain.basis(*src), sol)
        return self.cochain.homology(*src).class_of(phi)


def poincare_duality_check(cochain, chain, duality, window):
    """Contraction with the volume form is a slice isomorphism inducing equal homology dimensions.

    Returns two results: the chain map is square and full rank on every
    cochain slice, and dim H^p at each address equals the dimension of the
    twisted homology at the image address.  Detail holds the paired table.
    """
    from .results import CheckResult

    rank = CheckResult("volume contraction is bijective on slices", True)
    dims = CheckResult("twisted duality dimensions agree", True, detail={"table": {}})
    lam_graded = cochain.weights is not None
    for p in cochain.degrees:
        for w in weight_range(window):
            for lam in cochain.lambdas(p, w) if lam_graded else [None]:
                address = (p, w, lam)
                if not cochain.basis(*address):
                    continue
                target = duality.image_address(address)
                M = duality.matrix(address)
                rank.checked += 1
                if M.rows != M.cols or M.rank() != M.cols:
                    if rank.passed:
                        rank.passed = False
                        rank.witness = {"address": address, "shape": (M.rows, M.cols), "rank": M.rank()}
                a = cochain.homology(*address).dim
                b = chain.homology(*target).dim if chain.basis(*target) else 0
                dims.checked += 1
                dims.detail["table"][address] = (a, target, b)
                if a != b and dims.passed:
                    dims.passed = False
                    dims.witness = {"address": address, "image": target, "cohomology": a, "homology": b}
    return [rank, dims]


__all__ = [
    "CHAIN",
    "COCHAIN",
    "Complex",
    "ComplexSlice",
    "Duality",
    "EXTERIOR_COCHAIN",
    "EXTERIOR_TWISTED",
    "HomologyClass",
    "NotACycle",
    "NotHomogeneous",
    "SliceHomology",
    "WindowExceeded",
    "assemble",
    "build_complex",
    "dimension_table",
    "poincare_duality_check",
]
