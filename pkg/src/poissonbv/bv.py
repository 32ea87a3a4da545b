"""BV operator, mixed complexes, negative cyclic homology and gravity brackets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .calculus import VolumeForm, de_rham, dual_de_rham, modular_vector, schouten
from .graded import Element, operator_matrix
from .homology import (
    CHAIN,
    COCHAIN,
    EXTERIOR_COCHAIN,
    EXTERIOR_TWISTED,
    Duality,
    HomologyClass,
    WindowExceeded,
    build_complex,
    weight_range,
)
from .linalg import Echelon, RationalMatrix, SubspaceCoordinates, matrix_from_columns
from .results import CheckResult
from .spectral import (
    Unsupported,
    analyze_modular,
    eigencoordinates,
    modular_weight,
    slot_weights,
)

ZERO = Fraction(0)


def _sign(k):
    return -1 if k % 2 else 1


# --- class arithmetic -----------------------------------------------------


def add_classes(classes, coeffs, address, homology):
    """Linear combination of classes living at one address."""
    vec = [ZERO] * homology.dim
    for cls, c in zip(classes, coeffs):
        if cls is None or not c:
            continue
        if cls.address != address:
            if cls.is_zero():
                continue
            raise ValueError(f"class at {cls.address} added at {address}")
        for i, v in enumerate(cls.coordinates):
            vec[i] += c * v
    return homology.make_class(vec)


# --- BV algebra on Poisson cohomology --------------------------------------


class BVEngine:
    """Cohomology of a Poisson structure with the operator Delta = phi^-1 B phi.

    Built from a cochain complex of polyvectors, the twisted chain-type
    complex it is dual to, the chain-level duality and the operator B (d on
    forms, d* on coforms).  Only modular weight zero is used.
    """

    def __init__(self, pi, window=4, *, kind="polynomial", limit=None):
        nu = modular_vector(pi)
        spectrum = analyze_modular(nu)
        if not spectrum.semisimple:
            raise Unsupported(f"modular vector is {spectrum.verdict}")
        if spectrum.change_of_basis is not None:
            if kind != "polynomial":
                raise Unsupported("exterior structures must already be in eigencoordinates")
            pi, nu = eigencoordinates(pi, nu, spectrum)
            spectrum = analyze_modular(nu)
        self.pi = pi
        self.nu = nu
        self.spectrum = spectrum
        self.kind = kind
        self.carrier = pi.carrier
        self.n = pi.n
        self.window = window
        self.limit = limit if limit is not None else 3 * window + 2 * self.n
        self.weights = slot_weights(self.carrier, spectrum.eigenvalues)
        if kind == "polynomial":
            self.cochain = build_complex(pi, None, COCHAIN, self.weights)
            self.chain = build_complex(pi, nu, CHAIN, self.weights)
            self.B = de_rham
        else:
            self.cochain = build_complex(pi, None, EXTERIOR_COCHAIN, self.weights)
            self.chain = build_complex(pi, nu, EXTERIOR_TWISTED, self.weights)
            self.B = dual_de_rham
        vol = VolumeForm.standard(self.carrier).form
        self.duality = Duality(self.cochain, self.chain, modular_weight(next(iter(vol.terms)), self.weights))
        self._delta_cache = {}
        self._cup_cache = {}
        self._slices = {}
        self._gids = {}
        self._gkeys = []
        self._cup_vectors = {}
        self._delta_vectors = {}
        self._schouten_cache = {}
        self.delta_override = None

    # addresses
    def _check_address(self, address):
        if abs(address[1]) > self.limit:
            raise WindowExceeded(f"address {address} lies outside the weight limit {self.limit}")

    def homology(self, address):
        h = self._slices.get(address)
        if h is None:
            self._check_address(address)
            h = self._slices[address] = self.cochain.homology(*address)
        return h

    def classes(self, degrees=None, window=None):
        """Basis classes of modular weight 0 with scaling weight in the window."""
        window = self.window if window is None else window
        out = []
        for p in degrees if degrees is not None else self.cochain.degrees:
            for w in weight_range(window):
                if self.cochain.basis(p, w, 0):
                    out.extend(self.cochain.homology(p, w, 0).classes())
        return out

    def unit(self):
        return self.homology((0, 0, ZERO)).class_of(self.carrier.one())

    def zero_class(self, address):
        h = self.homology(address)
        return h.make_class([ZERO] * h.dim)

    def _combine(self, address, pieces):
        """Class at address from (coefficient, coordinate tuple) pieces."""
        h = self.homology(address)
        vec = [ZERO] * h.dim
        for c, coords in pieces:
            if coords is None:
                continue
            for k, v in enumerate(coords):
                if v:
                    vec[k] += c * v
        return h.make_class(vec, exact=True)

    def _bilinear(self, a, b, address, cache, op):
        """Extend op on pairs of basis representatives bilinearly to a pair of classes."""
        ha, hb = self.homology(a.address), self.homology(b.address)
        h = self.homology(address)
        pieces = []
        for i, x in enumerate(a.coordinates):
            if not x:
                continue
            for j, y in enumerate(b.coordinates):
                if not y:
                    continue
                key = (a.address, i, b.address, j)
                if key not in cache:
                    cache[key] = h.class_of(op(ha.representative(i), hb.representative(j))).coordinates
                pieces.append((x * y, cache[key]))
        return self._combine(address, pieces)

    def cup(self, a, b):
        """Cup product of classes; None above the top degree."""
        if a is None or b is None:
            return None
        address = (a.address[0] + b.address[0], a.address[1] + b.address[1], a.address[2] + b.address[2])
        if address[0] > self.n:
            return None
        self._check_address(address)
        return self._bilinear(a, b, address, self._cup_cache, lambda x, y: x * y)

    def delta(self, a):
        if a is None:
            return None
        if self.delta_override is not None:
            return self.delta_override(self, a)
        return self.true_delta(a)

    def _basis_delta(self, address, i):
        key = (address, i)
        if key not in self._delta_cache:
            q, wq, lq = self.duality.image_address(address)
            if q + 1 > self.n:
                self._delta_cache[key] = None
            else:
                x = self.duality.chain_map(self.homology(address).representative(i))
                cls = self.chain.homology(q + 1, wq, lq).class_of(self.B(x))
                self._delta_cache[key] = self.duality.duality_inverse(cls)
        return self._delta_cache[key]

    def true_delta(self, a):
        """Delta = phi^-1 B phi, applied through the basis classes of a's slice."""
        q, wq, lq = self.duality.image_address(a.address)
        if q + 1 > self.n:
            return None
        target = self.duality.preimage_address((q + 1, wq, lq))
        pieces = [(c, self._basis_delta(a.address, i).coordinates) for i, c in enumerate(a.coordinates) if c]
        return self._combine(target, pieces)

    def schouten_class(self, a, b):
        address = (a.address[0] + b.address[0] - 1, a.address[1] + b.address[1], a.address[2] + b.address[2])
        if address[0] < 0 or address[0] > self.n:
            return None
        self._check_address(address)
        return self._bilinear(a, b, address, self._schouten_cache, schouten)

    # sparse coordinates over the union of all class bases ----------------
    #
    # Triple checks run on dictionaries {basis id: coefficient}; a basis id
    # names (address, index of the basis class).  Delta overrides are
    # applied to basis classes and extended linearly.

    def basis_id(self, address, i):
        key = (address, i)
        g = self._gids.get(key)
        if g is None:
            g = self._gids[key] = len(self._gkeys)
            self._gkeys.append(key)
        return g

    def to_vector(self, cls):
        if cls is None:
            return {}
        return {self.basis_id(cls.address, i): c for i, c in enumerate(cls.coordinates) if c}

    def basis_class(self, g):
        address, i = self._gkeys[g]
        h = self.homology(address)
        return h.make_class([Fraction(int(i == j)) for j in range(h.dim)])

    def _vector_cached(self, cache, key, compute):
        if key not in cache:
            try:
                cache[key] = compute()
            except WindowExceeded as exc:
                cache[key] = exc
        value = cache[key]
        if isinstance(value, WindowExceeded):
            raise value
        return value

    def cup_vectors(self, u, v):
        out = {}
        for g, x in u.items():
            for h, y in v.items():
                piece = self._vector_cached(
                    self._cup_vectors, (g, h), lambda: self.to_vector(self.cup(self.basis_class(g), self.basis_class(h)))
                )
                for k, z in piece.items():
                    out[k] = out.get(k, ZERO) + x * y * z
        return {k: z for k, z in out.items() if z}

    def delta_vector(self, u):
        out = {}
        for g, x in u.items():
            piece = self._vector_cached(
                self._delta_vectors, (self.delta_override, g), lambda: self.to_vector(self.delta(self.basis_class(g)))
            )
            for k, z in piece.items():
                out[k] = out.get(k, ZERO) + x * z
        return {k: z for k, z in out.items() if z}

    def generated_bracket(self, a, b):
        """(-1)^|a| (Delta(ab) - Delta(a) b - (-1)^|a| a Delta(b))."""
        pa = a.address[0]
        address = (pa + b.address[0] - 1, a.address[1] + b.address[1], a.address[2] + b.address[2])
        if address[0] < 0 or address[0] > self.n:
            return None
        self._check_address(address)
        h = self.cochain.homology(*address)
        ab = self.cup(a, b)
        da, db = self.delta(a), self.delta(b)
        terms = [
            self.delta(ab) if ab is not None else None,
            self.cup(da, b) if da is not None else None,
            self.cup(a, db) if db is not None else None,
        ]
        s = _sign(pa)
        return add_classes(terms, [s, -s, -1], address, h)


def check_bv_axioms(engine, classes=None, bracket_sign=1):
    """Delta^2 = 0, Delta(1) = 0, the seven-term identity and Delta generating the bracket.

    ``bracket_sign`` is the pinned global sign between the generated bracket
    and the Schouten bracket.  Returns a list of CheckResult.
    """
    classes = engine.classes() if classes is None else classes
    results = []

    # Delta(1) = 0
    d1 = engine.delta(engine.unit())
    results.append(CheckResult("Delta(1) = 0", d1 is None or d1.is_zero(), 1, witness=None if d1 is None or d1.is_zero() else d1))

    # Delta^2 = 0
    res = CheckResult("Delta^2 = 0", True)
    for a in classes:
        da = engine.delta(a)
        dda = engine.delta(da) if da is not None else None
        res.checked += 1
        if dda is not None and not dda.is_zero():
            res.passed, res.witness = False, {"class": a.address, "coords": a.coordinates}
            break
    results.append(res)

    # seven-term identity, on sparse coordinate vectors
    res = CheckResult("seven-term identity", True)
    vectors = [engine.to_vector(x) for x in classes]
    cup, dlt = engine.cup_vectors, engine.delta_vector
    for (a, va), (b, vb), (c, vc) in product(zip(classes, vectors), repeat=3):
        pa, pb, pc = a.address[0], b.address[0], c.address[0]
        if not 0 <= pa + pb + pc - 1 <= engine.n:
            continue
        try:
            ab, ac, bc = cup(va, vb), cup(va, vc), cup(vb, vc)
            lhs = dlt(cup(ab, vc))
            terms = [
                cup(dlt(ab), vc),
                cup(va, dlt(bc)),
                cup(vb, dlt(ac)),
                cup(cup(dlt(va), vb), vc),
                cup(cup(va, dlt(vb)), vc),
                cup(ab, dlt(vc)),
            ]
        except WindowExceeded:
            res.skipped += 1
            continue
        signs = [1, _sign(pa), _sign((pa - 1) * pb), -1, -_sign(pa), -_sign(pa + pb)]
        diff = dict(lhs)
        for sgn, t in zip(signs, terms):
            for k, z in t.items():
                diff[k] = diff.get(k, ZERO) - sgn * z
        res.checked += 1
        if any(diff.values()):
            res.passed = False
            res.witness = {"triple": [x.address for x in (a, b, c)], "coords": [x.coordinates for x in (a, b, c)]}
            break
    results.append(res)

    results.append(generation_check(engine, classes, bracket_sign))
    return results


def generation_check(engine, classes=None, bracket_sign=1):
    """The bracket generated by Delta equals bracket_sign times the Schouten bracket on basis pairs."""
    classes = engine.classes() if classes is None else classes
    res = CheckResult("Delta generates the Schouten bracket", True, detail={"sign": bracket_sign})
    for a, b in product(classes, repeat=2):
        try:
            g = engine.generated_bracket(a, b)
            s = engine.schouten_class(a, b)
        except WindowExceeded:
            res.skipped += 1
            continue
        if g is None and s is None:
            continue
        res.checked += 1
        if tuple(bracket_sign * x for x in g.coordinates) != s.coordinates:
            res.passed = False
            res.witness = {"pair": [a.address, b.address], "coords": [a.coordinates, b.coordinates]}
            break
    return res


def corrupt_delta(degree):
    """A Delta that flips sign on classes of one polyvector degree (mutation tests)."""

    def delta(engine, a):
        d = engine.true_delta(a)
        if d is None or a.address[0] != degree:
            return d
        return HomologyClass(d.complex_label, d.address, -d.representative, tuple(-x for x in d.coordinates))

    return delta


def negate_delta(engine, a):
    d = engine.true_delta(a)
    if d is None:
        return d
    return HomologyClass(d.complex_label, d.address, -d.representative, tuple(-x for x in d.coordinates))


# --- mixed complexes --------------------------------------------------------


class MixedComplexData:
    """The modular-weight-zero part of the twisted complex with (b, B).

    Degrees are the chain degrees 0..n; b lowers and B raises the degree.
    """

    def __init__(self, chain, B, n, b_weight_step, B_weight_step=0, window=4):
        self.chain = chain
        self.window = window
        self.b = chain.differential
        self.B = B
        self.n = n
        self.carrier = chain.carrier
        self.b_step = b_weight_step
        self.B_step = B_weight_step
        self._bmat = {}
        self._Bmat = {}

    @classmethod
    def from_engine(cls, engine):
        return cls(engine.chain, engine.B, engine.n, engine.chain.weight_step, 0, engine.window)

    def basis(self, m, w):
        if m < 0 or m > self.n:
            return ()
        return self.chain.basis(m, w, 0)

    def b_matrix(self, m, w):
        key = (m, w)
        if key not in self._bmat:
            self._bmat[key] = operator_matrix(
                self.b, self.basis(m, w), self.basis(m - 1, w + self.b_step), carrier=self.carrier
            )
        return self._bmat[key]

    def B_matrix(self, m, w):
        key = (m, w)
        if key not in self._Bmat:
            self._Bmat[key] = operator_matrix(
                self.B, self.basis(m, w), self.basis(m + 1, w + self.B_step), carrier=self.carrier
            )
        return self._Bmat[key]

    def check_axioms(self, window=None):
        """b^2 = 0, B^2 = 0 and bB + Bb = 0 on every slice of the window."""
        window = self.window if window is None else window
        res = CheckResult("mixed complex axioms", True)
        for m in range(self.n + 1):
            for w in weight_range(window):
                if not self.basis(m, w):
                    continue
                res.checked += 1
                b1 = self.b_matrix(m, w)
                b2 = self.b_matrix(m - 1, w + self.b_step)
                B1 = self.B_matrix(m, w)
                B2 = self.B_matrix(m + 1, w + self.B_step)
                bB = self.b_matrix(m + 1, w + self.B_step) @ B1
                Bb = self.B_matrix(m - 1, w + self.b_step) @ b1
                if not (b2 @ b1).is_zero():
                    res.passed, res.witness = False, {"identity": "b^2", "slice": (m, w)}
                elif not (B2 @ B1).is_zero():
                    res.passed, res.witness = False, {"identity": "B^2", "slice": (m, w)}
                elif not (bB + Bb).is_zero():
                    res.passed, res.witness = False, {"identity": "bB+Bb", "slice": (m, w)}
                if not res.passed:
                    return res
        return res

    # negative cyclic complex
    @property
    def u_step(self):
        """Weight of the component x_{i+1} minus that of x_i."""
        return self.B_step - self.b_step

    def components(self, m, w):
        """[(chain degree, weight)] of the components x_0, x_1, ... in total degree m."""
        out = []
        i = 0
        while m + 2 * i <= self.n:
            if m + 2 * i >= 0:
                out.append((i, m + 2 * i, w + i * self.u_step))
            i += 1
        return out

    def total_basis(self, m, w):
        """[(i, monomial)] basis of CC^-_m at weight w (x_0 at weight w)."""
        out = []
        for i, deg, wt in self.components(m, w):
            out.extend((i, mono) for mono in self.basis(deg, wt))
        return tuple(out)

    def total_matrix(self, m, w):
        """Matrix of b + uB from CC^-_m(w) to CC^-_{m-1}(w + b_step)."""
        dom = self.total_basis(m, w)
        cod = self.total_basis(m - 1, w + self.b_step)
        index = {k: r for r, k in enumerate(cod)}
        rows = [dict() for _ in cod]
        for j, (i, mono) in enumerate(dom):
            e = Element(self.carrier, {mono: 1})
            for target_i, image in ((i, self.b(e)), (i + 1, self.B(e))):
                for mm, c in image.terms.items():
                    r = index.get((target_i, mm))
                    if r is None:
                        raise ArithmeticError("total differential leaves the negative cyclic complex")
                    rows[r][j] = c
        return RationalMatrix(len(cod), len(dom), rows)

    def to_components(self, vec, m, w):
        basis = self.total_basis(m, w)
        comps = {}
        for (i, mono), c in zip(basis, vec):
            if c:
                comps.setdefault(i, {})[mono] = c
        return {i: Element(self.carrier, t) for i, t in comps.items()}

    def from_components(self, comps, m, w):
        basis = self.total_basis(m, w)
        return [comps.get(i, Element(self.carrier)).coeff(mono) for i, mono in basis]


@dataclass(frozen=True)
class NegativeCyclicClass:
    degree: int
    weight: int
    components: tuple = field(compare=False)
    coordinates: tuple = ()

    def __hash__(self):
        # classes are used as memo keys in tight loops; hash once
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.degree, self.weight, self.coordinates))
            object.__setattr__(self, "_hash", h)
        return h

    def is_zero(self):
        return not any(self.coordinates)


class NegativeCyclic:
    """Homology of the total complex (CC^-, b + uB) with class bases."""

    def __init__(self, mc):
        self.mc = mc
        self._h = {}
        self._classes = {}

    def homology(self, m, w):
        key = (m, w)
        if key not in self._h:
            mc = self.mc
            out = mc.total_matrix(m, w)
            inn = mc.total_matrix(m + 1, w - mc.b_step)
            size = len(mc.total_basis(m, w))
            image = inn.column_space() if inn.cols else []
            kernel = out.nullspace() if out.rows else [[Fraction(int(i == j)) for i in range(size)] for j in range(size)]
            ech, img = Echelon(size), Echelon(size)
            for v in image:
                ech.add(v)
                img.add(v)
            reps = []
            for v in kernel:
                if ech.add(v):
                    red = img.reduce(v)
                    reps.append([red.get(i, ZERO) for i in range(size)])
            coords = SubspaceCoordinates(size, reps, image) if size else None
            self._h[key] = (reps, coords)
        return self._h[key]

    def dim(self, m, w):
        return len(self.homology(m, w)[0])

    def make_class(self, m, w, coords):
        reps, _ = self.homology(m, w)
        size = len(self.mc.total_basis(m, w))
        vec = [ZERO] * size
        for c, r in zip(coords, reps):
            if c:
                for i in range(size):
                    vec[i] += c * r[i]
        comps = self.mc.to_components(vec, m, w)
        return NegativeCyclicClass(m, w, tuple(sorted(comps.items())), tuple(Fraction(c) for c in coords))

    def classes(self, m, w):
        key = (m, w)
        if key not in self._classes:
            d = self.dim(m, w)
            self._classes[key] = [self.make_class(m, w, [Fraction(int(i == j)) for j in range(d)]) for i in range(d)]
        return list(self._classes[key])

    def class_of_components(self, comps, m, w):
        reps, coords = self.homology(m, w)
        if coords is None:
            return NegativeCyclicClass(m, w, (), ())
        vec = self.mc.from_components(comps, m, w)
        return NegativeCyclicClass(m, w, tuple(sorted(comps.items())), tuple(coords.coordinates(vec)))

    def table(self, degrees, window):
        return {(m, w): self.dim(m, w) for m in degrees for w in weight_range(window) if self.mc.total_basis(m, w)}


# --- LES maps ---------------------------------------------------------------


def _expandable(coords):
    """True for a nonzero class that is not a basis class.

    Zero classes are kept whole so that results still carry their address.
    """
    nonzero = [c for c in coords if c]
    return bool(nonzero) and (len(nonzero) > 1 or nonzero[0] != 1)


def _sum_classes(chain, pieces):
    """Linear combination of b-homology classes at one address; None when every piece is None."""
    live = [(c, x) for c, x in pieces if x is not None]
    if not live:
        return None
    first = live[0][1]
    vec = [ZERO] * len(first.coordinates)
    for c, x in live:
        for k, v in enumerate(x.coordinates):
            if v:
                vec[k] += c * v
    return chain.homology(*first.address).make_class(vec, exact=True)


def _sum_nc(hc, pieces):
    """Linear combination of negative cyclic classes at one address; None when every piece is None."""
    live = [(c, x) for c, x in pieces if x is not None]
    if not live:
        return None
    m, w = live[0][1].degree, live[0][1].weight
    vec = [ZERO] * hc.dim(m, w)
    for c, x in live:
        for k, v in enumerate(x.coordinates):
            if v:
                vec[k] += c * v
    return hc.make_class(m, w, vec)


class CyclicMaps:
    """pi_*, beta and the gravity brackets built on a BV engine."""

    def __init__(self, engine, grading_shift=None):
        self.engine = engine
        self.mc = MixedComplexData.from_engine(engine)
        self.hc = NegativeCyclic(self.mc)
        self.grading_shift = grading_shift
        self.epsilon_override = None
        # memo tables; a CyclicMaps is never reused across mutations
        self._memo = {"pi": {}, "product": {}, "beta": {}, "bracket": {}}

    def _cached(self, table, key, compute):
        memo = self._memo[table]
        if key not in memo:
            memo[key] = compute()
        return memo[key]

    def pi_star(self, x):
        """Class of the u^0 component in the b-homology."""
        return self._cached("pi", x, lambda: self._pi_star(x))

    def _pi_star(self, x):
        comps = dict(x.components)
        x0 = comps.get(0, Element(self.mc.carrier))
        return self.engine.chain.homology(x.degree, x.weight, 0).class_of(x0)

    def beta(self, a):
        """Connecting map H_m -> HC^-_{m+1}: lift to u^0, apply b + uB, divide by u."""
        return self._cached("beta", a, lambda: self._beta(a))

    def _beta(self, a):
        m, w, _ = a.address
        y = self.mc.B(a.representative)
        return self.hc.class_of_components({0: y} if y else {}, m + 1, w + self.mc.B_step)

    def product(self, a, b):
        """a . b = phi(phi^-1 a cup phi^-1 b) on b-homology.

        Computed bilinearly from products of basis classes, which are cached.
        """
        if _expandable(a.coordinates) or _expandable(b.coordinates):
            ha, hb = self.engine.chain.homology(*a.address), self.engine.chain.homology(*b.address)
            pieces = []
            for i, x in enumerate(a.coordinates):
                if x:
                    for j, y in enumerate(b.coordinates):
                        if y:
                            pieces.append((x * y, self.product(ha.classes()[i], hb.classes()[j])))
            out = _sum_classes(self.engine.chain, pieces)
            if out is not None:
                return out
        return self._cached("product", (a, b), lambda: self._product(a, b))

    def _product(self, a, b):
        d = self.engine.duality
        c = self.engine.cup(d.duality_inverse(a), d.duality_inverse(b))
        if c is None:
            return None
        return d.duality_map(c)

    def grade(self, x):
        """Degree used in the bracket signs.

        By default this is n - 1 - m: the polyvector degree of pi_* x under
        the duality, shifted down by one, so that brackets are graded
        skew-symmetric in the usual sense.
        """
        if self.grading_shift is None:
            return self.engine.n - 1 - x.degree
        return x.degree + self.grading_shift

    def epsilon(self, xs):
        k = len(xs)
        return sum((k - 1 - i) * self.grade(x) for i, x in enumerate(xs))

    def bracket(self, xs):
        """(-1)^eps beta(pi_* x_1 . ... . pi_* x_k); None when the product leaves degrees 0..n."""
        xs = tuple(xs)
        for pos, x in enumerate(xs):
            if _expandable(x.coordinates):
                # multilinear expansion over the basis classes of x's slice
                basis = self.hc.classes(x.degree, x.weight)
                pieces = [(c, self.bracket(xs[:pos] + (basis[k],) + xs[pos + 1 :])) for k, c in enumerate(x.coordinates) if c]
                out = _sum_nc(self.hc, pieces)
                if out is not None:
                    return out
                break
        return self._cached("bracket", xs, lambda: self._bracket(xs))

    def _bracket(self, xs):
        acc = self.pi_star(xs[0])
        for x in xs[1:]:
            acc = self.product(acc, self.pi_star(x))
            if acc is None:
                return None
        out = self.beta(acc)
        eps = self.epsilon(xs) if self.epsilon_override is None else self.epsilon_override(self, xs)
        if eps % 2:
            out = NegativeCyclicClass(out.degree, out.weight, tuple((i, -e) for i, e in out.components), tuple(-c for c in out.coordinates))
        return out

    def epsilon_ij(self, xs, i, j):
        g = [self.grade(x) for x in xs]
        return (g[i] + 1) * (sum(g[:i]) + i) + (g[j] + 1) * (sum(g[:j]) + j) - (g[i] + 1) * (g[j] + 1)

    def classes(self, degrees=None, window=None):
        window = self.engine.window if window is None else window
        degrees = range(0, self.engine.n + 1) if degrees is None else degrees
        out = []
        for m in degrees:
            for w in weight_range(window):
                if self.mc.total_basis(m, w):
                    out.extend(self.hc.classes(m, w))
        return out


def _nc_add(hc, classes, signs, m, w):
    d = hc.dim(m, w)
    vec = [ZERO] * d
    for x, s in zip(classes, signs):
        if x is None or x.is_zero():
            continue
        if (x.degree, x.weight) != (m, w):
            raise ValueError("classes at different addresses")
        for i, c in enumerate(x.coordinates):
            vec[i] += s * c
    return vec


def check_gravity_relations(maps, classes=None, max_arity=4):
    """Graded skew-symmetry and the generalized Jacobi relations for n + m <= max_arity."""
    classes = maps.classes() if classes is None else classes
    results = []
    res = CheckResult("gravity skew-symmetry", True)
    for k in range(2, max_arity + 1):
        for xs in product(classes, repeat=k):
            for i in range(k - 1):
                ys = list(xs)
                ys[i], ys[i + 1] = ys[i + 1], ys[i]
                try:
                    a, b = maps.bracket(list(xs)), maps.bracket(ys)
                except WindowExceeded:
                    res.skipped += 1
                    continue
                if a is None and b is None:
                    continue
                res.checked += 1
                gi, gj = maps.grade(xs[i]), maps.grade(xs[i + 1])
                s = -_sign(gi * gj)
                # None stands for a zero class whose address was never formed
                if a is None or b is None:
                    ok = (a or b).is_zero()
                else:
                    ok = tuple(s * c for c in b.coordinates) == a.coordinates
                if not ok:
                    res.passed = False
                    res.witness = {"tuple": [(x.degree, x.weight, x.coordinates) for x in xs], "swap": i}
                    break
            if not res.passed:
                break
        if not res.passed:
            break
    results.append(res)

    for nn in range(2, max_arity + 1):
        for mm in range(0, max_arity + 1 - nn):
            if nn == 2 and mm == 0:
                continue
            if nn + mm - 1 < 2 and mm == 0:
                continue
            res = CheckResult(f"gravity relation n={nn}, m={mm}", True)
            for tup in product(classes, repeat=nn + mm):
                xs, ys = list(tup[:nn]), list(tup[nn:])
                try:
                    lhs_terms, signs = [], []
                    for i, j in combinations(range(nn), 2):
                        inner = maps.bracket([xs[i], xs[j]])
                        rest = [x for t, x in enumerate(xs) if t not in (i, j)]
                        args = ([inner] if inner is not None else []) + rest + ys
                        term = maps.bracket(args) if inner is not None and len(args) >= 2 else None
                        lhs_terms.append(term)
                        signs.append(_sign(maps.epsilon_ij(xs, i, j)))
                    if mm > 0:
                        inner = maps.bracket(xs)
                        rhs = maps.bracket([inner] + ys) if inner is not None else None
                    else:
                        rhs = None
                except WindowExceeded:
                    res.skipped += 1
                    continue
                live = [t for t in lhs_terms + [rhs] if t is not None]
                if not live:
                    continue
                m, w = live[0].degree, live[0].weight
                res.checked += 1
                lhs = _nc_add(maps.hc, lhs_terms, signs, m, w)
                rv = _nc_add(maps.hc, [rhs], [1], m, w)
                if lhs != rv:
                    res.passed = False
                    res.witness = {"x": [(x.degree, x.weight, x.coordinates) for x in xs], "y": [(y.degree, y.weight, y.coordinates) for y in ys]}
                    break
            results.append(res)
    return results


def lie_jacobi_check(maps, classes=None):
    """Jacobi identity of the binary bracket with graded Lie signs in the grade of ``maps``.

    (-1)^{g_a g_c} {{a,b},c} + (-1)^{g_b g_a} {{b,c},a} + (-1)^{g_c g_b} {{c,a},b} = 0.
    This is an audit companion to the displayed relation n=3, m=0, whose
    sign epsilon_ij is pinned as written.
    """
    classes = maps.classes() if classes is None else classes
    res = CheckResult("binary bracket Jacobi (graded Lie signs)", True)

    def br(a, b):
        return None if a is None or b is None else maps.bracket([a, b])

    for a, b, c in product(classes, repeat=3):
        ga, gb, gc = (maps.grade(x) for x in (a, b, c))
        try:
            terms = [br(br(a, b), c), br(br(b, c), a), br(br(c, a), b)]
        except WindowExceeded:
            res.skipped += 1
            continue
        live = [t for t in terms if t is not None]
        if not live:
            continue
        res.checked += 1
        vec = _nc_add(maps.hc, terms, [_sign(ga * gc), _sign(gb * ga), _sign(gc * gb)], live[0].degree, live[0].weight)
        if any(vec):
            res.passed = False
            res.witness = {"x": [(x.degree, x.weight, x.coordinates) for x in (a, b, c)]}
            break
    return res


def _rank_of(columns, rows):
    return matrix_from_columns(rows, columns).rank() if columns and rows else 0


def u_shift(maps, x):
    """Multiplication by u: HC^-_{m+2} -> HC^-_{m}."""
    comps = {i + 1: e for i, e in x.components}
    m, w = x.degree - 2, x.weight - maps.mc.u_step
    return maps.hc.class_of_components(comps, m, w)


def les_check(maps, degrees, window):
    """Exactness of ... -> HC^-_{m+2} -u-> HC^-_m -pi_*-> H_m -beta-> HC^-_{m+1} -> ... by ranks.

    For every object of the sequence inside the window the rank of the
    incoming map plus the rank of the outgoing map must equal its dimension.
    """
    mc, hc = maps.mc, maps.hc
    res = CheckResult("long exact sequence", True)
    chain = maps.engine.chain

    def u_rank(m, w):
        # u : HC^-_{m+2}(w + u_step) -> HC^-_m(w)
        src = hc.classes(m + 2, w + mc.u_step) if mc.total_basis(m + 2, w + mc.u_step) else []
        cols = [list(u_shift(maps, x).coordinates) for x in src]
        return _rank_of(cols, hc.dim(m, w))

    def pi_rank(m, w):
        if not mc.basis(m, w):
            return 0
        cols = [list(maps.pi_star(x).coordinates) for x in hc.classes(m, w)] if mc.total_basis(m, w) else []
        return _rank_of(cols, chain.homology(m, w, 0).dim)

    def beta_rank(m, w):
        if not mc.basis(m, w):
            return 0
        cols = [list(maps.beta(a).coordinates) for a in chain.homology(m, w, 0).classes()]
        return _rank_of(cols, hc.dim(m + 1, w + mc.B_step))

    for m in degrees:
        for w in weight_range(window):
            spots = []
            if mc.total_basis(m, w):
                spots.append(("HC-", (m, w), hc.dim(m, w), u_rank(m, w), pi_rank(m, w)))
            if mc.basis(m, w):
                h = chain.homology(m, w, 0).dim
                spots.append(("H", (m, w), h, pi_rank(m, w), beta_rank(m, w)))
            for name, addr, dim, rin, rout in spots:
                res.checked += 1
                if rin + rout != dim:
                    res.passed = False
                    res.witness = {"object": name, "address": addr, "dim": dim, "rank_in": rin, "rank_out": rout}
                    return res
    # exactness at HC^-_{m+1} after beta: rank beta + rank u out = dim is the
    # HC- spot of degree m+1, already covered when m+1 lies in ``degrees``
    return res


def ses_check(maps, degrees, window):
    """The projection to the u^0 component is a chain map onto (C, b) and u is injective."""
    mc = maps.mc
    res = CheckResult("short exact sequence", True)
    for m in degrees:
        for w in weight_range(window):
            dom = mc.total_basis(m, w)
            if not dom:
                continue
            res.checked += 1
            total = mc.total_matrix(m, w)
            cod = mc.total_basis(m - 1, w + mc.b_step)
            proj_rows = [r for r, (i, _) in enumerate(cod) if i == 0]
            for j, (i, mono) in enumerate(dom):
                col = total.column(j)
                image_0 = {cod[r][1]: col[r] for r in proj_rows if col[r]}
                if i == 0:
                    expect = mc.b(Element(mc.carrier, {mono: 1})).terms
                else:
                    expect = {}
                if image_0 != dict(expect):
                    res.passed = False
                    res.witness = {"address": (m, w), "basis": (i, mono)}
                    return res
    return res


# --- gravity suite ----------------------------------------------------------

BRACKET_SIGN = {"polynomial": -1, "exterior": 1}
FLIP_EPSILON = "flip-epsilon"
CORRUPT_DELTA = "corrupt-delta"


def flipped_epsilon(maps, xs):
    """Mutation: the sign exponent with the argument weights in reverse order."""
    return sum(i * maps.grade(x) for i, x in enumerate(xs))


def _flip_on_degree(op, space, degree):
    def flipped(x):
        part = Element(x.carrier, {m: c for m, c in x.terms.items() if space.degree(m) == degree})
        return op(x) - op(part).scale(2)

    return flipped


def gravity_suite(engine, max_arity=4, *, mutation=None, corrupt_degree=1, classes=None):
    """Mixed-complex and BV preconditions, skew-symmetry and the gravity relations.

    ``mutation`` deliberately breaks the construction: FLIP_EPSILON uses a
    wrong sign exponent for the brackets, CORRUPT_DELTA flips the sign of
    Delta on polyvector degree ``corrupt_degree`` (and of B on the dual form
    degree).  A sound suite reports a failure with a witness for each.
    """
    maps = CyclicMaps(engine)
    saved = engine.delta_override
    try:
        if mutation == FLIP_EPSILON:
            maps.epsilon_override = flipped_epsilon
        elif mutation == CORRUPT_DELTA:
            engine.delta_override = corrupt_delta(corrupt_degree)
            B = _flip_on_degree(engine.B, engine.chain.space, engine.n - corrupt_degree)
            maps.mc = MixedComplexData(engine.chain, B, engine.n, engine.chain.weight_step, 0, engine.window)
            maps.hc = NegativeCyclic(maps.mc)
        elif mutation is not None:
            raise ValueError(f"unknown mutation {mutation!r}")
        results = [maps.mc.check_axioms(engine.window)]
        results.append(generation_check(engine, bracket_sign=BRACKET_SIGN[engine.kind]))
        try:
            cl = maps.classes() if classes is None else classes
            results.extend(check_gravity_relations(maps, cl, max_arity))
        except (ValueError, ArithmeticError) as exc:
            results.append(CheckResult("gravity brackets defined", False, witness={"error": str(exc)}))
    finally:
        engine.delta_override = saved
    return results


__all__ = [
    "BVEngine",
    "CheckResult",
    "CyclicMaps",
    "MixedComplexData",
    "NegativeCyclic",
    "NegativeCyclicClass",
    "BRACKET_SIGN",
    "CORRUPT_DELTA",
    "FLIP_EPSILON",
    "check_bv_axioms",
    "check_gravity_relations",
    "generation_check",
    "corrupt_delta",
    "flipped_epsilon",
    "gravity_suite",
    "les_check",
    "negate_delta",
    "lie_jacobi_check",
    "ses_check",
    "u_shift",
]
