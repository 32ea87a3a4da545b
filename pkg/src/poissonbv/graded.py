"""Sparse exact arithmetic in free graded-commutative algebras.

A carrier declares an ordered list of generators, each even or odd.  A
monomial is a plain tuple of exponents, one slot per generator (odd slots are
0 or 1).  Odd factors are always stored in declaration order, so the sign of a
product is fixed when the product is formed and equality is plain dict
equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

Monomial = tuple


class CarrierMismatch(ValueError):
    pass


class UnboundedSlice(ValueError):
    """Raised when a selector cuts out an infinite set of monomials."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Leakage(ValueError):
    """An operator sent a basis vector outside the declared codomain."""

    def __init__(self, message, basis_vector=None, monomial=None):
        super().__init__(message)
        self.basis_vector = basis_vector
        self.monomial = monomial


@dataclass(frozen=True)
class Generator:
    name: str
    parity: int  # 0 even, 1 odd
    degree: int  # homological degree
    weight: int  # scaling weight
    kind: str  # "x", "vx", "dx" on polynomial carriers; "xi", "vxi", "dxi", "sxi" on exterior ones
    index: int  # 0-based coordinate index


@dataclass(frozen=True)
class CarrierSpec:
    generators: tuple
    carrier_kind: str
    n: int

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")

    def __len__(self):
        return len(self.generators)

    def slot(self, kind, i):
        """Position of the generator of the given kind and coordinate index."""
        return self._slots[(kind, i)]

    def slots(self, kind):
        return tuple(self._slots[(kind, i)] for i in range(self.n))

    @property
    def _slots(self):
        cache = self.__dict__.get("_slot_cache")
        if cache is None:
            cache = {(g.kind, g.index): k for k, g in enumerate(self.generators)}
            object.__setattr__(self, "_slot_cache", cache)
        return cache

    @property
    def odd_slots(self):
        return tuple(k for k, g in enumerate(self.generators) if g.parity)

    def one(self):
        return Element(self, {self.unit_monomial(): Fraction(1)})

    def zero(self):
        return Element(self, {})

    def unit_monomial(self):
        return (0,) * len(self.generators)

    def gen(self, kind, i):
        m = [0] * len(self.generators)
        m[self.slot(kind, i)] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def monomial_element(self, m, coeff=1):
        return Element(self, {tuple(m): Fraction(coeff)})

    def from_polynomial(self, coeffs):
        """Build an element from a ``{monomial: coeff}`` mapping."""
        return Element(self, {tuple(m): Fraction(c) for m, c in coeffs.items()})


def polynomial_carrier(n, names=None):
    """Carrier for R[x_1..x_n] together with the odd symbols d/dx_i and dx_i."""
    names = list(names) if names else [f"x{i + 1}" for i in range(n)]
    gens = []
    for i, s in enumerate(names):
        gens.append(Generator(s, 0, 0, 1, "x", i))
    for i, s in enumerate(names):
        gens.append(Generator(f"d{s}", 1, 1, 1, "dx", i))
    for i, s in enumerate(names):
        gens.append(Generator(f"D{s}", 1, -1, -1, "vx", i))
    return CarrierSpec(tuple(gens), "polynomial", n)


def exterior_carrier(n, names=None):
    """Carrier for the exterior algebra on xi_1..xi_n.

    Besides the odd coordinates it holds the even coderivations D(xi_i), the
    even one-forms d(xi_i) and the odd dual vectors xi_i^*.
    """
    names = list(names) if names else [f"xi{i + 1}" for i in range(n)]
    gens = []
    for i, s in enumerate(names):
        gens.append(Generator(s, 1, -1, -1, "xi", i))
    for i, s in enumerate(names):
        gens.append(Generator(f"D{s}", 0, 0, 1, "vxi", i))
    for i, s in enumerate(names):
        gens.append(Generator(f"d{s}", 0, 0, -1, "dxi", i))
    for i, s in enumerate(names):
        gens.append(Generator(f"{s}*", 1, 1, 1, "sxi", i))
    return CarrierSpec(tuple(gens), "exterior", n)


def monomial_product(carrier, a, b):
    """Return ``(sign, monomial)`` for the product a*b, or ``(0, None)``."""
    # each odd factor of b moves left past the odd factors of a at later slots
    odd = carrier.odd_slots
    swaps = 0
    later = 0
    for j in reversed(odd):
        if b[j]:
            if a[j]:
                return 0, None
            swaps += later
        if a[j]:
            later += 1
    return (-1 if swaps & 1 else 1), tuple(x + y for x, y in zip(a, b))


class Element:
    """Sparse linear combination of monomials with Fraction coefficients."""

    __slots__ = ("carrier", "terms")

    def __init__(self, carrier, terms=None):
        self.carrier = carrier
        if terms:
            self.terms = {m: Fraction(c) for m, c in terms.items() if c != 0}
        else:
            self.terms = {}

    @classmethod
    def _raw(cls, carrier, terms):
        e = cls.__new__(cls)
        e.carrier = carrier
        e.terms = terms
        return e

    def _check(self, other):
        if other.carrier is not self.carrier and other.carrier != self.carrier:
            raise CarrierMismatch("elements live on different carriers")

    def _coerce(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Element(self.carrier, {self.carrier.unit_monomial(): other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Element._raw(self.carrier, out)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw(self.carrier, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return Element(self.carrier)
        return Element._raw(self.carrier, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element(self.carrier, {self.carrier.unit_monomial(): other})
        if not isinstance(other, Element):
            return NotImplemented
        return self.carrier == other.carrier and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), reverse=True))

    def __len__(self):
        return len(self.terms)

    def coeff(self, m):
        return self.terms.get(tuple(m), Fraction(0))

    def homogeneous_parts(self, key):
        """Split into parts on which ``key(monomial)`` is constant."""
        parts = {}
        for m, c in self.terms.items():
            parts.setdefault(key(m), {})[m] = c
        return {k: Element._raw(self.carrier, v) for k, v in parts.items()}

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        return format_element(self)


def multiply(a, b):
    """Graded-commutative product with Koszul signs."""
    if a.carrier != b.carrier:
        raise CarrierMismatch("cannot multiply elements of different carriers")
    carrier = a.carrier
    out = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            s, m = monomial_product(carrier, ma, mb)
            if not s:
                continue
            v = out.get(m, 0) + s * ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return Element._raw(carrier, out)


def product(factors, carrier):
    out = carrier.one()
    for f in factors:
        out = multiply(out, f)
    return out


def format_monomial(carrier, m):
    parts = []
    for k, e in enumerate(m):
        if e:
            name = carrier.generators[k].name
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_element(e):
    if not e.terms:
        return "0"
    out = []
    for m, c in e:
        mono = format_monomial(e.carrier, m)
        if mono == "1":
            out.append(str(c))
        elif c == 1:
            out.append(mono)
        elif c == -1:
            out.append("-" + mono)
        else:
            out.append(f"{c}*{mono}")
    return " + ".join(out).replace("+ -", "- ")


# --- gradings -------------------------------------------------------------


def scaling_weight(carrier, m):
    return sum(g.weight * e for g, e in zip(carrier.generators, m))


def homological_degree(carrier, m):
    return sum(g.degree * e for g, e in zip(carrier.generators, m))


def count(m, slots):
    return sum(m[k] for k in slots)


# --- derivatives ----------------------------------------------------------


def left_derivative(e, slot):
    """Left partial derivative with respect to the generator at ``slot``."""
    carrier = e.carrier
    odd = carrier.generators[slot].parity
    out = {}
    for m, c in e.terms.items():
        k = m[slot]
        if not k:
            continue
        if odd:
            before = sum(m[i] for i in carrier.odd_slots if i < slot)
            c = -c if before & 1 else c
        else:
            c = c * k
        mm = list(m)
        mm[slot] -= 1
        mm = tuple(mm)
        out[mm] = out.get(mm, 0) + c
    return Element(carrier, out)


def right_derivative(e, slot):
    """Right partial derivative with respect to the generator at ``slot``."""
    carrier = e.carrier
    odd = carrier.generators[slot].parity
    out = {}
    for m, c in e.terms.items():
        k = m[slot]
        if not k:
            continue
        if odd:
            after = sum(m[i] for i in carrier.odd_slots if i > slot)
            c = -c if after & 1 else c
        else:
            c = c * k
        mm = list(m)
        mm[slot] -= 1
        mm = tuple(mm)
        out[mm] = out.get(mm, 0) + c
    return Element(carrier, out)


def substitute(e, images, target):
    """Algebra map sending each generator slot to ``images[slot]``.

    The images are multiplied in canonical monomial order, so Koszul signs
    follow from the product on ``target``.
    """
    out = target.zero()
    cache = {}
    for m, c in e.terms.items():
        acc = target.one()
        for slot, k in enumerate(m):
            if not k:
                continue
            key = (slot, k)
            if key not in cache:
                p = target.one()
                for _ in range(k):
                    p = multiply(p, images[slot])
                cache[key] = p
            acc = multiply(acc, cache[key])
            if not acc:
                break
        out = out + acc.scale(c)
    return out


# --- slices ---------------------------------------------------------------


def slice_basis(carrier, allowed, *, weight=None, counts=(), modular=None):
    """Deterministic monomial basis of one slice.

    ``allowed`` lists the generator slots that may occur.  ``weight`` fixes the
    total scaling weight (``None`` leaves it free).  ``counts`` is a sequence of
    ``(slots, total)`` pairs fixing how many factors come from each group.
    ``modular`` is ``(weights, value)`` with one rational weight per slot.

    Raises UnboundedSlice when an even generator can occur with unbounded
    exponent.
    """
    allowed = sorted(set(allowed))
    gens = carrier.generators
    even = [k for k in allowed if not gens[k].parity]
    odd = [k for k in allowed if gens[k].parity]

    if even:
        ws = [gens[k].weight for k in even]
        bounded = weight is not None and (all(w > 0 for w in ws) or all(w < 0 for w in ws))
        if not bounded:
            # an even count constraint can still bound everything
            fixed = set()
            for slots, _ in counts:
                if all(not gens[k].parity for k in slots if k in allowed):
                    fixed.update(k for k in slots if k in allowed)
            if not set(even) <= fixed:
                free = [gens[k].name for k in even if k not in fixed]
                raise UnboundedSlice(
                    f"slice is infinite: exponent of {free[0]} is unbounded",
                    witness=[f"{free[0]}^{j}" for j in range(1, 4)],
                )

    def even_exponents(idx, remaining, acc):
        if idx == len(even):
            if weight is None or remaining == 0:
                yield dict(acc)
            return
        k = even[idx]
        w = gens[k].weight
        if weight is None or w == 0:
            limit = max((t for slots, t in counts if k in slots), default=0)
        else:
            limit = remaining // w if remaining * w >= 0 else -1
            if limit < 0:
                return
        for e in range(limit + 1):
            acc[k] = e
            yield from even_exponents(idx + 1, None if weight is None else remaining - e * w, acc)
        acc.pop(k, None)

    out = []
    for r in range(len(odd) + 1):
        for subset in combinations(odd, r):
            base = [0] * len(gens)
            for k in subset:
                base[k] = 1
            rem = None
            if weight is not None:
                rem = weight - sum(gens[k].weight for k in subset)
            for ex in even_exponents(0, rem, {}):
                m = list(base)
                for k, e in ex.items():
                    m[k] = e
                m = tuple(m)
                if any(count(m, slots) != t for slots, t in counts):
                    continue
                if modular is not None:
                    mw, val = modular
                    if sum(mw[k] * m[k] for k in range(len(m)) if m[k]) != val:
                        continue
                out.append(m)
    out.sort(reverse=True)
    return out


def basis_elements(carrier, basis):
    return [Element._raw(carrier, {m: Fraction(1)}) for m in basis]


def operator_matrix(op, domain, codomain, carrier=None, codomain_carrier=None):
    """Exact matrix of ``op`` in the given monomial bases.

    Column j holds the coordinates of ``op(domain[j])``.  Raises Leakage when
    an image has a term outside ``codomain``.
    """
    from .linalg import RationalMatrix

    if carrier is None:
        raise ValueError("carrier is required")
    index = {m: i for i, m in enumerate(codomain)}
    rows = [dict() for _ in codomain]
    for j, m in enumerate(domain):
        image = op(Element._raw(carrier, {m: Fraction(1)}))
        for mm, c in image.terms.items():
            i = index.get(mm)
            if i is None:
                cc = codomain_carrier or image.carrier
                raise Leakage(
                    f"image of {format_monomial(carrier, m)} has term "
                    f"{format_monomial(cc, mm)} outside the codomain",
                    basis_vector=m,
                    monomial=mm,
                )
            rows[i][j] = c
    return RationalMatrix(len(codomain), len(domain), rows)


def coordinates(e, basis):
    """Coordinate vector of ``e`` in a monomial basis (raises Leakage)."""
    index = {m: i for i, m in enumerate(basis)}
    v = [Fraction(0)] * len(basis)
    for m, c in e.terms.items():
        i = index.get(m)
        if i is None:
            raise Leakage(f"term {format_monomial(e.carrier, m)} outside the basis", monomial=m)
        v[i] = c
    return v


def from_coordinates(carrier, basis, v):
    return Element(carrier, {m: c for m, c in zip(basis, v) if c})
