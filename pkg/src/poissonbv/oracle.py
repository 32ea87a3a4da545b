"""Independent recomputation of the modular vector for cross-checks.

Works directly on the coefficient functions pi_ij of
pi = sum_{i<j} pi_ij Dx_i Dx_j: the j-th component of the modular vector is
sum_i d(pi_ji)/dx_i.  Nothing here goes through contractions or the
Schouten bracket.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import Element


def _coefficient_functions(pi):
    carrier = pi.carrier
    xs = carrier.slots("x")
    ds = carrier.slots("vx")
    n = carrier.n
    funcs = {}
    for m, c in pi.bivector.terms.items():
        idx = [i for i in range(n) if m[ds[i]]]
        if len(idx) != 2:
            raise ValueError("not a bivector")
        i, j = idx
        exps = tuple(m[xs[k]] for k in range(n))
        # canonical order stores Dx_i before Dx_j for i < j
        funcs.setdefault((i, j), {})
        funcs[(i, j)][exps] = funcs[(i, j)].get(exps, 0) + c
        funcs.setdefault((j, i), {})
        funcs[(j, i)][exps] = funcs[(j, i)].get(exps, 0) - c
    return funcs


def divergence_oracle(pi):
    """The modular vector of a polynomial structure, from nu_j = sum_i d(pi_ji)/dx_i."""
    carrier = pi.carrier
    if carrier.carrier_kind != "polynomial":
        raise ValueError("the oracle handles polynomial structures only")
    n = carrier.n
    funcs = _coefficient_functions(pi)
    comps = [dict() for _ in range(n)]
    for (j, i), poly in funcs.items():
        for exps, c in poly.items():
            if exps[i] == 0:
                continue
            new = list(exps)
            new[i] -= 1
            key = tuple(new)
            comps[j][key] = comps[j].get(key, 0) + c * exps[i]
    out = {}
    xs, ds = carrier.slots("x"), carrier.slots("vx")
    for j in range(n):
        for exps, c in comps[j].items():
            if not c:
                continue
            m = [0] * len(carrier)
            for k, e in enumerate(exps):
                m[xs[k]] = e
            m[ds[j]] = 1
            out[tuple(m)] = out.get(tuple(m), 0) + c
    return Element(carrier, out)


def _det(rows):
    """Determinant by fraction-exact Gaussian elimination on a dense copy."""
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for k in range(col, n):
                    a[r][k] -= f * a[col][k]
    return det


def _interpolate(points):
    """Coefficients (low to high) of the polynomial through the given (t, value) points."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (ti, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (tj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= tj * basis[k + 1]
            denom *= ti - tj
        for k in range(n):
            coeffs[k] += yi * basis[k] / denom
    return coeffs


def oracle_eigenvalues(nu):
    """Rational eigenvalues (with multiplicity) of a linear vector field, or None.

    Returns None when nu is not linear or has non-rational eigenvalues.
    """
    from .spectral import rational_roots

    carrier = nu.carrier
    n = carrier.n
    xs, ds = carrier.slots("x"), carrier.slots("vx")
    M = [[Fraction(0)] * n for _ in range(n)]
    for m, c in nu.terms.items():
        j = [k for k in range(n) if m[ds[k]]]
        deg = [k for k in range(n) for _ in range(m[xs[k]])]
        if len(j) != 1 or len(deg) != 1:
            return None
        M[j[0]][deg[0]] += c
    points = []
    for t in range(n + 1):
        rows = [[(Fraction(t) if r == k else Fraction(0)) - M[r][k] for k in range(n)] for r in range(n)]
        points.append((Fraction(t), _det(rows)))
    roots, rest = rational_roots(_interpolate(points))
    if len(rest) > 1:
        return None
    return sorted(r for r, k in roots.items() for _ in range(k))
