"""Poisson cohomology against twisted Poisson homology on F3.

Contraction with the volume form maps polyvectors of degree p to forms of
degree n - p.  With the module twisted by the modular vector it is a chain
map, so the two dimension tables match address by address.

Run: python demos/twisted_duality.py
"""

from poissonbv import analyze_modular, fixture, modular_vector
from poissonbv.calculus import CHAIN_LEVEL, LITERAL, contraction_identity_suite
from poissonbv.homology import CHAIN, COCHAIN, Duality, build_complex, poincare_duality_check
from poissonbv.spectral import slot_weights

W = 2
pi = fixture("F3")
nu = modular_vector(pi)
weights = slot_weights(pi.carrier, analyze_modular(nu).eigenvalues)
cochain = build_complex(pi, None, COCHAIN, weights)
chain = build_complex(pi, nu, CHAIN, weights)

rank, dims = poincare_duality_check(cochain, chain, Duality(cochain, chain), W)
print(f"volume contraction bijective on {rank.checked} slices: {rank.passed}")
print("nonzero cohomology and the matching twisted homology:")
for (p, w, lam), (a, (q, v, mu), b) in sorted(dims.detail["table"].items()):
    if a or b:
        print(f"    HP^{p} at (w={w}, lambda={lam}): {a}    HP_{q} at (w={v}, lambda={mu}): {b}")

print()
print("contraction identity, per polyvector degree:")
for form in (LITERAL, CHAIN_LEVEL):
    for r in contraction_identity_suite(pi, W, form):
        note = "" if r.passed else f"  ({r.detail['failures']} of {r.checked} basis vectors fail)"
        print(f"    {r.name}: {'holds' if r.passed else 'fails'}{note}")
