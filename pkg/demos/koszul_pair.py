"""The Koszul-dual structure on the exterior algebra and the correspondences Psi, Phi.

Run: python demos/koszul_pair.py
"""

from poissonbv import fixture, koszul_dual, modular_vector, psi
from poissonbv.koszul import koszul_suite

pi = fixture("F3")
pair = koszul_dual(pi)
print(f"pi   = {pi.bivector}")
print(f"pi^! = {pair.dual.bivector}")
print(f"Psi(nu) = {psi(modular_vector(pi), pair.dual.carrier)}")
print(f"nu^!    = {modular_vector(pair.dual)}")

_, results = koszul_suite(pi, 2)
for r in results:
    print(f"    {r.name}: {'ok' if r.passed else 'FAILS'} ({r.checked} checked)")
    if r.name == "duality square":
        print(f"        observed signs per degree: {r.detail['signs']}")
