"""Modular vectors of the five standard structures and what their spectra allow.

Run: python demos/modular_spectrum.py
"""

from poissonbv import analyze_modular, fixture, modular_vector
from poissonbv.oracle import divergence_oracle, oracle_eigenvalues

for name in ("F0", "F1", "F2", "F3", "F4"):
    pi = fixture(name)
    nu = modular_vector(pi)
    spectrum = analyze_modular(nu)
    print(f"{name}: pi = {pi.bivector}")
    print(f"    nu = {nu or 0}   (oracle agrees: {divergence_oracle(pi) == nu})")
    print(f"    verdict: {spectrum.verdict}")
    if spectrum.semisimple:
        ev = ", ".join(str(v) for v in spectrum.eigenvalues)
        print(f"    eigenvalues: {ev}   (oracle: {', '.join(map(str, oracle_eigenvalues(divergence_oracle(pi))))})")
    else:
        # a nilpotent nu has no eigenweight decomposition; the BV and gravity
        # constructions are then refused rather than run on a wrong grading
        print(f"    characteristic polynomial coefficients: {list(map(str, spectrum.char_poly))}")
