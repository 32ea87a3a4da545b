"""BV operator on weight-zero cohomology, then gravity brackets on negative cyclic homology.

Run: python demos/bv_and_gravity.py      (a few seconds)
"""

from poissonbv import fixture
from poissonbv.bv import BRACKET_SIGN, CORRUPT_DELTA, BVEngine, CyclicMaps, check_bv_axioms, gravity_suite

engine = BVEngine(fixture("F3"), 2)
print(f"F3: {len(engine.classes())} weight-zero cohomology classes in the window")
for r in check_bv_axioms(engine, bracket_sign=BRACKET_SIGN["polynomial"]):
    print(f"    {r.name}: {'ok' if r.passed else 'FAILS'} on {r.checked} instances")

engine = BVEngine(fixture("F2"), 2)
maps = CyclicMaps(engine)
classes = maps.classes()
print(f"\nF2: {len(classes)} negative cyclic classes in degrees 0..2")
for r in gravity_suite(engine, 4, classes=classes):
    print(f"    {r.name}: {'ok' if r.passed else 'FAILS'} on {r.checked} instances")

# a deliberately broken Delta must be noticed
broken = [r for r in gravity_suite(engine, 4, mutation=CORRUPT_DELTA) if not r.passed]
print(f"\ncorrupted Delta caught by '{broken[0].name}', witness {broken[0].witness}")

# on the zero structure every polyvector is a class and brackets are nonzero
maps0 = CyclicMaps(BVEngine(fixture("F0"), 2))
cls0 = maps0.classes()
nonzero = sum(1 for a in cls0 for b in cls0 if (x := maps0.bracket([a, b])) is not None and not x.is_zero())
print(f"F0: {nonzero} nonzero binary brackets among {len(cls0)} classes")
