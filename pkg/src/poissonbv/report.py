"""Orchestration of the computations behind each command, and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .bv import (
    BRACKET_SIGN,
    CORRUPT_DELTA,
    FLIP_EPSILON,
    BVEngine,
    CyclicMaps,
    check_bv_axioms,
    gravity_suite,
    les_check,
    lie_jacobi_check,
    ses_check,
)
from .calculus import (
    BOUNDARY_SIGN,
    CHAIN_LEVEL,
    COBOUNDARY_SIGN,
    COFORM_BOUNDARY_SIGN,
    DUAL_DE_RHAM_SIGN,
    LITERAL,
    InternalInconsistency,
    VolumeForm,
    contraction_identity_suite,
    jacobi_check,
    modular_vector,
    pinned_top_contraction,
)
from .graded import Element
from .homology import (
    CHAIN,
    COCHAIN,
    EXTERIOR_COCHAIN,
    EXTERIOR_TWISTED,
    Duality,
    NotHomogeneous,
    build_complex,
    poincare_duality_check,
    weight_range,
)
from .koszul import SQUARE_SIGN, NotQuadratic, koszul_dual, koszul_suite
from .oracle import divergence_oracle, oracle_eigenvalues
from .results import CheckResult
from .spectral import (
    Unsupported,
    analyze_modular,
    homotopy_suite,
    modular_weight,
    quasi_isomorphism_suite,
    slot_weights,
)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
COMMANDS = ("check", "modular", "cohomology", "homology", "duality", "mixed", "bv", "gravity", "koszul", "all")


@dataclass
class Section:
    name: str
    status: str = PASS
    reason: str | None = None
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def add(self, result, prefix=None):
        name = result.name if prefix is None else f"{prefix}: {result.name}"
        self.checks.append(
            {
                "name": name,
                "status": PASS if result.passed else FAIL,
                "checked": result.checked,
                "skipped": result.skipped,
                "witness": result.witness,
            }
        )
        if not result.passed:
            self.status = FAIL

    def skip(self, reason):
        self.status = SKIPPED
        self.reason = f"skipped: precondition ({reason})"
        return self


@dataclass
class Report:
    command: str
    config: dict
    structure: dict
    sections: list
    signs: dict

    @property
    def first_failure(self):
        for s in self.sections:
            for c in s.checks:
                if c["status"] == FAIL:
                    return f"{s.name}: {c['name']}"
            if s.status == FAIL:
                return s.name
        return None

    @property
    def status(self):
        if any(s.status == FAIL for s in self.sections):
            return FAIL
        if any(s.status == SKIPPED for s in self.sections):
            return SKIPPED
        return PASS

    def exit_code(self, strict=False):
        if self.status == FAIL:
            return 1
        if self.status == SKIPPED and strict:
            return 3
        return 0

    def to_dict(self):
        return jsonable(
            {
                "tool": "poissonbv",
                "version": __version__,
                "command": self.command,
                "config": self.config,
                "structure": self.structure,
                "sections": [
                    {
                        "name": s.name,
                        "status": s.status,
                        "reason": s.reason,
                        "checks": s.checks,
                        "tables": s.tables,
                        "data": s.data,
                    }
                    for s in self.sections
                ],
                "signs": self.signs,
                "summary": {"status": self.status, "first_failure": self.first_failure},
            }
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        lines = [
            f"poissonbv {__version__}  command={self.command}  window={self.config['window']}  arity={self.config['arity']}",
            f"structure: n={self.structure['n']} parity={self.structure['parity']}  pi = {self.structure['bivector']}",
        ]
        for s in self.sections:
            head = f"[{s.name}] {s.status.upper()}"
            if s.reason:
                head += f"  {s.reason}"
            lines.append(head)
            for k, v in sorted(s.data.items()):
                lines.append(f"    {k}: {_plain(v)}")
            for c in s.checks:
                line = f"  {c['status'].upper():4}  {c['name']}  ({c['checked']} checked"
                if c["skipped"]:
                    line += f", {c['skipped']} outside window"
                lines.append(line + ")")
                if c["status"] == FAIL and c["witness"] is not None:
                    lines.append(f"        witness: {_plain(c['witness'])}")
            for tname, rows in sorted(s.tables.items()):
                lines.append(f"    table {tname}:")
                for row in rows:
                    lines.append("      " + "  ".join(f"{k}={_plain(v)}" for k, v in row.items()))
        lines.append("sign conventions:")
        for k, v in sorted(self.signs.items()):
            lines.append(f"    {k}: {v}")
        tail = f"summary: {self.status.upper()}"
        if self.first_failure:
            tail += f"  first failure: {self.first_failure}"
        lines.append(tail)
        return "\n".join(lines) + "\n"


def _plain(v):
    v = jsonable(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def jsonable(x):
    """Convert to JSON-ready data: rationals become strings, never floats."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(x, Element):
        return str(x)
    if isinstance(x, dict):
        return {_key(k): jsonable(v) for k, v in sorted(x.items(), key=lambda kv: _key(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return str(x)


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(jsonable(v)) for v in k)
    return str(jsonable(k))


def _address(address):
    p, w, lam = address
    return {"degree": p, "weight": w, "lambda": None if lam is None else Fraction(lam)}


def _dim_rows(table):
    rows = []
    for address, dim in sorted(table.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0)):
        rows.append({**_address(address), "dim": dim})
    return rows


# --- structure-level helpers ---------------------------------------------


def _weights(pi):
    """(weights, spectrum) when the modular vector is diagonal, else (None, spectrum)."""
    spectrum = analyze_modular(modular_vector(pi))
    if spectrum.semisimple and spectrum.change_of_basis is None:
        return slot_weights(pi.carrier, spectrum.eigenvalues), spectrum
    return None, spectrum


def _polynomial(pi):
    return pi.carrier.carrier_kind == "polynomial"


def _complex_variants(pi):
    if _polynomial(pi):
        return COCHAIN, CHAIN
    return EXTERIOR_COCHAIN, EXTERIOR_TWISTED


def structure_summary(pi):
    ok, witness = jacobi_check(pi)
    kind = pi.carrier.carrier_kind
    coord = "x" if kind == "polynomial" else "xi"
    names = [pi.carrier.generators[pi.carrier.slot(coord, i)].name for i in range(pi.n)]
    return {
        "n": pi.n,
        "parity": "even" if kind == "polynomial" else "odd",
        "variables": names,
        "bivector": str(pi.bivector),
        "terms": len(pi.bivector.terms),
        "quadratic": pi.is_quadratic,
        "scaling_weight": pi.weight_shift(),
        "jacobi": PASS if ok else FAIL,
    }


def sign_table(pi):
    return {
        "contraction": "i_(X^Y) = i_X o i_Y",
        "top contraction i_(D1...Dn) vol": pinned_top_contraction(pi.carrier),
        "exterior coboundary sign": COBOUNDARY_SIGN(0),
        "boundary sign (i_pi d - d i_pi)": BOUNDARY_SIGN(),
        "dual de Rham sign": DUAL_DE_RHAM_SIGN(),
        "coform boundary sign": COFORM_BOUNDARY_SIGN(),
        "generated bracket sign (polynomial)": BRACKET_SIGN["polynomial"],
        "generated bracket sign (exterior)": BRACKET_SIGN["exterior"],
        "duality square sign": "(-1)^p, " + ", ".join(f"p={p}: {SQUARE_SIGN(p)}" for p in range(pi.n + 1)),
        "gravity grade": "n - 1 - m for a class of degree m",
    }


# --- sections -------------------------------------------------------------


def check_section(pi, config):
    s = Section("check")
    ok, witness = jacobi_check(pi)
    s.add(CheckResult("Jacobi identity [pi, pi] = 0", ok, 1, witness=None if ok else str(witness)))
    return s


def modular_section(pi, config):
    s = Section("modular")
    try:
        nu = modular_vector(pi)
    except InternalInconsistency as exc:
        s.add(CheckResult("modular vector is a Poisson cocycle", False, 1, witness=str(exc)))
        return s
    spectrum = analyze_modular(nu)
    s.data["modular vector"] = str(nu)
    s.data["verdict"] = spectrum.verdict
    s.data["eigenvalues"] = list(spectrum.eigenvalues)
    s.data["multiplicities"] = {str(k): v for k, v in spectrum.multiplicities}
    s.data["characteristic polynomial"] = list(spectrum.char_poly)
    if spectrum.change_of_basis is not None:
        s.data["eigencoordinates"] = [list(r) for r in spectrum.change_of_basis.to_dense()]
    vol = VolumeForm.standard(pi.carrier).form
    if spectrum.semisimple:
        weights = slot_weights(pi.carrier, spectrum.eigenvalues)
        s.data["volume form modular weight"] = modular_weight(next(iter(vol.terms)), weights)
    if _polynomial(pi):
        oracle = divergence_oracle(pi)
        s.add(CheckResult("modular vector matches the divergence oracle", oracle == nu, 1, witness=None if oracle == nu else {"oracle": str(oracle), "computed": str(nu)}))
        if spectrum.semisimple:
            ev = oracle_eigenvalues(oracle)
            ok = ev is not None and sorted(ev) == sorted(spectrum.eigenvalues)
            s.add(CheckResult("eigenvalue multiset matches the oracle", ok, 1, witness=None if ok else {"oracle": ev, "computed": list(spectrum.eigenvalues)}))
    return s


def _homogeneous_or_skip(s, pi):
    if pi.weight_shift() is None:
        s.skip("the bivector is not homogeneous in the scaling weight")
        return False
    return True


def cohomology_section(pi, config):
    s = Section("cohomology")
    if not _homogeneous_or_skip(s, pi):
        return s
    W = config["window"]
    weights, _ = _weights(pi)
    variant, _ = _complex_variants(pi)
    cx = build_complex(pi, None, variant, weights)
    s.add(_square_zero(cx, W, "delta^2 = 0"))
    s.tables["cohomology"] = _dim_rows(_dims(cx, W))
    return s


def _dims(cx, W):
    out = {}
    graded = cx.weights is not None
    for p in cx.degrees:
        for w in weight_range(W):
            for lam in cx.lambdas(p, w) if graded else [None]:
                if cx.basis(p, w, lam):
                    out[(p, w, lam)] = cx.homology(p, w, lam).dim
    return out


def _square_zero(cx, W, name):
    res = CheckResult(name, True)
    for p in cx.degrees:
        for w in weight_range(W):
            if cx.basis(p, w):
                res.checked += 1
                if not cx.square_zero(p, w) and res.passed:
                    res.passed = False
                    res.witness = {"slice": (p, w)}
    return res


def homology_section(pi, config):
    s = Section("homology")
    if not _homogeneous_or_skip(s, pi):
        return s
    W = config["window"]
    weights, _ = _weights(pi)
    _, variant = _complex_variants(pi)
    nu = modular_vector(pi)
    plain = build_complex(pi, None, variant, weights)
    twisted = build_complex(pi, nu, variant, weights)
    s.add(_square_zero(plain, W, "boundary^2 = 0 (untwisted)"))
    s.add(_square_zero(twisted, W, "boundary^2 = 0 (twisted by the modular vector)"))
    s.tables["twisted homology"] = _dim_rows(_dims(twisted, W))
    s.tables["untwisted homology"] = _dim_rows(_dims(plain, W))
    return s


def _duality_checks(s, pi, W, prefix):
    weights, _ = _weights(pi)
    cv, hv = _complex_variants(pi)
    nu = modular_vector(pi)
    cochain = build_complex(pi, None, cv, weights)
    chain = build_complex(pi, nu, hv, weights)
    vol = VolumeForm.standard(pi.carrier).form
    vw = modular_weight(next(iter(vol.terms)), weights) if weights is not None else None
    duality = Duality(cochain, chain, vw)
    if _polynomial(pi):
        for r in contraction_identity_suite(pi, W, LITERAL, nu):
            s.add(r, prefix)
        for r in contraction_identity_suite(pi, W, CHAIN_LEVEL, nu):
            s.add(r, prefix)
    else:
        for r in contraction_identity_suite(pi, W, LITERAL, nu):
            s.add(r, prefix)
    rank, dims = poincare_duality_check(cochain, chain, duality, W)
    s.add(rank, prefix)
    s.add(dims, prefix)
    rows = []
    for address, (a, target, b) in sorted(dims.detail["table"].items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0)):
        rows.append({**_address(address), "cohomology": a, "image": _address(target), "homology": b})
    s.tables[f"{prefix} duality" if prefix else "duality"] = rows


def duality_section(pi, config):
    s = Section("duality")
    if not _homogeneous_or_skip(s, pi):
        return s
    W = config["window"]
    _duality_checks(s, pi, W, "exterior" if not _polynomial(pi) else None)
    if _polynomial(pi) and pi.is_quadratic:
        _duality_checks(s, koszul_dual(pi).dual, W, "Koszul dual")
    return s


def _semisimple_or_skip(s, pi):
    if not _homogeneous_or_skip(s, pi):
        return False
    spectrum = analyze_modular(modular_vector(pi))
    if not spectrum.semisimple:
        s.skip(f"modular vector is {spectrum.verdict}")
        return False
    if spectrum.change_of_basis is not None and not _polynomial(pi):
        s.skip("exterior structure is not in eigencoordinates")
        return False
    return True


def mixed_section(pi, config):
    s = Section("mixed")
    if not _semisimple_or_skip(s, pi):
        return s
    W = config["window"]
    res = homotopy_suite(pi, W)
    s.add(res)
    s.data["homotopy slices"] = dict(res.detail)
    dims, homotopy = quasi_isomorphism_suite(pi, W)
    s.add(dims)
    s.add(homotopy)
    s.tables["weight-zero vs full homology"] = [
        {"degree": p, "weight": w, "weight-zero": a, "full": b} for (p, w), (a, b) in sorted(dims.detail["table"].items())
    ]
    from .spectral import weight_zero_subcomplex

    s.add(weight_zero_subcomplex(pi, W).check_axioms())
    return s


def _engine(pi, W):
    return BVEngine(pi, W, kind="polynomial" if _polynomial(pi) else "exterior")


def _bv_block(s, pi, W, prefix):
    engine = _engine(pi, W)
    results = check_bv_axioms(engine, bracket_sign=BRACKET_SIGN[engine.kind])
    for r in results:
        s.add(r, prefix)
    table = {}
    for a in engine.classes():
        table[a.address] = table.get(a.address, 0) + 1
    s.tables[f"{prefix} weight-zero cohomology" if prefix else "weight-zero cohomology"] = _dim_rows(table)


def bv_section(pi, config):
    s = Section("bv")
    if not _semisimple_or_skip(s, pi):
        return s
    W = config["window"]
    _bv_block(s, pi, W, None)
    if _polynomial(pi) and pi.is_quadratic:
        _bv_block(s, koszul_dual(pi).dual, W, "Koszul dual")
    return s


def gravity_section(pi, config):
    s = Section("gravity")
    if not _semisimple_or_skip(s, pi):
        return s
    W, arity = config["window"], config["arity"]
    engine = _engine(pi, W)
    maps = CyclicMaps(engine)
    degrees = range(-2, engine.n + 1)
    s.add(ses_check(maps, degrees, W))
    s.add(les_check(maps, degrees, W))
    classes = maps.classes()
    for r in gravity_suite(engine, arity, classes=classes):
        s.add(r)
    s.add(lie_jacobi_check(maps, classes))
    nonzero = 0
    for a in classes:
        for b in classes:
            x = maps.bracket([a, b])
            if x is not None and not x.is_zero():
                nonzero += 1
    s.data["negative cyclic classes (degrees 0..n)"] = len(classes)
    s.data["nonzero binary brackets"] = nonzero
    s.tables["negative cyclic homology"] = [
        {"degree": m, "weight": w, "dim": d} for (m, w), d in sorted(maps.hc.table(degrees, W).items())
    ]
    mutations = {}
    for mutation in (FLIP_EPSILON, CORRUPT_DELTA):
        results = gravity_suite(engine, arity, mutation=mutation)
        failed = [r for r in results if not r.passed]
        mutations[mutation] = {
            "detected": bool(failed),
            "first failing check": failed[0].name if failed else None,
            "witness": failed[0].witness if failed else None,
        }
    s.data["mutations"] = mutations
    return s


def koszul_section(pi, config, *, required=True):
    s = Section("koszul")
    if not _polynomial(pi):
        reason = "Koszul duality starts from a polynomial structure"
    elif not pi.is_quadratic:
        reason = "the bivector is not quadratic"
    else:
        reason = None
    if reason is not None:
        if required:
            s.add(CheckResult("structure admits a Koszul dual", False, 1, witness=reason))
            s.reason = f"rejected: {reason}"
            return s
        return s.skip(reason)
    try:
        pair, results = koszul_suite(pi, config["window"])
    except NotQuadratic as exc:  # pragma: no cover - guarded above
        s.add(CheckResult("structure admits a Koszul dual", False, 1, witness=str(exc)))
        return s
    s.data["dual bivector"] = str(pair.dual.bivector)
    s.data["Jacobi (primal, dual)"] = [PASS if pair.primal_jacobi else FAIL, PASS if pair.dual_jacobi else FAIL]
    for r in results:
        s.add(r)
        if r.name == "modular correspondence":
            s.data["dual modular vector"] = r.detail["nu!"]
        if r.name == "duality square":
            s.data["observed square signs"] = {str(k): v for k, v in sorted(r.detail["signs"].items())}
        if r.name.endswith("dimensions agree"):
            s.tables[r.name.replace(" agree", "")] = [
                {**_address(a), "primal": x, "dual": y} for a, (x, y) in sorted(r.detail["table"].items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0))
            ]
    return s


SECTIONS = {
    "check": check_section,
    "modular": modular_section,
    "cohomology": cohomology_section,
    "homology": homology_section,
    "duality": duality_section,
    "mixed": mixed_section,
    "bv": bv_section,
    "gravity": gravity_section,
    "koszul": koszul_section,
}


def run(command, pi, window=4, arity=4):
    """Build the Report for one command on one structure."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    if window < 1:
        raise ValueError("the window must be at least 1")
    if arity < 3:
        raise ValueError("the gravity arity must be at least 3")
    config = {"window": window, "arity": arity}
    names = [c for c in COMMANDS if c != "all"] if command == "all" else [command]
    sections = []
    for name in names:
        if name == "koszul":
            sections.append(koszul_section(pi, config, required=command == "koszul"))
            continue
        try:
            sections.append(SECTIONS[name](pi, config))
        except (Unsupported, NotHomogeneous) as exc:
            sections.append(Section(name).skip(str(exc)))
    return Report(command, config, structure_summary(pi), sections, sign_table(pi))
