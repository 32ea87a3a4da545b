"""Exact rational computations for Poisson (co)homology, modular vectors, BV and gravity structures.

The main entry points are re-exported here; see the submodules for the full
interfaces.
"""

__version__ = "0.1.0"

from .calculus import (  # noqa: E402
    PoissonStructure,
    VolumeForm,
    jacobi_check,
    modular_vector,
    schouten,
)
from .fixtures import fixture  # noqa: E402
from .inputs import InputError, load, parse_input  # noqa: E402
from .koszul import koszul_dual, phi, psi  # noqa: E402
from .spectral import analyze_modular  # noqa: E402

__all__ = [
    "InputError",
    "PoissonStructure",
    "VolumeForm",
    "__version__",
    "analyze_modular",
    "fixture",
    "jacobi_check",
    "koszul_dual",
    "load",
    "modular_vector",
    "parse_input",
    "phi",
    "psi",
    "schouten",
]
