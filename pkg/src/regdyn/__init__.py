"""Regularized Heisenberg dynamics on truncated operator algebras.

Cutoff Hamiltonians H_L, their evolutions e^{iH_L t} X e^{-iH_L t}, and
seminorm-based Cauchy checks of the resulting sequences.
"""

from .errors import RegDynError
from .hamiltonians import (
    HamiltonianFamily,
    LatticeConfig,
    RotationPlan,
    diagonal_family,
    lattice_family,
    rotated_family,
)
from .seminorms import ConvergenceReport, SeminormSpec, Verdict, seminorm_f, seminorm_fk
from .spectral import Spectrum, TestFunction, make_spectrum

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport",
    "HamiltonianFamily",
    "LatticeConfig",
    "RegDynError",
    "RotationPlan",
    "SeminormSpec",
    "Spectrum",
    "TestFunction",
    "Verdict",
    "diagonal_family",
    "lattice_family",
    "make_spectrum",
    "rotated_family",
    "seminorm_f",
    "seminorm_fk",
]
