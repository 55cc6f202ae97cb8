"""Quantum Hamilton-Jacobi spectra for complexified Morse and Poschl-Teller potentials."""
from .engine import (
    EigenfunctionForm,
    EnergyLevel,
    RiccatiProblem,
    build_eigenfunction,
    candidates,
    pole_residues,
    printed_energy,
    quantize,
    transform,
)
from .potentials import (
    GeneralizedMorse,
    PoschlTeller,
    SymmetryClass,
    classify_symmetry,
    reality_condition,
)
from .verification import GridOracleConfig, adjudicate, grid_eigenvalues, grid_residual

__all__ = [
    "EigenfunctionForm", "EnergyLevel", "RiccatiProblem", "build_eigenfunction", "candidates",
    "pole_residues", "printed_energy", "quantize", "transform", "GeneralizedMorse", "PoschlTeller",
    "SymmetryClass", "classify_symmetry", "reality_condition", "GridOracleConfig", "adjudicate",
    "grid_eigenvalues", "grid_residual",
]
