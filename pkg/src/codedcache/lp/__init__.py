"""Entropy-cone linear program for the caching model."""

from .certificate import CertificateError, DualCertificate, verify_certificate
from .ground import DEFAULT_CAP, GroundSet, build_ground_set
from .problem import (
    Constraint,
    LpProblem,
    build_problem,
    elemental_inequalities,
    problem_constraints,
    stabilizer,
    symmetry_constraints,
)
from .solver import LpSolution, LpStatusError, solve_min_rate

__all__ = [
    "CertificateError", "Constraint", "DEFAULT_CAP", "DualCertificate", "GroundSet", "LpProblem",
    "LpSolution", "LpStatusError", "build_ground_set", "build_problem", "elemental_inequalities",
    "problem_constraints", "solve_min_rate", "stabilizer", "symmetry_constraints", "verify_certificate",
]
