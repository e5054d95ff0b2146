"""Predual geometry of finite-dimensional W*-algebras.

Decides and certifies ``||phi + psi|| = ||phi - psi|| = ||phi|| = ||psi||``
through centralizer projections of ``|phi|``, builds girth polylines, and
measures Daugavet defects and defect sequences along growing algebras.
"""

from .algebra import AlgebraShape, central_decomposition, decompose_functional
from .centralizer import centralizer_structure, clusters_of, spectral_clusters
from .errors import ChainInfeasible, InputError, WorkCapExceeded
from .exact import ExactMatrix, GaussianRational
from .functional import (EXACT, FLOAT, Functional, SpectralBlock, act, adjoint, kusuda_check,
                         polar_decompose, trace_norm)
from .girth import build_girth_polyline, verify_polyline
from .splitter import (SplitInstance, approx_split, best_split, construct_psi, decide_exact,
                       enumerate_exact_solutions, solve, verify_certificate)
from .ultra import FunctionalSequence, certify_limit, run_sequence

__all__ = [
    "AlgebraShape", "central_decomposition", "decompose_functional",
    "centralizer_structure", "clusters_of", "spectral_clusters",
    "ChainInfeasible", "InputError", "WorkCapExceeded",
    "ExactMatrix", "GaussianRational",
    "EXACT", "FLOAT", "Functional", "SpectralBlock", "act", "adjoint", "kusuda_check",
    "polar_decompose", "trace_norm",
    "build_girth_polyline", "verify_polyline",
    "SplitInstance", "approx_split", "best_split", "construct_psi", "decide_exact",
    "enumerate_exact_solutions", "solve", "verify_certificate",
    "FunctionalSequence", "certify_limit", "run_sequence",
]
