"""Bounds for two-parameter quantum estimation.

Quantum Fisher information, the separable-measurement (Nagaoka) and Holevo
bounds, the Lu-Wang uncertainty relation and its bound, and measurement
statistics for finite POVMs.
"""
from .bounds import (
    BoundResult,
    SolverOptions,
    UncertaintyCurve,
    diag_weight,
    envelope_from_weighted_bound,
    hcrb_general,
    hcrb_qubit,
    nagaoka_curve_qubit,
    ncrb_general,
    ncrb_qubit,
    rld_crb,
    sld_crb,
)
from .errors import QBoundsError, SolverError, ValidationError
from .luwang import LwurSpec, lwb, lwur_boundary_curve, lwur_slack
from .measurement import Povm, classical_fisher, precision, regret_report
from .model import EstimationProblem, incompatibility, qfi_data, rld_qfi, sld_operators, sld_qfi
from .randomgen import SeededRng, random_fullrank_povm, random_problem, random_rank1_povm
from .scenarios import RotationsConfig, equal_bounds_problem, rotations_problem, rotations_reference

__version__ = "0.1.0"
