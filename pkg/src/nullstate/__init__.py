"""Multiple-SLE connectivity weights: null-state PDE solutions, their collapse
limits, arc-diagram combinatorics and a percolation crossing benchmark."""

from .specfun import (ConvergenceError, DomainError, ParameterError, elliptic_k,
                      elliptic_k_complement, gauss_2f1, gauss_2f1_complement)
from .params import (KNOWN_CURVE_MODELS, KacIndex, SleKappa, central_charge, kac_weight,
                     one_leg_weight, potts_q, s_leg_weight)
from .diagrams import (ArcDiagram, LimitSequence, allowable_sequences, catalan,
                       enumerate_diagrams, validate_sequence)
from .solutions import (ConfigPoint, SolutionHandle, cardy_solution, combine, constant_solution,
                        counterexample_solution, mobius_transform_check, s1_solution, s2_solution,
                        zero_solution)
from .pde_check import ResidualReport, full_report, null_state_residual, ward_residuals
from .limits import (ClassificationError, CollapseResult, apply_sequence, classify_interval,
                     collapse_interval, collapse_outer, dual_vector)
from .percolation import LatticeSpec, TrialBatch, cardy_probability, run_batch

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
