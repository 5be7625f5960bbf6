"""Counting and sampling for the random cluster and Potts models on tori.

High temperature uses a polymer expansion over edge clusters; low
temperature and the transition point use contour expansions of the ordered
and disordered phases.  Small instances are checked against exhaustive
enumeration.
"""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, DecayViolation, InvalidCollection, KPViolation,
                     MissingConstant, NotSimplyConnected, RCCountError, RegimeMismatch, Timeout)
from .lattice import EdgeConfig, SimpleGraph, TorusGraph, build_torus
from .polymer import PartitionEstimate, Polymer, PolymerModel, truncated_expansion, ursell
from .ht_model import HTParams, ht_log_partition, ht_sample
from .contour import (Contour, MatchingCollection, Region, decompose, embed_simply_connected,
                      enumerate_contours, reconstruct)
from .ps_count import ConstantEstimates, log_Z_boundary, log_Z_torus, phase_constants
from .sampler import annealing_count, edwards_sokal, glauber_potts, sample_rc_torus
from .oracle import exact_contour_split, exact_Z_boundary, exact_Z_potts, exact_Z_rc

__all__ = [
    "BudgetExceeded", "DecayViolation", "InvalidCollection", "KPViolation", "MissingConstant",
    "NotSimplyConnected", "RCCountError", "RegimeMismatch", "Timeout",
    "EdgeConfig", "SimpleGraph", "TorusGraph", "build_torus",
    "PartitionEstimate", "Polymer", "PolymerModel", "truncated_expansion", "ursell",
    "HTParams", "ht_log_partition", "ht_sample",
    "Contour", "MatchingCollection", "Region", "decompose", "embed_simply_connected",
    "enumerate_contours", "reconstruct",
    "ConstantEstimates", "log_Z_boundary", "log_Z_torus", "phase_constants",
    "annealing_count", "edwards_sokal", "glauber_potts", "sample_rc_torus",
    "exact_contour_split", "exact_Z_boundary", "exact_Z_potts", "exact_Z_rc",
]
