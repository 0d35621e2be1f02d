"""Weighted ergodic averages with prime-divisor-count weights."""
from .weights import WeightKind, WeightTable, build_pair, build_weight_table, dump_table, load_table
from .asymptotics import RatioSeries, dyadic_comparability
from .rearrangement import PermutationSystem, swap_normalize, verify_inequality
from .maximal import LatticeFunction, claim_certificate, dyadic_maximal, level_set_report, sup_maximal
from .dynamics import BernoulliShift, Doubling, Rotation, weighted_birkhoff

__all__ = [
    "WeightKind", "WeightTable", "build_pair", "build_weight_table", "dump_table", "load_table",
    "RatioSeries", "dyadic_comparability",
    "PermutationSystem", "swap_normalize", "verify_inequality",
    "LatticeFunction", "claim_certificate", "dyadic_maximal", "level_set_report", "sup_maximal",
    "BernoulliShift", "Doubling", "Rotation", "weighted_birkhoff",
]
__version__ = "0.1.0"
