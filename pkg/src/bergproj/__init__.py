"""Weighted Bergman projections on the unit disc for radial weights
M(|z|) (1 - |z|^2)^alpha, and the bounded-variation analysis of the
multiplier b_n / a_n that relates them to the pure Jacobi weight."""

from .weights import WeightSpec, parse_weight, lambda_alpha
from .moments import gauss_jacobi_rule, moment, moment_table, bergman_coeff
from .projector import project, project_via_identity, multiplier_seq, identity_residual
from .analysis import bv_report, lemma_quantities, lemma_limits

__version__ = "0.1.0"
