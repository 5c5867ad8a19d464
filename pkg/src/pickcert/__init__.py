"""Numerical uniqueness certificates for Pick interpolation on the polydisc.

Rational inner functions of degree below ``N`` on ``D^n`` are determined
among Schur-class functions by their values on ``N**n`` nodes placed ``N``
per flat analytic disc. This package builds those functions and nodes and
checks the argument numerically, one disc at a time.
"""

from .errors import PickCertError
from .geometry import AnalyticDisc, MobiusMap, NodeConfig, NodeGrid, choose_mobius, generate_nodes
from .pick import PickProblem, build_pick_matrix, classify, reconstruct_unique, two_solutions, value_disc
from .polynomial import MultiPoly, is_stable, reflect, roots_1d
from .rif import RationalInnerFunction, degree, disc_degree, eval_rif, make_rif, restrict
from .verify import certify_uniqueness, equality_sweep, refined_certify, sharpness_demo

__version__ = "0.1.0"

__all__ = [
    "AnalyticDisc", "MobiusMap", "MultiPoly", "NodeConfig", "NodeGrid", "PickCertError", "PickProblem",
    "RationalInnerFunction", "build_pick_matrix", "certify_uniqueness", "choose_mobius", "classify",
    "degree", "disc_degree", "equality_sweep", "eval_rif", "generate_nodes", "is_stable", "make_rif",
    "reconstruct_unique", "refined_certify", "reflect", "restrict", "roots_1d", "sharpness_demo",
    "two_solutions", "value_disc",
]
