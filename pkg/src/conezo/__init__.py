"""Zeroth-order optimization with cone-restricted momentum sampling.

Optimizers that query only function values, a verification suite that checks
the estimator's moment identities and concentration claims by Monte Carlo
against closed forms, and an experiment harness (runs, grids, speedup
measurement, step timing).
"""
from . import kernels
from .estimator import NonFiniteValueError, Objective, zoge, zoge_coefficient, zoge_limit
from .optimizers import (ConeConfig, OptimizerState, StepReport, conmezo_step,
                         init_state, mezo_momentum_step, mezo_step, step,
                         theta_star, warmup_beta)
from .problems import make_paper_quadratic, make_problem, make_rosenbrock, make_sphere
from .rng import RngStream
from .sampling import (ConeAngleSampler, ConeDirectionSpec, cone_direction_exact,
                       cone_direction_fast, sample_orthogonal_complement)
from .vec import axpy, dot, lincomb, norm, sample_gaussian, sample_unit_sphere, scale

__version__ = "0.1.0"
