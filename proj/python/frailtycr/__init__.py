"""Bivariate competing-risks Gamma frailty models.

Thin Python layer over the C++ core: model evaluation (joint/marginal
sub-distributions, sub-densities, survival), dataset simulation, latent-space
oracles, identifiability checks and maximum-likelihood fitting.
"""

import json as _json

from ._core import (
    Dataset,
    Model,
    __version__,
    auto_init,
    default_grid,
    gamma_laplace,
    joint_subdensity,
    joint_subdist,
    joint_survival,
    log_likelihood,
    marginal_subdist,
    mc_joint_subdist,
    mc_subdensity,
    oracle_quad_dimension,
    quad_joint_subdist,
    read_dataset,
    sample_frailty,
    simulate,
)
from ._core import (
    distinguishability_scan_json as _scan_json,
    fit_mle_json as _fit_mle_json,
    verify_dirichlet_invariance_json as _dirichlet_json,
    verify_general_nonidentifiability_json as _general_json,
)

__all__ = [
    "Dataset",
    "Model",
    "__version__",
    "auto_init",
    "default_grid",
    "distinguishability_scan",
    "fit_mle",
    "gamma_laplace",
    "joint_subdensity",
    "joint_subdist",
    "joint_survival",
    "log_likelihood",
    "marginal_subdist",
    "mc_joint_subdist",
    "mc_subdensity",
    "model_from_dict",
    "oracle_quad_dimension",
    "quad_joint_subdist",
    "read_dataset",
    "sample_frailty",
    "simulate",
    "verify_dirichlet_invariance",
    "verify_general_nonidentifiability",
]


def model_from_dict(spec):
    """Build a Model from a plain dict with 'hazards' and 'frailty' keys."""
    return Model.from_json(_json.dumps(spec))


def fit_mle(dataset, init, freeze_hazards=False, std_errors=False, max_iterations=2000,
            threads=0):
    """Maximum-likelihood fit; returns a dict with the fitted model and metadata."""
    return _json.loads(
        _fit_mle_json(dataset, init, freeze_hazards, std_errors, max_iterations, threads))


def verify_general_nonidentifiability(base, c1, c2, t1, t2, broken_pairing=False,
                                      mc_n=1000000, seed=1, threads=0):
    return _json.loads(_general_json(base, c1, c2, t1, t2, broken_pairing, mc_n, seed, threads))


def verify_dirichlet_invariance(model, c1, c2, t1, t2, sigma_perturb=0.0):
    return _json.loads(_dirichlet_json(model, c1, c2, t1, t2, sigma_perturb))


def distinguishability_scan(model_a, model_b, t1, t2, threshold=1e-4):
    return _json.loads(_scan_json(model_a, model_b, t1, t2, threshold))
