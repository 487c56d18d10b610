"""Gaussian process regression in closed-form solution spaces of linear PDEs.

The package builds priors whose every realization satisfies a constant-
coefficient PDE (heat, wave, or Laplace) together with linear boundary
conditions on flat boundary pieces, fits them to data by marginal-likelihood
gradient descent, and provides exact-solution oracles plus physics
diagnostics (boundary/PDE residuals, energy conservation).
"""

from .families import (
    BasisFamily,
    BoundaryOp,
    catalog_lookup,
    enumerate_discrete,
    eval_basis,
    family_ids,
    grad_params,
    variety_residual,
)
from .gp import (
    Dataset,
    ModelState,
    Observation,
    TrainConfig,
    assemble_design,
    fit,
    nlml,
    nlml_grad,
    posterior_coeffs,
    predict,
    sample,
)

__all__ = [
    "BasisFamily",
    "BoundaryOp",
    "catalog_lookup",
    "enumerate_discrete",
    "eval_basis",
    "family_ids",
    "grad_params",
    "variety_residual",
    "Dataset",
    "ModelState",
    "Observation",
    "TrainConfig",
    "assemble_design",
    "fit",
    "nlml",
    "nlml_grad",
    "posterior_coeffs",
    "predict",
    "sample",
]

__version__ = "0.1.0"
