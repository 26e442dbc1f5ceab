"""Worst-case finite-sum instance constructors: the adaptive resisting
oracle for deterministic algorithms and the rotated, clamped chain
distribution for randomized ones, together with the closed-form scaling
calculators that size (lambda, sigma, K, d) from a target accuracy."""
from .params import (
    HardInstanceSpec,
    InstanceTooSmallError,
    deterministic_params,
    ell_p,
    lemma_d_requirement,
    randomized_params,
)
from .randomized import (
    RandomizedHardInstance,
    load_b_matrix,
    sample_randomized_instance,
    save_b_matrix,
)
from .resisting import NotFinalizedError, ResistingCertificate, ResistingOracle

__all__ = [
    "HardInstanceSpec",
    "InstanceTooSmallError",
    "deterministic_params",
    "randomized_params",
    "ell_p",
    "lemma_d_requirement",
    "ResistingOracle",
    "ResistingCertificate",
    "NotFinalizedError",
    "RandomizedHardInstance",
    "sample_randomized_instance",
    "save_b_matrix",
    "load_b_matrix",
]
