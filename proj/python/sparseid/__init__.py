"""Sparse model discovery from trajectory data."""

from ._core import (
    ContractError,
    Error,
    IntegrationError,
    algorithm_names,
    fit,
    fit_system,
    lambda_support,
    rel_l1_error,
    rel_l2_error,
    simulate,
    system_names,
    top_s_support,
)

__all__ = [
    "ContractError",
    "Error",
    "IntegrationError",
    "algorithm_names",
    "fit",
    "fit_system",
    "lambda_support",
    "rel_l1_error",
    "rel_l2_error",
    "simulate",
    "system_names",
    "top_s_support",
]
