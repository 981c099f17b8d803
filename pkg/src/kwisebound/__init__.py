"""Exact bounds on the probability that n k-wise independent bits are all 1."""

from .exact_core import BinomialSpec, KwiseError, Polynomial, parse_rational
from .extremal import (
    ExtremalCertificate,
    MomentDistribution,
    RootPairConfig,
    compute_M_dual_search,
    compute_M_primal,
    compute_m,
    odd_reduction,
    vandermonde_solve,
    verify_certificate,
)
from .relaxed import sandwich_report, tilde_M

__all__ = [
    "BinomialSpec",
    "ExtremalCertificate",
    "KwiseError",
    "MomentDistribution",
    "Polynomial",
    "RootPairConfig",
    "compute_M_dual_search",
    "compute_M_primal",
    "compute_m",
    "odd_reduction",
    "parse_rational",
    "sandwich_report",
    "tilde_M",
    "vandermonde_solve",
    "verify_certificate",
]
