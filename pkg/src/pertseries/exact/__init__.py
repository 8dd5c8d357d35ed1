"""Exact arithmetic: rationals, polynomials in alpha, rational functions in n,
truncated series in w = 1/n, and Sturm-chain certificates."""

from .alphapoly import AlphaPolynomial, as_fraction, binom_alpha
from .rational import RationalFunction, rf_arith
from .series import PowerSeries, expand_rational, expand_shifted_power
from .sturm import (
    Interval,
    bound_violations,
    certify_bound,
    isolate_roots,
    merge_intervals,
    roots_in_closed,
    sturm_chain,
    sturm_roots,
)

__all__ = [
    "AlphaPolynomial",
    "Interval",
    "PowerSeries",
    "RationalFunction",
    "as_fraction",
    "binom_alpha",
    "bound_violations",
    "certify_bound",
    "expand_rational",
    "expand_shifted_power",
    "isolate_roots",
    "merge_intervals",
    "rf_arith",
    "roots_in_closed",
    "sturm_chain",
    "sturm_roots",
]
