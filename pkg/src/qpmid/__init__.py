"""Quasipolynomials with a root of maximal multiplicity, Padé approximants
of the exponential, and zeros of Kummer and Whittaker functions."""

from .hyperfunc import KummerParams, WhittakerParams, kummer_phi, phi, whittaker_m
from .mid import MIDDesign, check_equivalences, normalize, synthesize_coeffs, verify_dominance
from .pade import PadePair, exp_pade_normalized, perron_pair
from .polycore import Polynomial, TruncatedSeries
from .quasipoly import Quasipolynomial, count_zeros_in_rect, find_zeros_in_rect, rightmost_root

__all__ = [
    "KummerParams",
    "MIDDesign",
    "PadePair",
    "Polynomial",
    "Quasipolynomial",
    "TruncatedSeries",
    "WhittakerParams",
    "check_equivalences",
    "count_zeros_in_rect",
    "exp_pade_normalized",
    "find_zeros_in_rect",
    "kummer_phi",
    "normalize",
    "perron_pair",
    "phi",
    "rightmost_root",
    "synthesize_coeffs",
    "verify_dominance",
    "whittaker_m",
]
