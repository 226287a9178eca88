"""Decayed knots: slope orders, cable groups, certificate checking and cone search."""

__version__ = "0.1.0"

from .backends import backend_for, normal_form_Gpq
from .builtin import builtin_cable_certificate
from .cable import CableParams, LOVerdict, lo_window, satellite_quotient
from .certificate import DecayCertificate, conclude_decay, verify_derivation
from .registry import Registry, decayed_registry_lookup
from .search import SearchOutcome, cone_search, enumerate_ball, replay_trace
from .slopes import Slope, ZZOrder, cramer_decompose, decayed_window_check
from .words import ParametricWord, Word, parse_word

__all__ = [
    "__version__",
    "CableParams",
    "DecayCertificate",
    "LOVerdict",
    "ParametricWord",
    "Registry",
    "SearchOutcome",
    "Slope",
    "Word",
    "ZZOrder",
    "backend_for",
    "builtin_cable_certificate",
    "conclude_decay",
    "cone_search",
    "cramer_decompose",
    "decayed_registry_lookup",
    "decayed_window_check",
    "enumerate_ball",
    "lo_window",
    "normal_form_Gpq",
    "parse_word",
    "replay_trace",
    "satellite_quotient",
    "verify_derivation",
]
