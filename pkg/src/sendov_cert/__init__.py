"""Validated-numerics certificates for the degree-nine Sendov argument."""

from .interval import PI, DomainError, Interval
from .prover import Box, Certificate, Options, certify, replay
from .conditions import CONDITION_IDS, build
from .theorem import TheoremReport, verify_all

__version__ = "0.1.0"

__all__ = [
    "PI",
    "DomainError",
    "Interval",
    "Box",
    "Certificate",
    "Options",
    "certify",
    "replay",
    "CONDITION_IDS",
    "build",
    "TheoremReport",
    "verify_all",
]
