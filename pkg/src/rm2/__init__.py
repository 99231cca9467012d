"""Exact scattering and SUSY-transformation toolkit for the Rosen-Morse II Hamiltonian.

The potential family is V(x) = -(lambda^2 - 1/4) sech^2(x) + 2 beta tanh(x)
with hbar^2/(2m) = 1.  The package computes its transfer and scattering
matrices, enumerates and classifies the S-matrix poles (bound, redundant,
anti-bound), evaluates the closed-form solutions attached to each pole, and
builds first-order and Wronskian-chain SUSY partner potentials from ground,
redundant and anti-bound seeds, with an independent Numerov solver to verify
every spectral claim.
"""

from .config import Tolerances, set_tolerances, tolerances
from .model import ModelParams, Momenta, PotentialShape, classify_shape, momenta_from_energy, potential

__all__ = [
    "ModelParams",
    "Momenta",
    "PotentialShape",
    "Tolerances",
    "classify_shape",
    "momenta_from_energy",
    "potential",
    "set_tolerances",
    "tolerances",
]

__version__ = "0.1.0"
