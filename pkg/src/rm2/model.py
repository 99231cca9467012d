"""Model definition: parameters, potential, shape classes, momentum maps."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import tolerances
from .errors import BranchPoint, Unclassified


@dataclass(frozen=True)
class ModelParams:
    """Parameter pair (lambda, beta) of one Rosen-Morse II Hamiltonian.

    Units follow hbar^2/(2m) = 1.  lambda > 0 and beta >= 0; both signs of
    lambda give the same Hamiltonian and beta < 0 is the mirror image x -> -x,
    so nothing is lost.
    """

    lam: float
    beta: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")

    @property
    def well_coefficient(self) -> float:
        """Depth coefficient lambda^2 - 1/4 of the sech^2 term."""
        return self.lam**2 - 0.25

    def shifted(self, dlam: float) -> "ModelParams":
        """Same beta, lambda shifted by dlam (SUSY chains use dlam = -1)."""
        return ModelParams(self.lam + dlam, self.beta)


class PotentialShape(enum.Enum):
    WELL = "well"
    STEP = "step"
    BARRIER = "barrier"


@dataclass(frozen=True)
class Momenta:
    """Incoming/outgoing channel momenta k = sqrt(E + 2 beta), k' = sqrt(E - 2 beta)."""

    k: complex
    k_prime: complex

    @property
    def energy(self) -> complex:
        return 0.5 * (self.k**2 + self.k_prime**2)

    @property
    def asymmetry(self) -> complex:
        """Reconstructed beta = (k^2 - k'^2)/4."""
        return 0.25 * (self.k**2 - self.k_prime**2)


def potential(p: ModelParams, x):
    """V(x) = -(lambda^2 - 1/4) sech^2(x) + 2 beta tanh(x); scalar or ndarray."""
    x = np.asarray(x, dtype=float)
    sech2 = 1.0 / np.cosh(x) ** 2
    out = -p.well_coefficient * sech2 + 2.0 * p.beta * np.tanh(x)
    return float(out) if out.ndim == 0 else out


def classify_shape(well_coefficient: float, beta: float) -> PotentialShape:
    """Classify the potential shape from its sech^2 coefficient and beta.

    ``well_coefficient`` is lambda^2 - 1/4 for real lambda and -(l^2 + 1/4)
    for the imaginary-lambda barrier family.  Combinations not covered by the
    three documented shapes raise ``Unclassified`` rather than guessing (this
    includes the undecided equality case |well_coefficient| = beta < 0 side).
    """
    if beta <= 0:
        raise Unclassified(f"shape classification requires beta > 0, got {beta}")
    if 0.0 < beta < well_coefficient:
        return PotentialShape.WELL
    if 0.0 < well_coefficient < beta:
        return PotentialShape.STEP
    if well_coefficient < 0.0 and abs(well_coefficient) > beta:
        return PotentialShape.BARRIER
    raise Unclassified(
        f"no documented shape for well_coefficient={well_coefficient}, beta={beta}"
    )


def _principal_sqrt(w: complex) -> complex:
    """Principal square root; real part >= 0, positive imaginary on the cut."""
    if w.imag == 0.0:
        w = complex(w.real, 0.0)  # normalize -0.0 so the cut is approached from above
    return cmath.sqrt(w)


def momenta_from_energy(p: ModelParams, energy: complex) -> Momenta:
    """Map E to (k, k') on the principal branch.

    Raises ``BranchPoint`` when E is within ``branch_point_eps`` of +-2*beta.
    On this branch bound-state momenta come out on the positive imaginary
    axis; second-sheet (anti-bound) momenta need an explicit sign flip, see
    ``scattering.sheet_momenta``.
    """
    eps = tolerances().branch_point_eps
    energy = complex(energy)
    for sign in (+1.0, -1.0):
        if abs(energy - sign * 2.0 * p.beta) < eps:
            raise BranchPoint(f"E = {energy} is at the branch point {sign * 2 * p.beta}")
    return Momenta(
        k=_principal_sqrt(energy + 2.0 * p.beta),
        k_prime=_principal_sqrt(energy - 2.0 * p.beta),
    )


# Stable hyperbolic helpers shared by the analytic evaluators.  For |x| of a
# few tens, 1 -+ tanh(x) cancels catastrophically if formed literally; these
# forms stay fully accurate and never overflow for |x| < 350.


def one_plus_tanh(x: float) -> float:
    return 2.0 / (1.0 + math.exp(-2.0 * x)) if x >= 0 else 2.0 * math.exp(2.0 * x) / (1.0 + math.exp(2.0 * x))


def one_minus_tanh(x: float) -> float:
    return one_plus_tanh(-x)


def log_one_plus_tanh(x: float) -> float:
    return math.log(2.0) - math.log1p(math.exp(-2.0 * x)) if x >= 0 else math.log(2.0) + 2.0 * x - math.log1p(math.exp(2.0 * x))


def log_one_minus_tanh(x: float) -> float:
    return log_one_plus_tanh(-x)


def log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)
