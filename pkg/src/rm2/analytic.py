"""Evaluatable exact solutions of the Rosen-Morse II Schroedinger equation.

Two kinds of object live here:

* the general solution pair (psi, phi) at arbitrary complex energy, built
  from 2F1 with argument z = (1 + tanh x)/2, and
* the closed-form solutions attached to each S-matrix pole: an exponential
  times a power of cosh times either a Jacobi polynomial (phi families) or a
  2F1 factor (psi families).

Condition-2 families are the lambda -> -lambda image of Condition 1 and share
the same code path.  All derivatives are assembled analytically (product rule
plus the 2F1/Jacobi derivative rules); Wronskian chains downstream would
amplify finite-difference noise beyond use.

Pole-family evaluation is done in log-magnitude form, ``scaled(x)`` returning
(log_scale, value, derivative) with the true function value
``value * exp(log_scale)``: the cosh powers involved over- or underflow well
inside the x ranges of interest.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .config import tolerances
from .errors import ExponentSingularity
from .model import (
    ModelParams,
    log_cosh,
    log_one_minus_tanh,
    log_one_plus_tanh,
    momenta_from_energy,
    one_minus_tanh,
    one_plus_tanh,
)
from .specfun import (
    hyp2f1,
    hyp2f1_derivative,
    hyp2f1_pair_scaled,
    jacobi_p,
    jacobi_p_derivative,
)


class SolutionFamily(enum.Enum):
    PSI_GENERAL = "psi_general"
    PHI_GENERAL = "phi_general"
    PSI_1 = "psi_1"
    PHI_1 = "phi_1"
    PSI_2 = "psi_2"
    PHI_2 = "phi_2"


@dataclass(frozen=True)
class PoleIndexData:
    """Derived scalars of one pole index: exponent s, mu, nu, energy."""

    s: float
    mu: float
    nu: float
    energy: float


def _lambda_eff(p: ModelParams, condition: int) -> float:
    if condition == 1:
        return p.lam
    if condition == 2:
        return -p.lam
    raise ValueError(f"condition must be 1 or 2, got {condition}")


def pole_index_data(p: ModelParams, condition: int, n: int) -> PoleIndexData:
    """Exponent, imaginary momenta and energy of pole (condition, n).

    s = lambda_eff - 1/2 - n with lambda_eff = +-lambda;
    mu = s + beta/s, nu = s - beta/s, E = -(s^2 + beta^2/s^2).
    Raises ``ExponentSingularity`` when s vanishes.
    """
    if n < 0:
        raise ValueError(f"pole index must be non-negative, got {n}")
    s = _lambda_eff(p, condition) - 0.5 - n
    if abs(s) < tolerances().exponent_singularity_eps:
        raise ExponentSingularity(
            f"lambda_eff - 1/2 - n = {s} for condition {condition}, n = {n}"
        )
    ratio = p.beta / s
    return PoleIndexData(s=s, mu=s + ratio, nu=s - ratio, energy=-(s * s + ratio * ratio))


class GeneralSolution:
    """One member of the fundamental pair at arbitrary complex energy."""

    def __init__(self, params: ModelParams, energy: complex, family: SolutionFamily):
        if family not in (SolutionFamily.PSI_GENERAL, SolutionFamily.PHI_GENERAL):
            raise ValueError(f"not a general family: {family}")
        self.params = params
        self.energy = complex(energy)
        self.family = family
        self.condition = None
        self.n = None
        momenta = momenta_from_energy(params, energy)
        self._k = momenta.k
        self._kp = momenta.k_prime

    def value_and_derivative(self, x: float) -> tuple[complex, complex]:
        p, k, kp = self.params, self._k, self._kp
        log_m = log_one_minus_tanh(x)
        log_p = log_one_plus_tanh(x)
        omt = one_minus_tanh(x)
        opt = one_plus_tanh(x)
        z = 0.5 * opt
        omz = 0.5 * omt
        dzdx = 0.5 * omt * opt
        half_sum = 0.5j * (k + kp)
        if self.family is SolutionFamily.PSI_GENERAL:
            a = 0.5 - p.lam + half_sum
            b = 0.5 + p.lam + half_sum
            c = 1.0 + 1j * k
            log_pref = (0.5j * kp) * log_m + (0.5j * k) * log_p
            dln_pref = (0.5j * k) * omt - (0.5j * kp) * opt
        else:
            a = 0.5 - p.lam - half_sum
            b = 0.5 + p.lam - half_sum
            c = 1.0 - 1j * k
            log_pref = 1j * k * math.log(2.0) - (0.5j * kp) * log_m - (0.5j * k) * log_p
            dln_pref = (0.5j * kp) * opt - (0.5j * k) * omt
        pref = cmath.exp(log_pref)
        f = hyp2f1(a, b, c, z, one_minus_z=omz)
        fp = hyp2f1_derivative(a, b, c, z, one_minus_z=omz)
        value = pref * f
        return value, value * dln_pref + pref * fp * dzdx

    def value(self, x: float) -> complex:
        return self.value_and_derivative(x)[0]

    def scaled(self, x: float) -> tuple[float, complex, complex]:
        v, dv = self.value_and_derivative(x)
        return 0.0, v, dv


class PoleEigenfunction:
    """Closed-form solution at pole (condition, n); real on the real axis."""

    def __init__(self, params: ModelParams, condition: int, family: str, n: int):
        if family not in ("psi", "phi"):
            raise ValueError(f"pole family must be 'psi' or 'phi', got {family!r}")
        self.params = params
        self.condition = condition
        self.kind = family
        self.n = n
        self.index = pole_index_data(params, condition, n)
        self.energy = self.index.energy
        self.family = {
            ("psi", 1): SolutionFamily.PSI_1,
            ("phi", 1): SolutionFamily.PHI_1,
            ("psi", 2): SolutionFamily.PSI_2,
            ("phi", 2): SolutionFamily.PHI_2,
        }[(family, condition)]
        self._lam_eff = _lambda_eff(params, condition)
        self._ratio = params.beta / self.index.s  # beta / s

    def scaled(self, x: float) -> tuple[float, float, float]:
        """(log_scale, value, derivative); true value is value * exp(log_scale)."""
        s, b = self.index.s, self._ratio
        t = math.tanh(x)
        sech2 = one_minus_tanh(x) * one_plus_tanh(x)
        if self.kind == "phi":
            # exp(-b x) sech^s(x) P_n^(mu,nu)(tanh x)
            log_scale = -b * x - s * log_cosh(x)
            poly = jacobi_p(self.n, self.index.mu, self.index.nu, t)
            dpoly = jacobi_p_derivative(self.n, self.index.mu, self.index.nu, t)
            value = poly
            deriv = (-b - s * t) * poly + sech2 * dpoly
            return log_scale, value, deriv
        # psi: exp(b x) cosh^s(x) 2F1(n+1, n - 2 lam_eff + 1; n - lam_eff + b + 3/2; z).
        # The 2F1 factor can dwarf the float range (its scale cancels against
        # the prefactor), so value and derivative come back jointly scaled.
        a1 = self.n + 1.0
        a2 = self.n - 2.0 * self._lam_eff + 1.0
        c = self.n - self._lam_eff + b + 1.5
        z = 0.5 * one_plus_tanh(x)
        omz = 0.5 * one_minus_tanh(x)
        dzdx = 0.5 * one_minus_tanh(x) * one_plus_tanh(x)
        log_f, f, fp = hyp2f1_pair_scaled(a1, a2, c, z, one_minus_z=omz)
        log_scale = b * x + s * log_cosh(x) + log_f
        value = f.real
        deriv = (b + s * t) * f.real + fp.real * dzdx
        return log_scale, value, deriv

    def value_and_derivative(self, x: float) -> tuple[float, float]:
        log_scale, v, dv = self.scaled(x)
        scale = math.exp(log_scale)
        return scale * v, scale * dv

    def value(self, x: float) -> float:
        return self.value_and_derivative(x)[0]


WaveFunction = GeneralSolution | PoleEigenfunction


def eval_general(p: ModelParams, energy: complex, family: SolutionFamily, x: float) -> tuple[complex, complex]:
    """Value and x-derivative of the general psi or phi solution at x."""
    return GeneralSolution(p, energy, family).value_and_derivative(x)


def eval_pole_eigenfunction(p: ModelParams, condition: int, family: str, n: int, x: float) -> tuple[float, float]:
    """Value and x-derivative of the closed-form pole solution at x."""
    return PoleEigenfunction(p, condition, family, n).value_and_derivative(x)


def general_solution(p: ModelParams, energy: complex, family: SolutionFamily) -> GeneralSolution:
    return GeneralSolution(p, energy, family)


def pole_eigenfunction(p: ModelParams, condition: int, family: str, n: int) -> PoleEigenfunction:
    return PoleEigenfunction(p, condition, family, n)
