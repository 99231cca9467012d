"""Transfer matrix, scattering matrix, flux checks and pole verification.

The transfer matrix maps left plane-wave amplitudes (A-, B-) of a solution
~ A- e^{ikx} + B- e^{-ikx} (x -> -infinity) to right amplitudes (A+, B+) of
~ A+ e^{ik'x} + B+ e^{-ik'x} (x -> +infinity).  Every entry is a ratio of
Gamma functions; all four share one shape,

    entry(k, k') = G(1+ik) G(ik') / [G(1/2-lam+i(k+k')/2) G(1/2+lam+i(k+k')/2)],

with T11 = entry(k,k'), T12 = entry(-k,k'), T21 = entry(k,-k'),
T22 = entry(-k,-k').  This arrangement is the one that reproduces the
numerically fitted amplitude map of the exact solutions (see
tests/test_scattering.py); det T = k/k' identically, and the free-particle
limit (lam = 1/2, beta = 0) gives T = identity.

S-matrix poles are zeros of T22, produced by the two Gamma poles of its
denominator (Condition 1 from the 1/2-lam factor, Condition 2 from the
1/2+lam one).  Verification of a classified pole record works in the
(mu, nu) parametrization, where both conditions are exact closed-form
statements, plus a |T22| decay scan approaching the pole energy on the
record's momentum sheet.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .analytic import GeneralSolution, SolutionFamily, general_solution
from .config import tolerances
from .errors import AtPole, PoleOfGamma
from .model import ModelParams, Momenta, momenta_from_energy
from .specfun import log_gamma
from .spectrum import PoleRecord, classify_poles


@dataclass(frozen=True)
class TransferMatrix:
    t11: complex
    t12: complex
    t21: complex
    t22: complex
    notes: tuple[str, ...] = ()

    @property
    def det(self) -> complex:
        return self.t11 * self.t22 - self.t12 * self.t21

    def map_amplitudes(self, a_minus: complex, b_minus: complex) -> tuple[complex, complex]:
        return (
            self.t11 * a_minus + self.t12 * b_minus,
            self.t21 * a_minus + self.t22 * b_minus,
        )


@dataclass(frozen=True)
class ScatteringMatrix:
    s11: complex
    s12: complex
    s21: complex
    s22: complex


def _transfer_entry(lam: float, k: complex, kp: complex) -> tuple[complex, str | None]:
    """One Gamma-ratio entry, computed in log space.

    Returns (value, note): a denominator Gamma pole makes the entry an exact
    zero, a numerator pole an inf (tagged, not fatal; the zeros of T22 are
    the object of study).
    """
    half_sum = 0.5j * (k + kp)
    try:
        log_den = log_gamma(0.5 - lam + half_sum) + log_gamma(0.5 + lam + half_sum)
    except PoleOfGamma:
        return complex(0.0), "zero from denominator Gamma pole"
    try:
        log_num = log_gamma(1.0 + 1j * k) + log_gamma(1j * kp)
    except PoleOfGamma:
        return complex(math.inf, 0.0), "Gamma pole in entry numerator"
    return cmath.exp(log_num - log_den), None


def transfer_matrix_from_momenta(lam: float, momenta: Momenta) -> TransferMatrix:
    k, kp = momenta.k, momenta.k_prime
    entries = {}
    notes = []
    for name, (sk, skp) in {
        "t11": (+1, +1),
        "t12": (-1, +1),
        "t21": (+1, -1),
        "t22": (-1, -1),
    }.items():
        value, note = _transfer_entry(lam, sk * k, skp * kp)
        entries[name] = value
        if note:
            notes.append(f"{name}: {note}")
    return TransferMatrix(notes=tuple(notes), **entries)


def transfer_matrix(p: ModelParams, energy: complex) -> TransferMatrix:
    """Transfer matrix at complex energy, principal momentum branch."""
    return transfer_matrix_from_momenta(p.lam, momenta_from_energy(p, energy))


def s_matrix(p: ModelParams, energy: complex) -> ScatteringMatrix:
    """Scattering matrix S = (1/T22) [[-T21, 1], [det T, T12]].

    Raises ``AtPole`` when |T22| is below ``t22_pole_eps``; the error carries
    the nearest classified pole record within ``pole_match_distance``.
    """
    t = transfer_matrix(p, energy)
    tol = tolerances()
    if abs(t.t22) <= tol.t22_pole_eps:
        record = nearest_pole_record(p, energy)
        raise AtPole(f"S-matrix pole at E = {energy}", record=record)
    return ScatteringMatrix(
        s11=-t.t21 / t.t22,
        s12=1.0 / t.t22,
        s21=t.det / t.t22,
        s22=t.t12 / t.t22,
    )


def nearest_pole_record(p: ModelParams, energy: complex, n_cap: int = 40) -> PoleRecord | None:
    tol = tolerances()
    best = None
    best_distance = math.inf
    for record in classify_poles(p, n_cap):
        distance = abs(complex(energy) - record.energy)
        if distance < best_distance:
            best, best_distance = record, distance
    return best if best_distance <= tol.pole_match_distance else None


def sheet_momenta(p: ModelParams, energy: complex, record: PoleRecord) -> Momenta:
    """Momenta at complex energy on the sheet containing a pole record.

    The principal branch puts every square root in the upper half plane;
    anti-bound and redundant records live on sign-flipped branches.  Signs
    are chosen so that -i k -> nu and -i k' -> mu as energy approaches the
    record's energy.
    """
    principal = momenta_from_energy(p, energy)
    sk = 1.0 if record.nu >= 0 else -1.0
    skp = 1.0 if record.mu >= 0 else -1.0
    return Momenta(k=sk * principal.k, k_prime=skp * principal.k_prime)


def condition_residual(p: ModelParams, record: PoleRecord, energy: complex) -> float:
    """|1/2 -+ lambda - (i/2)(k + k') + n| with momenta on the record's sheet.

    Exactly zero (up to rounding) at the record's energy; grows like the
    square root of the energy offset away from it, so it cleanly separates
    poles from non-poles.
    """
    momenta = sheet_momenta(p, energy, record)
    sign = -1.0 if record.condition == 1 else 1.0
    return abs(0.5 + sign * p.lam - 0.5j * (momenta.k + momenta.k_prime) + record.n)


@dataclass(frozen=True)
class PoleVerification:
    """Outcome of verify_pole: closed-form residual and |T22| decay scan."""

    record: PoleRecord
    condition_residual: float
    t22_at_pole: float
    deltas: tuple[float, ...]
    t22_magnitudes: tuple[float, ...]
    decay_ratios: tuple[float, ...]  # |T22(delta_i)| / |T22(delta_{i+1})|, ~10 for a simple zero
    passed: bool


def verify_pole(
    p: ModelParams,
    record: PoleRecord,
    deltas: tuple[float, ...] = (1e-3, 1e-4, 1e-5),
    residual_tol: float = 1e-10,
    ratio_rel_tol: float = 0.20,
) -> PoleVerification:
    """Check that a classified record is a simple zero of T22.

    The condition residual |1/2 -+ lam - (i/2)(k + k') + n| is evaluated with
    k = i nu, k' = i mu taken from the record (the parametrization in which
    both pole conditions are exact).  The scan evaluates |T22| at
    E_record + i delta on the record's sheet; for a simple zero the
    magnitude falls linearly in delta.
    """
    residual = condition_residual(p, record, record.energy)

    t_at = transfer_matrix_from_momenta(
        p.lam, Momenta(k=1j * record.nu, k_prime=1j * record.mu)
    )
    magnitudes = []
    for delta in deltas:
        momenta = sheet_momenta(p, record.energy + 1j * delta, record)
        magnitudes.append(abs(transfer_matrix_from_momenta(p.lam, momenta).t22))
    ratios = tuple(
        magnitudes[i] / magnitudes[i + 1] for i in range(len(deltas) - 1)
    )
    expected = tuple(deltas[i] / deltas[i + 1] for i in range(len(deltas) - 1))
    decay_ok = all(
        abs(r - e) <= ratio_rel_tol * e for r, e in zip(ratios, expected)
    )
    passed = residual < residual_tol and abs(t_at.t22) < 1e-6 and decay_ok
    return PoleVerification(
        record=record,
        condition_residual=residual,
        t22_at_pole=abs(t_at.t22),
        deltas=deltas,
        t22_magnitudes=tuple(magnitudes),
        decay_ratios=ratios,
        passed=passed,
    )


def flux_defect(p: ModelParams, energy: float) -> float:
    """Relative probability-current defect of the scattering solution.

    For real E > 2 beta, the solution with A- = 1, B+ = 0 must satisfy
    k (1 - |B-|^2) = k' |A+|^2.  Returns the defect normalized to the
    incoming flux k.
    """
    if energy <= 2 * p.beta:
        raise ValueError(f"flux check needs E > 2*beta, got E = {energy}")
    t = transfer_matrix(p, energy)
    momenta = momenta_from_energy(p, energy)
    k, kp = momenta.k.real, momenta.k_prime.real
    b_minus = -t.t21 / t.t22
    a_plus = t.det / t.t22
    return abs(k * (1.0 - abs(b_minus) ** 2) - kp * abs(a_plus) ** 2) / k


def fit_plane_wave_amplitudes(
    values: np.ndarray, xs: np.ndarray, k_side: complex
) -> tuple[complex, complex]:
    """Least-squares amplitudes (A, B) of values ~ A e^{ikx} + B e^{-ikx}."""
    design = np.column_stack(
        [np.exp(1j * k_side * xs), np.exp(-1j * k_side * xs)]
    )
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    return complex(coeffs[0]), complex(coeffs[1])


def extract_amplitudes(
    solution: GeneralSolution,
    x_center: float = 18.0,
    n_points: int = 64,
) -> tuple[complex, complex, complex, complex]:
    """(A-, B-, A+, B+) of a general solution by windowed plane-wave fits.

    Windows are centered at -+x_center and sized to cover at least one local
    wavelength while staying in the asymptotic region.
    """
    p = solution.params
    momenta = momenta_from_energy(p, solution.energy)
    out = []
    for side, k_side in ((-1.0, momenta.k), (+1.0, momenta.k_prime)):
        wavelength = 2.0 * math.pi / max(abs(k_side), 1e-6)
        half_width = min(max(3.0, 0.75 * wavelength), abs(x_center) - 10.0)
        xs = side * x_center + np.linspace(-half_width, half_width, n_points)
        values = np.array([solution.value(float(x)) for x in xs])
        out.extend(fit_plane_wave_amplitudes(values, xs, k_side))
    return tuple(out)


def numeric_transfer_matrix(p: ModelParams, energy: complex) -> TransferMatrix:
    """Transfer matrix fitted from the two exact solutions' amplitudes.

    Independent of the Gamma-ratio route; used to validate it.
    """
    columns_in = []
    columns_out = []
    for family in (SolutionFamily.PSI_GENERAL, SolutionFamily.PHI_GENERAL):
        a_minus, b_minus, a_plus, b_plus = extract_amplitudes(
            general_solution(p, energy, family)
        )
        columns_in.append([a_minus, b_minus])
        columns_out.append([a_plus, b_plus])
    m_in = np.array(columns_in, dtype=complex).T
    m_out = np.array(columns_out, dtype=complex).T
    t = m_out @ np.linalg.inv(m_in)
    return TransferMatrix(t11=t[0, 0], t12=t[0, 1], t21=t[1, 0], t22=t[1, 1])


def scan_t22_zeros_real_axis(
    p: ModelParams,
    e_min: float = -50.0,
    e_max: float = -1e-3,
    step: float = 1e-3,
) -> list[float]:
    """Zeros of T22 on the real energy segment, principal (physical) sheet.

    Below the lower branch point both momenta are positive imaginary and T22
    is real there, so sign changes locate zeros; between the branch points
    |T22| minima are tracked.  Candidates are refined by bisection (real
    part) or golden-section on |T22|.
    """
    energies = np.arange(e_min, e_max + step / 2, step)
    values = []
    for energy in energies:
        try:
            values.append(transfer_matrix(p, float(energy)).t22)
        except Exception:
            values.append(complex(math.nan))
    zeros: list[float] = []
    scale = np.nanmedian([abs(v) for v in values]) or 1.0
    branch = -2.0 * p.beta
    for i in range(len(energies) - 1):
        v0, v1 = values[i], values[i + 1]
        if any(map(lambda v: v != v, (v0, v1))):  # nan guard near branch points
            continue
        e0, e1 = float(energies[i]), float(energies[i + 1])
        if e1 <= branch and v0.real * v1.real < 0:
            zeros.append(_bisect_real_zero(p, e0, e1))
        elif e0 > branch:
            if abs(v0) < 1e-6 * scale:
                zeros.append(e0)
    return zeros


def _bisect_real_zero(p: ModelParams, e_lo: float, e_hi: float, iters: int = 60) -> float:
    f_lo = transfer_matrix(p, e_lo).t22.real
    for _ in range(iters):
        mid = 0.5 * (e_lo + e_hi)
        f_mid = transfer_matrix(p, mid).t22.real
        if f_lo * f_mid <= 0:
            e_hi = mid
        else:
            e_lo, f_lo = mid, f_mid
    return 0.5 * (e_lo + e_hi)


def min_t22_on_rectangle(
    p: ModelParams,
    re_range: tuple[float, float] = (0.1, 20.0),
    im_range: tuple[float, float] = (-5.0, -0.1),
    n_re: int = 150,
    n_im: int = 75,
) -> float:
    """Minimum |T22| over a complex-energy grid (resonance search)."""
    best = math.inf
    for re in np.linspace(*re_range, n_re):
        for im in np.linspace(*im_range, n_im):
            t22 = transfer_matrix(p, complex(re, im)).t22
            magnitude = abs(t22)
            if magnitude < best:
                best = magnitude
    return best
