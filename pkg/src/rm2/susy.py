"""SUSY transformation engine: factorization operators, partner potentials,
Wronskian chains and the anti-bound/ground-chain equivalence check.

Derivative bookkeeping
----------------------
Every seed is an exact eigenfunction, so all second and higher derivatives
inside Wronskians are eliminated through the seed's own equation
s'' = (V - E) s and its x-derivatives (Leibniz on (V - E) s).  A chain of
order l therefore needs nothing beyond each seed's (value, first derivative)
and the analytic derivatives of V, and the resulting determinants are exact
up to rounding.

Scaling
-------
Seed magnitudes differ by hundreds of orders of magnitude across the grid.
Each determinant column is evaluated in the seed's own log scale
(``PoleEigenfunction.scaled``); the common factor exp(sum of log scales)
cancels in every ratio this module forms, so the determinant arithmetic only
ever sees O(1) numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .analytic import PoleEigenfunction, pole_eigenfunction, pole_index_data
from .config import tolerances
from .errors import (
    ExponentSingularity,
    PreconditionFailed,
    SeedHasNode,
    WronskianZero,
)
from .model import ModelParams, one_minus_tanh, one_plus_tanh, potential
from .oracle import OracleConfig, OracleSpectrum, bound_states
from .spectrum import (
    NodelessType,
    PoleClass,
    bound_state_count,
    count_nodes,
    make_pole_record,
    nodeless_class,
)


def superpotential(p: ModelParams, x: float) -> float:
    """W(x) = beta/(lambda - 1/2) + (lambda - 1/2) tanh x, from the ground state."""
    half = p.lam - 0.5
    if half < tolerances().exponent_singularity_eps:
        raise ExponentSingularity(f"superpotential needs lambda > 1/2, got {p.lam}")
    return p.beta / half + half * math.tanh(x)


def superpotential_derivative(p: ModelParams, x: float) -> float:
    return (p.lam - 0.5) * one_minus_tanh(x) * one_plus_tanh(x)


def apply_b_minus(p: ModelParams, w, x: float):
    """(d/dx + W_lambda) w at x; annihilates the ground state of H_lambda."""
    value, deriv = w.value_and_derivative(x)
    return deriv + superpotential(p, x) * value


def apply_b_plus(p: ModelParams, w, x: float):
    """(-d/dx + W_lambda) w at x; maps eigenfunctions of H_(lambda-1) up."""
    value, deriv = w.value_and_derivative(x)
    return -deriv + superpotential(p, x) * value


def b_minus_with_derivative(p: ModelParams, w, x: float):
    """(B- w)(x) and its x-derivative, using w'' = (V - E) w."""
    value, deriv = w.value_and_derivative(x)
    w_second = (potential(p, x) - w.energy) * value
    b_val = deriv + superpotential(p, x) * value
    b_deriv = w_second + superpotential_derivative(p, x) * value + superpotential(p, x) * deriv
    return b_val, b_deriv


def intertwining_residual(p: ModelParams, w, x: float) -> float:
    """|B- H_lambda w - H_(lambda-1) B- w| for an eigenfunction w of H_lambda."""
    b_val, b_deriv = b_minus_with_derivative(p, w, x)
    # (B- w)'' from w''' = (V - E) w' + V' w
    value, deriv = w.value_and_derivative(x)
    v = potential(p, x)
    dv = _potential_derivatives(p, x, 1)[1]
    w_second = (v - w.energy) * value
    w_third = (v - w.energy) * deriv + dv * value
    b_second = (
        w_third
        + _superpotential_second(p, x) * value
        + 2.0 * superpotential_derivative(p, x) * deriv
        + superpotential(p, x) * w_second
    )
    lhs = w.energy * b_val
    rhs = -b_second + potential(p.shifted(-1.0), x) * b_val
    return abs(lhs - rhs)


def _superpotential_second(p: ModelParams, x: float) -> float:
    sech2 = one_minus_tanh(x) * one_plus_tanh(x)
    return -2.0 * (p.lam - 0.5) * sech2 * math.tanh(x)


def factorization_residual(p: ModelParams, f_triple, x: float) -> float:
    """|(B+ B- + E0) f - H_lambda f| for a smooth test triple (f, f', f'')."""
    f, fp, fpp = f_triple(x)
    w_val = superpotential(p, x)
    g = fp + w_val * f  # B- f
    g_deriv = fpp + superpotential_derivative(p, x) * f + w_val * fp
    b_plus_b_minus = -g_deriv + w_val * g
    e0 = pole_index_data(p, 1, 0).energy
    lhs = b_plus_b_minus + e0 * f
    rhs = -fpp + potential(p, x) * f
    return abs(lhs - rhs)


class SeedKind(enum.Enum):
    GROUND_STATE = "ground"
    BOUND_EXCITED = "bound"      # chain member; never a lone first-order seed
    REDUNDANT = "redundant"
    ANTI_BOUND = "antibound"


@dataclass(frozen=True)
class SeedSpec:
    kind: SeedKind
    condition: int
    n: int


@dataclass(frozen=True)
class SusyChain:
    base: ModelParams
    seeds: tuple[SeedSpec, ...]

    @property
    def order(self) -> int:
        return len(self.seeds)


def resolve_seed(p: ModelParams, seed: SeedSpec, check_nodeless: bool = True) -> PoleEigenfunction:
    """Validate a seed spec against the pole classification and return phi_(cond,n).

    ``check_nodeless`` applies to redundant/anti-bound seeds used alone in a
    first-order transform (chain members are instead covered by the chain's
    Wronskian check).
    """
    record = make_pole_record(p, seed.condition, seed.n)
    if seed.kind is SeedKind.GROUND_STATE:
        if seed.condition != 1 or seed.n != 0:
            raise PreconditionFailed("ground-state seed means condition 1, n = 0")
        if bound_state_count(p) == 0:
            raise PreconditionFailed(
                f"no bound state exists for lambda={p.lam}, beta={p.beta}"
            )
    elif seed.kind is SeedKind.BOUND_EXCITED:
        if record.pole_class is not PoleClass.BOUND:
            raise PreconditionFailed(
                f"(condition {seed.condition}, n={seed.n}) is {record.pole_class.value}, not bound"
            )
    elif seed.kind is SeedKind.REDUNDANT:
        if record.pole_class is not PoleClass.REDUNDANT:
            raise PreconditionFailed(
                f"(condition {seed.condition}, n={seed.n}) is {record.pole_class.value}, not redundant"
            )
    elif seed.kind is SeedKind.ANTI_BOUND:
        if record.pole_class is not PoleClass.ANTI_BOUND:
            raise PreconditionFailed(
                f"(condition {seed.condition}, n={seed.n}) is {record.pole_class.value}, not anti-bound"
            )
    wavefunction = pole_eigenfunction(p, seed.condition, "phi", seed.n)
    if check_nodeless and seed.kind in (SeedKind.REDUNDANT, SeedKind.ANTI_BOUND):
        quesne = nodeless_class(p, seed.n, condition=seed.condition)
        nodes = count_nodes(wavefunction)
        if quesne is NodelessType.NOT_NODELESS or nodes > 0:
            raise SeedHasNode(
                f"seed phi{{{seed.condition}}}_(lambda={p.lam}, n={seed.n}) is not nodeless "
                f"(class {quesne.value}, {nodes} node(s) counted)"
            )
    return wavefunction


@dataclass(frozen=True)
class PartnerPotential:
    """Evaluatable SUSY partner V - 2 (ln W)'' with its provenance chain."""

    provenance: SusyChain
    _seeds: tuple[PoleEigenfunction, ...]

    @property
    def base_params(self) -> ModelParams:
        return self.provenance.base

    @property
    def seed_energies(self) -> tuple[float, ...]:
        return tuple(s.energy for s in self._seeds)

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self._eval(float(x))
        return np.array([self._eval(float(xi)) for xi in np.asarray(x).ravel()]).reshape(np.shape(x))

    def _eval(self, x: float) -> float:
        base = potential(self.base_params, x)
        return base - 2.0 * _log_wronskian_second_derivative(
            self.base_params, self._seeds, x
        )

    def oracle_spectrum(self, cfg: OracleConfig | None = None) -> OracleSpectrum:
        return bound_states(self, self.base_params.beta, cfg)


def _potential_derivatives(p: ModelParams, x: float, m_max: int) -> list[float]:
    """[V, V', ..., V^(m_max)] at x via the tanh polynomial representation.

    V is a polynomial in u = tanh x and u' = 1 - u^2, so every derivative is
    again a polynomial in u.
    """
    w = p.well_coefficient
    poly = np.array([-w, 2.0 * p.beta, w])  # ascending coefficients in u
    chain = np.array([1.0, 0.0, -1.0])      # du/dx = 1 - u^2
    u = math.tanh(x)
    out = [float(np.polynomial.polynomial.polyval(u, poly))]
    for _ in range(m_max):
        poly = np.convolve(np.polynomial.polynomial.polyder(poly), chain)
        out.append(float(np.polynomial.polynomial.polyval(u, poly)))
    return out


def _derivative_rows(seed_scaled: tuple[float, float, float], v_derivs: list[float], energy: float, max_order: int) -> list[float]:
    """[t_0 .. t_max_order] with t_j = s^(j) exp(-log_scale), via the seed ODE."""
    _, t0, t1 = seed_scaled
    rows = [t0, t1]
    for j in range(2, max_order + 1):
        total = -energy * rows[j - 2]
        for m in range(j - 1):
            total += comb(j - 2, m) * v_derivs[m] * rows[j - 2 - m]
        rows.append(total)
    return rows


def _row_bump_sets(rows: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Row sets of d/dx det(rows); bumping into an existing row kills the term."""
    out = []
    present = set(rows)
    for i, r in enumerate(rows):
        if r + 1 not in present:
            out.append(rows[:i] + (r + 1,) + rows[i + 1 :])
    return out


def _determinant(columns: list[list[float]], rows: tuple[int, ...]) -> float:
    matrix = np.array([[col[r] for col in columns] for r in rows])
    return float(np.linalg.det(matrix))


def _hadamard_bound(columns: list[list[float]], rows: tuple[int, ...]) -> float:
    matrix = np.array([[col[r] for col in columns] for r in rows])
    norms = np.sqrt((matrix**2).sum(axis=0))
    return float(np.prod(np.where(norms > 0, norms, 1.0)))


def _scaled_columns(p: ModelParams, seeds, x: float, max_order: int) -> list[list[float]]:
    v_derivs = _potential_derivatives(p, x, max(max_order - 2, 0))
    return [
        _derivative_rows(seed.scaled(x), v_derivs, seed.energy, max_order)
        for seed in seeds
    ]


def _wronskian_scaled(p: ModelParams, seeds, x: float) -> float:
    """The seed Wronskian in the cancelling column scale (sign is meaningful)."""
    order = len(seeds)
    columns = _scaled_columns(p, seeds, x, max(order - 1, 1))
    return _determinant(columns, tuple(range(order)))


def _log_wronskian_second_derivative(p: ModelParams, seeds, x: float) -> float:
    """(ln W)''(x) for the seed set, scale factors cancelling exactly."""
    order = len(seeds)
    columns = _scaled_columns(p, seeds, x, order + 1)
    base_rows = tuple(range(order))
    d0 = _determinant(columns, base_rows)
    if abs(d0) < tolerances().wronskian_zero_rel * _hadamard_bound(columns, base_rows):
        raise WronskianZero(f"seed Wronskian vanishes near x = {x}", position=x)
    first_sets = _row_bump_sets(base_rows)
    d1 = sum(_determinant(columns, rows) for rows in first_sets)
    d2 = sum(
        _determinant(columns, rows2)
        for rows1 in first_sets
        for rows2 in _row_bump_sets(rows1)
    )
    return (d2 * d0 - d1 * d1) / (d0 * d0)


def partner_potential_first_order(p: ModelParams, seed: SeedSpec) -> PartnerPotential:
    """V - 2 (ln seed)'' for a single nodeless seed.

    Computed as V - 2 [(V - E) s^2 - s'^2] / s^2, i.e. with the curvature
    eliminated through the seed's own equation; no derivative beyond s' is
    ever formed.  Ground-state seeds reproduce V_(lambda-1) exactly (shape
    invariance); no energy shift is applied, partners keep the base's
    absolute energy scale.
    """
    wavefunction = resolve_seed(p, seed)
    if seed.kind is not SeedKind.GROUND_STATE and count_nodes(wavefunction) > 0:
        raise SeedHasNode(
            f"seed phi{{{seed.condition}}}_(lambda={p.lam}, n={seed.n}) changes sign"
        )
    chain = SusyChain(base=p, seeds=(seed,))
    return PartnerPotential(provenance=chain, _seeds=(wavefunction,))


def partner_potential_wronskian(
    chain: SusyChain, verification_grid: tuple[float, float, int] = (-12.0, 12.0, 481)
) -> PartnerPotential:
    """V - 2 (ln W(seeds))'' for an ordered seed chain.

    The seed Wronskian is checked for zeros on ``verification_grid`` up
    front (and again lazily at every evaluation); a vanishing Wronskian
    refuses the transform with the offending position.
    """
    if chain.order == 0:
        raise PreconditionFailed("empty seed chain")
    single_seed_check = chain.order == 1
    seeds = tuple(
        resolve_seed(chain.base, s, check_nodeless=single_seed_check) for s in chain.seeds
    )
    if single_seed_check and count_nodes(seeds[0]) > 0:
        raise SeedHasNode("first-order seed has a node")
    partner = PartnerPotential(provenance=chain, _seeds=seeds)
    # Sweep the (scaled) Wronskian: a sign change between samples is a zero
    # even when no sample lands close to it.
    previous = 0.0
    previous_x = None
    for x in np.linspace(*verification_grid):
        value = _wronskian_scaled(chain.base, seeds, float(x))
        if value == 0.0 or (previous != 0.0 and (value > 0) != (previous > 0)):
            midpoint = float(x) if previous_x is None else 0.5 * (previous_x + float(x))
            raise WronskianZero(
                f"seed Wronskian changes sign near x = {midpoint}", position=midpoint
            )
        previous, previous_x = value, float(x)
        partner._eval(float(x))  # magnitude guard at the sample itself
    return partner


class TransformedState:
    """W(seeds + w) / W(seeds), the image of w under the chain's transform."""

    def __init__(self, chain: SusyChain, w, check_nodeless: bool = False):
        self.chain = chain
        self._seeds = tuple(
            resolve_seed(chain.base, s, check_nodeless=check_nodeless) for s in chain.seeds
        )
        self._w = w
        self.energy = w.energy

    def scaled(self, x: float) -> tuple[float, float, float]:
        p = self.chain.base
        order = len(self._seeds)
        columns = _scaled_columns(p, self._seeds + (self._w,), x, order)
        den_rows = tuple(range(order))
        num_rows = tuple(range(order + 1))
        den = _determinant(columns[:-1], den_rows)
        if abs(den) < tolerances().wronskian_zero_rel * _hadamard_bound(columns[:-1], den_rows):
            raise WronskianZero(f"seed Wronskian vanishes near x = {x}", position=x)
        num = _determinant(columns, num_rows)
        log_scale = self._w.scaled(x)[0]
        return log_scale, num / den, 0.0

    def value(self, x: float) -> float:
        log_scale, v, _ = self.scaled(x)
        return v * math.exp(log_scale)

    def __call__(self, x: float) -> float:
        return self.value(x)


def transform_state_wronskian(chain: SusyChain, w, x: float) -> float:
    """Value at x of the chain-transformed state W(seeds + w)/W(seeds)."""
    return TransformedState(chain, w).value(x)


class ReciprocalState:
    """1/seed: the bound state a nodeless divergent seed creates in its partner."""

    def __init__(self, seed: PoleEigenfunction):
        self._seed = seed
        self.energy = seed.energy

    def scaled(self, x: float) -> tuple[float, float, float]:
        log_scale, v, dv = self._seed.scaled(x)
        return -log_scale, 1.0 / v, -dv / (v * v)

    def value_and_derivative(self, x: float) -> tuple[float, float]:
        log_scale, v, dv = self.scaled(x)
        scale = math.exp(log_scale)
        return scale * v, scale * dv

    def value(self, x: float) -> float:
        return self.value_and_derivative(x)[0]

    def __call__(self, x: float) -> float:
        return self.value(x)


@dataclass(frozen=True)
class EquivalenceReport:
    """Comparison of the two routes to the same two-bound-state Hamiltonian."""

    alpha: float
    beta: float
    order: int
    grid: tuple[float, float, int]
    max_potential_diff: float
    spectrum_anti_bound_route: tuple[float, ...]
    spectrum_ground_chain_route: tuple[float, ...]
    expected_energies: tuple[float, float]
    max_energy_diff: float
    passed: bool


def verify_equivalence(
    alpha: float,
    beta: float,
    order: int,
    grid: tuple[float, float, int] = (-10.0, 10.0, 401),
    potential_tol: float = 1e-7,
    energy_tol: float = 1e-4,
) -> EquivalenceReport:
    """Check that the first-order anti-bound transform of H_alpha equals the
    (N-1)-order bound-chain transform of H_(alpha+N), N = ``order``.

    Route one seeds with phi{2}_(alpha, N-1); route two deletes levels
    n = 1..N-1 of H_(alpha+N).  Both partners must agree pointwise on the
    grid and share the oracle spectrum {E{1}_(alpha+N,0), E{1}_(alpha,0)}.
    Raises ``PreconditionFailed`` for even N (the seed has a node), N < 3,
    or alpha outside (1/2 + sqrt(beta), 3/2 + sqrt(beta)).
    """
    root = math.sqrt(beta)
    if not 0.5 + root < alpha < 1.5 + root:
        raise PreconditionFailed(
            f"alpha must lie in (1/2 + sqrt(beta), 3/2 + sqrt(beta)) = "
            f"({0.5 + root}, {1.5 + root}), got {alpha}"
        )
    if order < 3 or order % 2 == 0:
        p_low = ModelParams(alpha, beta)
        diag = ""
        if order >= 2 and order % 2 == 0:
            nodes = count_nodes(pole_eigenfunction(p_low, 2, "phi", order - 1))
            diag = (
                f"; seed phi{{2}}_(alpha, {order - 1}) is not nodeless "
                f"({nodes} node(s): odd Jacobi order)"
            )
        raise PreconditionFailed(f"order N must be odd and >= 3, got {order}{diag}")

    p_low = ModelParams(alpha, beta)
    p_high = ModelParams(alpha + order, beta)

    anti_seed = SeedSpec(SeedKind.ANTI_BOUND, condition=2, n=order - 1)
    partner_one = partner_potential_first_order(p_low, anti_seed)

    chain = SusyChain(
        base=p_high,
        seeds=tuple(SeedSpec(SeedKind.BOUND_EXCITED, 1, n) for n in range(1, order)),
    )
    partner_two = partner_potential_wronskian(chain)

    xs = np.linspace(*grid)
    diffs = [abs(partner_one(float(x)) - partner_two(float(x))) for x in xs]
    max_diff = max(diffs)

    spectrum_one = partner_one.oracle_spectrum()
    spectrum_two = partner_two.oracle_spectrum()
    expected = (
        pole_index_data(p_high, 1, 0).energy,
        pole_index_data(p_low, 1, 0).energy,
    )
    energy_diff = _spectrum_distance(spectrum_one.energies, spectrum_two.energies, expected)
    passed = max_diff < potential_tol and energy_diff < energy_tol
    return EquivalenceReport(
        alpha=alpha,
        beta=beta,
        order=order,
        grid=grid,
        max_potential_diff=max_diff,
        spectrum_anti_bound_route=spectrum_one.energies,
        spectrum_ground_chain_route=spectrum_two.energies,
        expected_energies=expected,
        max_energy_diff=energy_diff,
        passed=passed,
    )


def _spectrum_distance(
    energies_one: tuple[float, ...],
    energies_two: tuple[float, ...],
    expected: tuple[float, ...],
) -> float:
    if len(energies_one) != len(expected) or len(energies_two) != len(expected):
        return math.inf
    ref = sorted(expected)
    return max(
        max(abs(a - b) for a, b in zip(sorted(energies_one), ref)),
        max(abs(a - b) for a, b in zip(sorted(energies_two), ref)),
    )
