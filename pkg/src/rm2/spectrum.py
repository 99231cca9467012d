"""Enumeration and classification of S-matrix poles, nodeless-seed classes.

Pole classes follow the sign pattern of the imaginary momenta (mu, nu):
bound (both positive), redundant (opposite signs), anti-bound (both
negative).  The equivalent index-range form uses n against
lambda - 1/2 -+ sqrt(beta); both classifiers are implemented and checked
against each other in the test suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .analytic import PoleIndexData, pole_index_data
from .config import tolerances
from .errors import ExponentSingularity, PreconditionFailed, ValueUnderflow
from .model import ModelParams


class PoleClass(enum.Enum):
    BOUND = "bound"
    REDUNDANT = "redundant"
    ANTI_BOUND = "anti-bound"


@dataclass(frozen=True)
class PoleRecord:
    """One S-matrix pole: condition tag, index, energy, momenta, class."""

    condition: int
    n: int
    energy: float
    mu: float
    nu: float
    pole_class: PoleClass
    boundary_case: bool = False  # mu or nu numerically zero; tie resolved as redundant


@dataclass(frozen=True)
class PoleEnumeration:
    """Result of a pole sweep: classified records plus per-index problems."""

    records: tuple[PoleRecord, ...]
    singular: tuple[tuple[int, int, str], ...] = ()  # (condition, n, message)
    notes: tuple[str, ...] = ()

    def by_class(self, pole_class: PoleClass, condition: int | None = None) -> list[PoleRecord]:
        return [
            r
            for r in self.records
            if r.pole_class is pole_class and (condition is None or r.condition == condition)
        ]


def classify_from_mu_nu(mu: float, nu: float) -> tuple[PoleClass, bool]:
    """Sign-rule classification; boundary ties (mu or nu ~ 0) count as redundant."""
    eps = tolerances().boundary_pole_eps
    if abs(mu) < eps or abs(nu) < eps:
        return PoleClass.REDUNDANT, True
    if mu > 0 and nu > 0:
        return PoleClass.BOUND, False
    if mu < 0 and nu < 0:
        return PoleClass.ANTI_BOUND, False
    return PoleClass.REDUNDANT, False


def classify_from_ranges(p: ModelParams, condition: int, n: int) -> PoleClass:
    """Range-rule classification: n against lambda_eff - 1/2 -+ sqrt(beta)."""
    lam_eff = p.lam if condition == 1 else -p.lam
    root = math.sqrt(p.beta)
    lower = lam_eff - 0.5 - root
    upper = lam_eff - 0.5 + root
    if n < lower:
        return PoleClass.BOUND if condition == 1 else PoleClass.ANTI_BOUND
    if n > upper:
        return PoleClass.ANTI_BOUND
    return PoleClass.REDUNDANT


def make_pole_record(p: ModelParams, condition: int, n: int) -> PoleRecord:
    data: PoleIndexData = pole_index_data(p, condition, n)
    pole_class, boundary = classify_from_mu_nu(data.mu, data.nu)
    return PoleRecord(
        condition=condition,
        n=n,
        energy=data.energy,
        mu=data.mu,
        nu=data.nu,
        pole_class=pole_class,
        boundary_case=boundary,
    )


_REDUNDANT_COUNT_NOTE = (
    "known discrepancy: for lambda=5.4, beta=1 the mu/nu sign rules give 2 "
    "redundant Condition-1 poles (n=4, n=5), while the originating analysis "
    "of this example quotes three redundant states; counts reported here "
    "follow the sign rules"
)


def enumerate_poles(p: ModelParams, n_cap: int = 20) -> PoleEnumeration:
    """All pole records for n = 0..n_cap under both conditions.

    Indices whose exponent denominator vanishes are reported in ``singular``
    and skipped; enumeration continues.  ``notes`` carries surfaced known
    discrepancies for specific parameter sets.
    """
    if n_cap < 0:
        raise PreconditionFailed(f"n_cap must be non-negative, got {n_cap}")
    records: list[PoleRecord] = []
    singular: list[tuple[int, int, str]] = []
    for condition in (1, 2):
        for n in range(n_cap + 1):
            try:
                records.append(make_pole_record(p, condition, n))
            except ExponentSingularity as exc:
                singular.append((condition, n, str(exc)))
    notes: list[str] = []
    if abs(p.lam - 5.4) < 1e-9 and abs(p.beta - 1.0) < 1e-9:
        notes.append(_REDUNDANT_COUNT_NOTE)
    return PoleEnumeration(records=tuple(records), singular=tuple(singular), notes=tuple(notes))


def classify_poles(p: ModelParams, n_cap: int = 20) -> list[PoleRecord]:
    return list(enumerate_poles(p, n_cap).records)


def bound_state_count(p: ModelParams) -> int:
    """floor(lambda - 1/2 - sqrt(beta)) + 1 when positive, else 0."""
    edge = p.lam - 0.5 - math.sqrt(p.beta)
    return int(math.floor(edge)) + 1 if edge > 0 else 0


def bound_energies(p: ModelParams) -> list[float]:
    return [pole_index_data(p, 1, n).energy for n in range(bound_state_count(p))]


class NodelessType(enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"
    NOT_NODELESS = "none"


def _matches_type_i(p: ModelParams, m: int) -> bool:
    half = p.lam - 0.5
    return half > m and half * (half - m) < p.beta < half * half


def _matches_type_ii(p: ModelParams, m: int) -> bool:
    half = p.lam - 0.5
    return m / 2.0 < half < m and -half * (half - m) < p.beta < half * half


def _matches_type_iii(p: ModelParams, m: int) -> bool:
    half = p.lam - 0.5
    return m % 2 == 0 and p.lam > 0.5 - math.sqrt(p.beta) and 0.0 < p.beta < half * half


def nodeless_matches(p: ModelParams, m: int) -> set[NodelessType]:
    """All nodeless classes whose inequalities hold for (lambda, beta, m)."""
    out = set()
    if _matches_type_i(p, m):
        out.add(NodelessType.TYPE_I)
    if _matches_type_ii(p, m):
        out.add(NodelessType.TYPE_II)
    if _matches_type_iii(p, m):
        out.add(NodelessType.TYPE_III)
    return out


def nodeless_class(p: ModelParams, m: int, condition: int | None = None) -> NodelessType:
    """Nodeless classification of the order-m pole solution.

    Types I and II describe Condition-1 solutions phi{1}_(lambda,m); type III
    describes the Condition-2 solution phi{2}_(lambda,m).  With ``condition``
    given, only the classes belonging to that family are considered.  Without
    it, overlaps are resolved in the order I, III, II: I and II are mutually
    exclusive, and an even-m solution that qualifies for both a Condition-1
    class and type III reports the family the classification is about
    (I beats III for redundant-range orders, III beats II otherwise).
    """
    if m < 0:
        raise PreconditionFailed(f"m must be non-negative, got {m}")
    matches = nodeless_matches(p, m)
    if condition == 1:
        order = (NodelessType.TYPE_I, NodelessType.TYPE_II)
    elif condition == 2:
        order = (NodelessType.TYPE_III,)
    else:
        order = (NodelessType.TYPE_I, NodelessType.TYPE_III, NodelessType.TYPE_II)
    for candidate in order:
        if candidate in matches:
            return candidate
    return NodelessType.NOT_NODELESS


def seed_condition_for(nodeless_type: NodelessType) -> int:
    """Which pole family a nodeless class refers to: 1 for I/II, 2 for III."""
    if nodeless_type in (NodelessType.TYPE_I, NodelessType.TYPE_II):
        return 1
    if nodeless_type is NodelessType.TYPE_III:
        return 2
    raise ValueError("NOT_NODELESS has no associated seed family")


def count_nodes(wavefunction, grid: tuple[float, float, int] = (-15.0, 15.0, 4001)) -> int:
    """Strict sign changes of the wavefunction over a uniform grid.

    Objects exposing ``scaled(x)`` are counted on the scaled value (the
    positive exponential factor cannot change sign, so this is exact and
    underflow-free).  Plain callables are evaluated directly; if more than
    ``underflow_max_frac`` of the samples underflow, the grid is shrunk and
    retried, and ``ValueUnderflow`` raised if that never helps.
    """
    tol = tolerances()
    x_min, x_max, points = grid
    if x_max - x_min < 2 * tol.node_grid_min_span - 1e-12 or points < tol.node_grid_min_points:
        raise PreconditionFailed(
            f"node grid must span at least [-{tol.node_grid_min_span}, {tol.node_grid_min_span}] "
            f"with >= {tol.node_grid_min_points} points"
        )

    scaled = getattr(wavefunction, "scaled", None)
    for _ in range(4):
        step = (x_max - x_min) / (points - 1)
        values = []
        underflow = 0
        for i in range(points):
            x = x_min + i * step
            if scaled is not None:
                _, v, _ = scaled(x)
            else:
                v = wavefunction(x)
                if v != 0.0 and abs(v) < math.exp(tol.underflow_log):
                    underflow += 1
            values.append(v)
        if scaled is None and underflow > tol.underflow_max_frac * points:
            x_min *= 0.8
            x_max *= 0.8
            continue
        crossings = 0
        prev = 0.0
        for v in values:
            if v == 0.0:
                continue
            if prev != 0.0 and (v > 0) != (prev > 0):
                crossings += 1
            prev = v
        return crossings
    raise ValueUnderflow("wavefunction magnitude below representable range on every tried grid")
