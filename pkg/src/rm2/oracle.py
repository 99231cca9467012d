"""Independent bound-state solver: Numerov shooting with two-sided matching.

This module never touches the analytic machinery; it validates it.  Any
evaluatable 1D potential with step asymptotics V(-inf) = -2*beta,
V(+inf) = +2*beta can be solved.  Integration runs from both box edges with
locally matched decaying starts, meets at the center, and eigenvalues are
located by bisection on the sign of the (scale-invariant) Wronskian mismatch
of the two half-solutions.

The box is widened automatically for states close to the lower continuum
threshold -2*beta: their left tails decay like exp(-sqrt(-2*beta - E) |x|)
and the default half width would truncate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .config import tolerances
from .errors import NoBracketSignChange, PreconditionFailed, StiffIntegration


@dataclass(frozen=True)
class OracleConfig:
    half_width: float | None = None
    points: int | None = None
    bracket: tuple[float, float] | None = None
    bisect_tol: float | None = None
    scan_points: int | None = None

    def resolved(self) -> "OracleConfig":
        tol = tolerances()
        return OracleConfig(
            half_width=self.half_width if self.half_width is not None else tol.oracle_half_width,
            points=self.points if self.points is not None else tol.oracle_points,
            bracket=self.bracket,
            bisect_tol=self.bisect_tol if self.bisect_tol is not None else tol.oracle_bisect_tol,
            scan_points=self.scan_points if self.scan_points is not None else tol.oracle_scan_points,
        )


@dataclass(frozen=True)
class OracleSpectrum:
    energies: tuple[float, ...]
    node_counts: tuple[int, ...]


@dataclass(frozen=True)
class Divergent:
    """Marker result of integrate_norm: the tail carries the integral."""

    tail_fraction: float


@njit(cache=True)
def _numerov_forward(f, h, start_growth):
    """Integrate y'' = f(x) y left to right with y0 = 1, y1 = start_growth.

    The whole prefix is rescaled when values grow past 1e250, keeping one
    consistent (arbitrary) scale across the returned array.
    """
    n = f.shape[0]
    y = np.empty(n)
    y[0] = 1.0
    y[1] = start_growth
    c = h * h / 12.0
    for j in range(1, n - 1):
        y[j + 1] = (
            2.0 * y[j] * (1.0 + 5.0 * c * f[j]) - y[j - 1] * (1.0 - c * f[j - 1])
        ) / (1.0 - c * f[j + 1])
        mag = abs(y[j + 1])
        if mag > 1e250:
            for i in range(j + 2):
                y[i] /= mag
    return y


def _five_point_derivative(y: np.ndarray, idx: int, h: float) -> float:
    return (y[idx - 2] - 8.0 * y[idx - 1] + 8.0 * y[idx + 1] - y[idx + 2]) / (12.0 * h)


class _Shooter:
    """Grid-bound machinery shared by the scan and the bisection."""

    def __init__(self, v_grid: np.ndarray, h: float, beta: float):
        self.v = v_grid
        self.h = h
        self.beta = beta
        self.n = v_grid.shape[0]
        self.match = self.n // 2

    def halves(self, energy: float) -> tuple[np.ndarray, np.ndarray]:
        v, h, m = self.v, self.h, self.match
        kappa_left = math.sqrt(max(self.v[0] - energy, 1e-30))
        kappa_right = math.sqrt(max(self.v[-1] - energy, 1e-30))
        f = v - energy
        y_left = _numerov_forward(f[: m + 3], h, math.exp(kappa_left * h))
        y_right_rev = _numerov_forward(f[m - 2 :][::-1].copy(), h, math.exp(kappa_right * h))
        return y_left, y_right_rev[::-1]

    def mismatch(self, energy: float) -> float:
        """Scale-invariant Wronskian mismatch of the two halves at the center."""
        y_left, y_right = self.halves(energy)
        m = self.match
        dl = _five_point_derivative(y_left, m, self.h)
        dr = _five_point_derivative(y_right, 2, self.h)  # y_right starts at index m-2
        wl, wr = y_left[m], y_right[2]
        numerator = dl * wr - dr * wl
        scale = abs(dl * wr) + abs(dr * wl) + 1e-300
        return numerator / scale

    def assemble(self, energy: float) -> np.ndarray:
        """Full eigenfunction candidate, right half rescaled to match at the center."""
        y_left, y_right = self.halves(energy)
        m = self.match
        out = np.empty(self.n)
        out[: m + 1] = y_left[: m + 1]
        anchor = y_right[2]
        ratio = y_left[m] / anchor if anchor != 0.0 else 1.0
        out[m:] = ratio * y_right[2:]
        return out


def _count_sign_changes(values: np.ndarray) -> int:
    nonzero = values[values != 0.0]
    if nonzero.size < 2:
        return 0
    return int(np.sum(np.signbit(nonzero[1:]) != np.signbit(nonzero[:-1])))


def _bisect(shooter: _Shooter, e_lo: float, e_hi: float, f_lo: float, tol: float) -> float:
    for _ in range(120):
        mid = 0.5 * (e_lo + e_hi)
        if e_hi - e_lo < tol:
            return mid
        f_mid = shooter.mismatch(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            e_lo, f_lo = mid, f_mid
        else:
            e_hi = mid
    return 0.5 * (e_lo + e_hi)


def _potential_grid(potential, xs: np.ndarray) -> np.ndarray:
    try:
        v = np.asarray(potential(xs), dtype=float)
        if v.shape == xs.shape:
            return v
    except Exception:
        pass
    return np.array([potential(float(x)) for x in xs], dtype=float)


def _build_shooter(potential, beta: float, half_width: float, points: int) -> _Shooter:
    if points % 2 == 0:
        points += 1
    xs = np.linspace(-half_width, half_width, points)
    v = _potential_grid(potential, xs)
    if not np.all(np.isfinite(v)):
        raise PreconditionFailed("potential is not finite on the oracle grid")
    edge_defect = max(abs(v[0] + 2.0 * beta), abs(v[-1] - 2.0 * beta))
    if edge_defect > 1e-10:
        raise PreconditionFailed(
            f"box too small: |V(+-L) - (+-2 beta)| = {edge_defect:.2e} > 1e-10"
        )
    return _Shooter(v, xs[1] - xs[0], beta)


def bound_states(potential, beta: float, cfg: OracleConfig | None = None) -> OracleSpectrum:
    """All bound eigenvalues of -y'' + V y = E y below the threshold -2*beta.

    ``potential`` is any callable of x (scalar or ndarray).  States are found
    by scanning the matching mismatch over the bracket, bisecting each sign
    change, then validated by node counts (state i must have i nodes); a
    missing index triggers one denser rescan of the gap.
    """
    cfg = (cfg or OracleConfig()).resolved()
    tol = tolerances()
    shooter = _build_shooter(potential, beta, cfg.half_width, cfg.points)

    stiffness = (shooter.h**2 / 12.0) * 2.0 * float(np.max(np.abs(shooter.v)))
    if stiffness > 0.05:
        shooter = _build_shooter(potential, beta, cfg.half_width, 2 * shooter.n - 1)
        if (shooter.h**2 / 12.0) * 2.0 * float(np.max(np.abs(shooter.v))) > 0.05:
            raise StiffIntegration("Numerov step too large even after one refinement")

    v_min = float(np.min(shooter.v))
    threshold = -2.0 * beta
    if cfg.bracket is not None:
        e_lo, e_hi = cfg.bracket
        explicit_bracket = True
    else:
        e_lo = v_min + 1e-10 * (1.0 + abs(v_min))
        e_hi = threshold - 1e-9 * (1.0 + abs(threshold))
        explicit_bracket = False
    if e_hi <= e_lo:
        return OracleSpectrum((), ())

    energies = _scan_and_bisect(shooter, e_lo, e_hi, cfg.scan_points, cfg.bisect_tol)
    if explicit_bracket and not energies:
        raise NoBracketSignChange(f"no mismatch sign change in [{e_lo}, {e_hi}]")

    # Threshold states: widen the box until kappa_left * L is comfortable.
    refined = []
    for energy in energies:
        kappa = math.sqrt(max(threshold - energy, 1e-30))
        if kappa * cfg.half_width < tol.oracle_min_kappa_l:
            refined.append(
                _refine_wide_box(potential, beta, cfg, energy, kappa)
            )
        else:
            refined.append(energy)
    energies = sorted(refined)

    node_counts = [
        _count_sign_changes(shooter.assemble(energy)) for energy in energies
    ]
    if node_counts != list(range(len(energies))):
        energies, node_counts = _rescan_gaps(
            shooter, e_lo, e_hi, energies, cfg
        )
    return OracleSpectrum(tuple(energies), tuple(node_counts))


def _scan_and_bisect(shooter: _Shooter, e_lo: float, e_hi: float, scan_points: int, bisect_tol: float) -> list[float]:
    grid = np.linspace(e_lo, e_hi, scan_points)
    values = [shooter.mismatch(float(e)) for e in grid]
    found = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            found.append(float(grid[i]))
        elif (values[i] > 0) != (values[i + 1] > 0):
            found.append(
                _bisect(shooter, float(grid[i]), float(grid[i + 1]), values[i], bisect_tol)
            )
    return found


def _refine_wide_box(potential, beta: float, cfg: OracleConfig, energy: float, kappa: float) -> float:
    """Re-locate a near-threshold eigenvalue on a box wide enough for its tail."""
    tol = tolerances()
    half_width = min(
        1.25 * tol.oracle_min_kappa_l / max(kappa, 1e-6), tol.oracle_max_half_width
    )
    if half_width <= cfg.half_width:
        return energy
    h_target = 2.0 * cfg.half_width / (cfg.points - 1)
    points = int(2 * round(half_width / h_target) + 1)
    shooter = _build_shooter(potential, beta, half_width, points)
    # Tail truncation on the original box can shift the estimate by a share
    # of its distance to the threshold, so scan that whole scale.
    threshold = -2.0 * beta
    window = max(0.5 * (threshold - energy), 1e-8)
    hi = min(energy + window, threshold - 1e-10 * (1.0 + abs(threshold)))
    local = _scan_and_bisect(shooter, energy - window, hi, 120, cfg.bisect_tol)
    return min(local, key=lambda e: abs(e - energy)) if local else energy


def _rescan_gaps(shooter, e_lo, e_hi, energies, cfg) -> tuple[list[float], list[int]]:
    """One denser rescan when node counts show a missed eigenvalue."""
    edges = [e_lo] + list(energies) + [e_hi]
    found = list(energies)
    for left, right in zip(edges[:-1], edges[1:]):
        pad = 1e-7 * (1 + abs(left) + abs(right))
        found.extend(
            _scan_and_bisect(shooter, left + pad, right - pad, 400, cfg.bisect_tol)
        )
    uniq: list[float] = []
    for energy in sorted(found):
        if not uniq or abs(energy - uniq[-1]) > 10 * cfg.bisect_tol:
            uniq.append(energy)
    counts = [_count_sign_changes(shooter.assemble(e)) for e in uniq]
    return uniq, counts


def integrate_norm(wavefunction, cfg: OracleConfig | None = None):
    """Trapezoidal integral of w(x)^2 over the box, or ``Divergent``.

    Works in log magnitude throughout, so anti-bound seeds whose squares
    overflow any float are still classified correctly.  Divergence is
    declared when the outer ``divergence_tail_window`` share of the box on
    either side contributes more than ``divergence_tail_frac`` of the total.
    """
    cfg = (cfg or OracleConfig()).resolved()
    tol = tolerances()
    xs = np.linspace(-cfg.half_width, cfg.half_width, cfg.points)
    scaled = getattr(wavefunction, "scaled", None)
    log_terms = np.empty(cfg.points)
    for i, x in enumerate(xs):
        if scaled is not None:
            log_scale, v, _ = scaled(float(x))
            log_terms[i] = 2.0 * log_scale + (math.log(v * v) if v != 0.0 else -math.inf)
        else:
            v = wavefunction(float(x))
            log_terms[i] = math.log(v * v) if v != 0.0 else -math.inf
    weights = np.full(cfg.points, 1.0)
    weights[0] = weights[-1] = 0.5
    top = float(np.max(log_terms))
    if top == -math.inf:
        return 0.0
    terms = np.exp(log_terms - top) * weights
    total = float(np.sum(terms))
    tail_mask = np.abs(xs) >= (1.0 - tol.divergence_tail_window) * cfg.half_width
    tail_fraction = float(np.sum(terms[tail_mask])) / total
    if tail_fraction > tol.divergence_tail_frac:
        return Divergent(tail_fraction=tail_fraction)
    h = xs[1] - xs[0]
    return math.exp(top) * total * h
