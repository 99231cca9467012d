"""Numeric tolerances used across the package.

Every cutoff that the modules rely on lives here as a named field with its
documented default.  The active set can be replaced programmatically with
:func:`set_tolerances` or, for the CLI, from a key=value override file named
by the ``RM2_TOL_OVERRIDES`` environment variable.
"""

from __future__ import annotations

import dataclasses
import os


@dataclasses.dataclass(frozen=True)
class Tolerances:
    # specfun
    gamma_pole_eps: float = 1e-14          # distance to a non-positive integer counting as a pole
    hyp_series_rtol: float = 1e-16         # term/sum stopping ratio for the 2F1 power series
    hyp_series_max_terms: int = 10_000
    hyp_degenerate_eps: float = 1e-10      # |c-a-b - nearest integer| below which the connection is refused
    hyp_terminating_eps: float = 1e-14     # a (or b) this close to a non-positive integer terminates the series
    jacobi_max_order: int = 50

    # model
    branch_point_eps: float = 1e-12        # |E -+ 2*beta| below which momenta are refused

    # analytic / spectrum
    exponent_singularity_eps: float = 1e-10  # |lambda_eff - 1/2 - n| counting as singular
    boundary_pole_eps: float = 1e-12         # |mu| or |nu| below which a record is a boundary case

    # scattering
    t22_pole_eps: float = 1e-13            # |T22| below which the S-matrix is "at a pole"
    pole_match_distance: float = 1e-6      # energy distance used to attach a record to an AtPole error

    # susy
    wronskian_zero_rel: float = 1e-12      # |det| below this times the Hadamard bound means a zero

    # oracle
    oracle_half_width: float = 25.0
    oracle_points: int = 8001
    oracle_bisect_tol: float = 1e-9
    oracle_scan_points: int = 600
    oracle_min_kappa_l: float = 12.0       # required (decay rate) * (box half width) for threshold states
    oracle_max_half_width: float = 400.0
    divergence_tail_frac: float = 0.01     # tail share of integral above which a norm counts as divergent
    divergence_tail_window: float = 0.2    # tail region is |x| in [(1-window)*L, L]

    # node counting
    node_grid_min_span: float = 15.0
    node_grid_min_points: int = 4000
    underflow_log: float = -650.0          # log magnitude treated as numerically unrepresentable
    underflow_max_frac: float = 0.10


_ACTIVE = Tolerances()


def tolerances() -> Tolerances:
    """Return the active tolerance set."""
    return _ACTIVE


def set_tolerances(tol: Tolerances) -> None:
    global _ACTIVE
    _ACTIVE = tol


def load_overrides(path: str, base: Tolerances | None = None) -> Tolerances:
    """Parse a key=value override file and return the merged tolerance set.

    Blank lines and lines starting with ``#`` are ignored.  Unknown keys raise
    ``KeyError`` so typos do not pass silently.
    """
    base = base if base is not None else tolerances()
    fields = {f.name: f for f in dataclasses.fields(Tolerances)}
    updates: dict[str, float | int] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in fields:
                raise KeyError(f"unknown tolerance key: {key!r}")
            caster = fields[key].type
            updates[key] = int(value) if caster is int or fields[key].default.__class__ is int else float(value)
    return dataclasses.replace(base, **updates)


def apply_env_overrides() -> Tolerances:
    """Apply ``RM2_TOL_OVERRIDES`` (if set) to the active tolerances."""
    path = os.environ.get("RM2_TOL_OVERRIDES")
    if path:
        set_tolerances(load_overrides(path))
    return tolerances()
