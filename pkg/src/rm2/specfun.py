"""Complex special functions: log-Gamma, Gauss 2F1 on (0,1), Jacobi polynomials.

Self-contained kernels sized for this problem domain:

* ``log_gamma`` uses a Lanczos rational approximation (g=7, 9 terms) on the
  half plane Re z >= 1/2 and the sine reflection formula elsewhere.  Accuracy
  target is 1e-13 relative on |z| <= 50, which is the accuracy floor of every
  transfer-matrix entry downstream.
* ``hyp2f1`` evaluates the Gauss series for real argument z <= 1/2 and the
  two-term z -> 1-z connection for z > 1/2.  The only argument this package
  ever produces is z = (1 + tanh x)/2, so no other region is supported.
* ``jacobi_p`` uses the explicit terminating sum, valid for arbitrary real
  parameters (the three-term recurrence can lose its leading coefficient for
  negative non-integer parameter sums).
"""

from __future__ import annotations

import cmath
import math

from .config import tolerances
from .errors import (
    DegenerateConnection,
    DegenerateParameters,
    NoConvergence,
    OrderTooLarge,
    PoleOfGamma,
)

_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

# Lanczos coefficients, g = 607/128, 15 terms.  Relative error of the
# exponentiated result stays below ~6e-14 on |z| <= 50, which is the
# double-precision floor for |log Gamma| of this size.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C0 = 0.99999999999999709182
_LANCZOS_C = (
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def _near_nonpositive_integer(z: complex, eps: float) -> bool:
    if z.real > 0.5:
        return False
    m = round(z.real)
    return m <= 0 and abs(z - m) < eps


def _lanczos_log_gamma(z: complex) -> complex:
    """Principal log Gamma for Re z >= 1/2."""
    w = z - 1.0
    acc = _LANCZOS_C0
    for i, coeff in enumerate(_LANCZOS_C, start=1):
        acc += coeff / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _LOG_SQRT_TWO_PI + (w + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _expm1_complex(w: complex) -> complex:
    """exp(w) - 1 without cancellation for small |w|."""
    a, b = w.real, w.imag
    # exp(a+ib) - 1 = expm1(a) cos b - 2 sin^2(b/2) + i e^a sin b
    return complex(
        math.expm1(a) * math.cos(b) - 2.0 * math.sin(b / 2.0) ** 2,
        math.exp(a) * math.sin(b),
    )


def _log_sin_pi_upper(z: complex) -> complex:
    """log(sin(pi z)) for Im z >= 0, continuous, using sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}).

    The argument of the exponential is reduced with the period-1 symmetry of
    sin so the formula stays accurate near (negative) integers.
    """
    m = math.floor(z.real + 0.5)
    zr = z - m  # sin(pi z) = (-1)^m sin(pi zr)
    one_minus_e = -_expm1_complex(2j * math.pi * zr)
    out = math.log(0.5) + 0.5j * math.pi - 1j * math.pi * zr + cmath.log(one_minus_e)
    if m & 1:
        out += 1j * math.pi
    return out


def log_gamma(z: complex) -> complex:
    """Log of the Gamma function, principal branch on the cut plane.

    Raises ``PoleOfGamma`` when z is within ``gamma_pole_eps`` of a
    non-positive integer.  Imaginary parts obtained through the reflection
    half plane may differ from the principal sheet by a multiple of 2*pi*i;
    ``exp(log_gamma(z))`` is always Gamma(z).
    """
    z = complex(z)
    if _near_nonpositive_integer(z, tolerances().gamma_pole_eps):
        raise PoleOfGamma(f"Gamma pole at z = {z}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    if z.imag >= 0:
        return _LOG_PI - _log_sin_pi_upper(z) - _lanczos_log_gamma(1.0 - z)
    return log_gamma(z.conjugate()).conjugate()


def gamma(z: complex) -> complex:
    """Gamma(z) via ``exp(log_gamma(z))``; overflows for Re z beyond ~170."""
    return cmath.exp(log_gamma(z))


def _terminating_order(a: complex, eps: float) -> int | None:
    """Return n >= 0 when a is (within eps) the non-positive integer -n."""
    if abs(a.imag) > eps or a.real > eps:
        return None
    n = round(-a.real)
    if n >= 0 and abs(a - (-n)) < eps:
        return n
    return None


def _gauss_series(a: complex, b: complex, c: complex, z: float, n_terms: int | None = None) -> complex:
    """Power series sum of 2F1, optionally truncated after ``n_terms`` + 1 terms."""
    tol = tolerances()
    term = complex(1.0)
    total = complex(1.0)
    cap = tol.hyp_series_max_terms if n_terms is None else n_terms
    small_streak = 0
    for n in range(cap):
        term *= (a + n) * (b + n) / (c + n) * z / (n + 1)
        total += term
        if n_terms is None:
            if abs(term) <= tol.hyp_series_rtol * abs(total):
                small_streak += 1
                if small_streak >= 2 or term == 0:
                    return total
            else:
                small_streak = 0
    if n_terms is not None:
        return total
    raise NoConvergence(
        f"2F1 series hit the {tol.hyp_series_max_terms}-term cap at z = {z}"
    )


def _check_c(c: complex) -> None:
    if _near_nonpositive_integer(c, tolerances().gamma_pole_eps):
        raise DegenerateParameters(f"2F1 parameter c = {c} is a non-positive integer")


def _connection_pieces(a: complex, b: complex, c: complex, omz: float) -> list[tuple[complex, complex]]:
    """(log prefactor, 2F1 factor) pairs of the two-branch z -> 1-z connection.

    2F1(a,b;c;z) = C1 2F1(a,b;a+b+1-c;1-z) + C2 (1-z)^s 2F1(c-a,c-b;1+s;1-z)
    with s = c-a-b; a branch whose 1/Gamma hits a pole drops out.  Returning
    prefactors in log form lets callers combine branches whose magnitudes
    exceed any float (the pole psi families reach exp(900) and beyond).
    """
    tol = tolerances()
    s = c - a - b
    if abs(s - round(s.real)) < tol.hyp_degenerate_eps:
        raise DegenerateConnection(
            f"c-a-b = {s} is within {tol.hyp_degenerate_eps} of an integer"
        )
    log_gc = log_gamma(c)
    pieces = []
    try:
        log_coeff1 = log_gc + log_gamma(s) - log_gamma(c - a) - log_gamma(c - b)
        pieces.append((log_coeff1, _gauss_series(a, b, a + b + 1.0 - c, omz)))
    except PoleOfGamma:
        pass
    try:
        log_coeff2 = log_gc + log_gamma(-s) - log_gamma(a) - log_gamma(b) + s * math.log(omz)
        pieces.append((log_coeff2, _gauss_series(c - a, c - b, 1.0 + s, omz)))
    except PoleOfGamma:
        pass
    return pieces


def _scaled_value(pieces: list[tuple[complex, complex]]) -> tuple[float, complex]:
    """Combine log-prefactored pieces into (log_scale, scaled value)."""
    if not pieces:
        return 0.0, complex(0.0)
    top = max(log_coeff.real for log_coeff, _ in pieces)
    total = sum(cmath.exp(log_coeff - top) * factor for log_coeff, factor in pieces)
    return top, total


def _hyp2f1_scaled(a: complex, b: complex, c: complex, z: float, omz: float) -> tuple[float, complex]:
    """(log_scale, value) with value * exp(log_scale) = 2F1(a, b; c; z)."""
    tol = tolerances()
    _check_c(c)
    if z < 0.0 or omz <= 0.0:
        raise DegenerateParameters(f"2F1 argument z = {z} outside [0, 1)")
    if z == 0.0:
        return 0.0, complex(1.0)
    for first, second in ((a, b), (b, a)):
        n_term = _terminating_order(first, tol.hyp_terminating_eps)
        if n_term is not None:
            return 0.0, _gauss_series(complex(-n_term), second, c, z, n_terms=n_term)
    if z <= 0.5:
        return 0.0, _gauss_series(a, b, c, z)
    return _scaled_value(_connection_pieces(a, b, c, omz))


def hyp2f1(a: complex, b: complex, c: complex, z: float, one_minus_z: float | None = None) -> complex:
    """Gauss hypergeometric 2F1(a, b; c; z) for real z in [0, 1).

    Terminating parameter sets are summed exactly at any z; otherwise the
    power series is used for z <= 1/2 and the two-term z -> 1-z connection
    beyond.  Callers that know 1-z to better accuracy than ``1.0 - z`` (the
    asymptotic wavefunction evaluators do) should pass it as
    ``one_minus_z``.

    Raises ``DegenerateConnection`` when z > 1/2 and c-a-b is within
    ``hyp_degenerate_eps`` of an integer, and ``NoConvergence`` when the term
    cap is reached.
    """
    a, b, c = complex(a), complex(b), complex(c)
    omz = (1.0 - z) if one_minus_z is None else one_minus_z
    log_scale, value = _hyp2f1_scaled(a, b, c, z, omz)
    return value * math.exp(log_scale)


def hyp2f1_derivative(a: complex, b: complex, c: complex, z: float, one_minus_z: float | None = None) -> complex:
    """d/dz 2F1(a, b; c; z) = (a b / c) 2F1(a+1, b+1; c+1; z)."""
    a, b, c = complex(a), complex(b), complex(c)
    _check_c(c)
    return a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z, one_minus_z)


def hyp2f1_pair_scaled(
    a: complex, b: complex, c: complex, z: float, one_minus_z: float | None = None
) -> tuple[float, complex, complex]:
    """(log_scale, F, dF/dz) under one common scale.

    The pole psi families combine a tiny elementary prefactor with a 2F1
    factor of inverse magnitude; this entry point keeps both the value and
    the derivative representable by factoring one exponential out of each.
    """
    a, b, c = complex(a), complex(b), complex(c)
    _check_c(c)
    omz = (1.0 - z) if one_minus_z is None else one_minus_z
    log_f, value_f = _hyp2f1_scaled(a, b, c, z, omz)
    ratio = a * b / c
    if ratio == 0:
        return log_f, value_f, complex(0.0)
    log_d, value_d = _hyp2f1_scaled(a + 1.0, b + 1.0, c + 1.0, z, omz)
    log_d += cmath.log(ratio).real
    value_d *= cmath.exp(1j * cmath.log(ratio).imag)
    top = max(log_f, log_d)
    return top, value_f * math.exp(log_f - top), value_d * math.exp(log_d - top)


def _binom_product(top_offset: float, count: int) -> float:
    """binom(alpha + n, count) written as a product, valid for any real alpha.

    Computes prod_{j=1..count} (top_offset + j) / j.
    """
    out = 1.0
    for j in range(1, count + 1):
        out *= (top_offset + j) / j
    return out


def jacobi_p(n: int, alpha: float, beta: float, z: float) -> float:
    """Jacobi polynomial P_n^(alpha, beta)(z) for arbitrary real parameters.

    Explicit terminating sum; exact for polynomials and stable for n up to the
    documented bound (``jacobi_max_order``), beyond which ``OrderTooLarge``
    is raised.
    """
    if n < 0:
        raise ValueError(f"Jacobi order must be non-negative, got {n}")
    if n > tolerances().jacobi_max_order:
        raise OrderTooLarge(f"Jacobi order {n} exceeds stability bound")
    if n == 0:
        return 1.0
    zm = 0.5 * (z - 1.0)
    zp = 0.5 * (z + 1.0)
    total = 0.0
    for s in range(n + 1):
        # binom(n+alpha, n-s) * binom(n+beta, s) * zm^s * zp^(n-s)
        left = _binom_product(alpha + s, n - s)
        right = 1.0
        for j in range(s):
            right *= (n + beta - j) / (j + 1)
        total += left * right * zm**s * zp ** (n - s)
    return total


def jacobi_p_derivative(n: int, alpha: float, beta: float, z: float) -> float:
    """d/dz P_n^(alpha, beta)(z); zero for n = 0."""
    if n == 0:
        return 0.0
    return 0.5 * (n + alpha + beta + 1.0) * jacobi_p(n - 1, alpha + 1.0, beta + 1.0, z)
