"""Independent reference values for the two models.

* ``z_exact``: the integral by tanh-sinh quadrature, cross-checked against
  its convergent small-mass series when ``m^2 < 1``.
* ``z_hat_exact``: the exact transformed integral, ``gamma(1/4, x^2) / 2``.
* ``aho_ground_energy``: lowest even-parity eigenvalue of
  ``p^2/2 + m^2 q^2/2 + q^4`` in a harmonic-oscillator basis, located by
  bisection on the inertia (Sturm count) of the banded matrix ``H - E``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .precision import (
    ConvergenceError,
    DomainError,
    Real,
    gamma,
    lower_incomplete_gamma,
    to_mpf,
)

E0_EXACT_LITERAL = "0.667986259155777108270962"
Z0_EXACT_LITERAL = "1.812804954110954"


class Method(enum.Enum):
    QUADRATURE = "quadrature"
    SERIES = "series"
    EIGEN = "eigen"
    CLOSED_FORM = "closed_form"
    PINNED = "pinned"


@dataclass(frozen=True)
class OracleResult:
    value: mpf
    method: Method
    error_estimate: mpf


class OracleError(ConvergenceError):
    def __init__(self, message: str, achieved: Optional[mpf] = None):
        super().__init__(message)
        self.achieved = achieved


# --------------------------------------------------------------------------
# Non-Gaussian integral
# --------------------------------------------------------------------------

def z_series(m2: Real, tol: Optional[Real] = None) -> OracleResult:
    """Z(m) = 1/2 sum_n Gamma(n/2 + 1/4) (-m^2)^n / n!  (converges for all m^2).

    Alternating with growing cancellation for large ``m^2``; intended for
    ``m^2 < 1``.
    """
    m2 = to_mpf(m2)
    tol = mpf(10) ** (5 - mp.dps) if tol is None else to_mpf(tol)
    with mp.extradps(10):
        total = mpf(0)
        power = mpf(1)
        n = 0
        while True:
            term = gamma(mpf(n) / 2 + mpf(1) / 4) * power / 2
            total += term
            if n > 4 and abs(term) < tol * abs(total) / 10:
                break
            n += 1
            if n > 100_000:
                raise OracleError("small-mass series did not converge", abs(term))
            power = power * (-m2) / n
    return OracleResult(+total, Method.SERIES, abs(term))


def _cutoff(dps: int) -> mpf:
    # exp(-Q^4) below 10^-(dps+5)
    return mpmath.root((dps + 5) * mpmath.log(10), 4)


def z_exact(m2: Real, tol: Optional[Real] = None) -> OracleResult:
    """int_{-inf}^{inf} exp(-m^2 q^2 - q^4) dq by quadrature on [0, Q], doubled."""
    m2 = to_mpf(m2)
    if m2 < 0:
        raise DomainError("z_exact needs m^2 >= 0")
    tol = mpf(10) ** (5 - mp.dps) if tol is None else to_mpf(tol)
    Q = _cutoff(mp.dps)
    breaks = [mpf(0)]
    if m2 > 1:
        width = 1 / mpmath.sqrt(m2)
        breaks += [w * width for w in (1, 2, 4, 8) if w * width < 1]
    breaks += [mpf(1), mpf(2), Q]
    with mp.extradps(10):
        f = lambda q: mpmath.exp(-m2 * q * q - q ** 4)
        value, err = mpmath.quad(f, breaks, error=True)
        value *= 2
        err = 2 * err + 2 * mpmath.exp(-Q ** 4)
    if err > tol * abs(value):
        raise OracleError(f"quadrature error {mpmath.nstr(err, 3)} above tolerance", err)
    result = OracleResult(+value, Method.QUADRATURE, +err)
    if m2 < 1:
        check = z_series(m2, tol)
        if abs(check.value - result.value) > 10 * tol * abs(result.value):
            raise OracleError("quadrature and small-mass series disagree",
                              abs(check.value - result.value))
    return result


def z_hat_exact(x: Real) -> OracleResult:
    """Exact transformed integral 2 int_0^sqrt(x) exp(-q^4) dq = gamma(1/4, x^2) / 2."""
    x = to_mpf(x)
    if x <= 0:
        raise DomainError("z_hat_exact needs x > 0")
    value = lower_incomplete_gamma(Fraction(1, 4), x * x) / 2
    return OracleResult(value, Method.CLOSED_FORM, abs(value) * mpf(10) ** (5 - mp.dps))


# --------------------------------------------------------------------------
# Anharmonic oscillator
# --------------------------------------------------------------------------

def basis_frequency(m2: mpf) -> mpf:
    """max(1, 3**(1/3), m): keeps the basis well conditioned for m^2 in [0, 1000]."""
    w = max(mpf(1), mpmath.cbrt(3))
    if m2 > 0:
        w = max(w, mpmath.sqrt(m2))
    return w


def _x2(i: int, j: int) -> mpf:
    # <i|(a + a^dag)^2|j>
    if i == j:
        return mpf(2 * i + 1)
    if j == i + 2:
        return mpmath.sqrt(mpf((i + 1) * (i + 2)))
    if j == i - 2:
        return _x2(j, i)
    return mpf(0)


def _x4(i: int, j: int) -> mpf:
    return mpmath.fsum(_x2(i, k) * _x2(k, j) for k in (i - 2, i, i + 2) if k >= 0)


def hamiltonian_band(m2: mpf, w: mpf, size: int) -> tuple[list[mpf], list[mpf], list[mpf]]:
    """Even-parity block of H in the oscillator basis of frequency ``w``.

    Returns the diagonal and the first two super-diagonals of the
    pentadiagonal matrix on states |0>, |2>, ..., |2 size - 2>.
    """
    # q = (a + a^dag) / sqrt(2w): H = w (n + 1/2) + (m^2 - w^2)/2 q^2 + q^4
    c2 = (m2 - w * w) / (4 * w)
    c4 = 1 / (4 * w * w)
    diag, off1, off2 = [], [], []
    for a in range(size):
        i = 2 * a
        diag.append(w * (i + mpf(1) / 2) + c2 * _x2(i, i) + c4 * _x4(i, i))
        off1.append(c2 * _x2(i, i + 2) + c4 * _x4(i, i + 2))
        off2.append(c4 * _x4(i, i + 4))
    return diag, off1, off2


def count_below(diag: list[mpf], off1: list[mpf], off2: list[mpf], shift: mpf) -> int:
    """Number of eigenvalues below ``shift``: negative pivots of LDL^T of H - shift."""
    n = len(diag)
    d = [mpf(0)] * n
    l1 = [mpf(0)] * n  # l1[i] = L[i+1, i]
    negative = 0
    tiny = mpf(2) ** (-2 * mp.prec)
    for i in range(n):
        piv = diag[i] - shift
        l2 = mpf(0)
        if i >= 2:
            l2 = off2[i - 2] / d[i - 2]
            piv -= l2 * l2 * d[i - 2]
        if i >= 1:
            b = off1[i - 1]
            if i >= 2:
                b -= l2 * d[i - 2] * l1[i - 2]
            l1[i - 1] = b / d[i - 1]
            piv -= l1[i - 1] * l1[i - 1] * d[i - 1]
        if piv == 0:
            piv = tiny
        d[i] = piv
        if piv < 0:
            negative += 1
    return negative


def _lowest_eigenvalue(m2: mpf, size: int, tol: mpf) -> mpf:
    w = basis_frequency(m2)
    diag, off1, off2 = hamiltonian_band(m2, w, size)
    # Gershgorin bounds
    lo = min(
        diag[i] - abs(off1[i]) - abs(off2[i])
        - (abs(off1[i - 1]) if i >= 1 else 0) - (abs(off2[i - 2]) if i >= 2 else 0)
        for i in range(size)
    )
    hi = diag[0] + 1
    while count_below(diag, off1, off2, hi) < 1:
        hi = 2 * hi + 1
    while hi - lo > tol * max(abs(hi), 1):
        mid = (lo + hi) / 2
        if count_below(diag, off1, off2, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def aho_ground_energy(
    m2: Real, digits: int = 20, *, start_size: int = 32, max_size: int = 4096
) -> OracleResult:
    """Ground-state energy of p^2/2 + m^2 q^2/2 + q^4 to ``digits`` digits.

    The basis is doubled until two successive sizes agree to ``digits``;
    the last change is reported as the error estimate.
    """
    if digits > mp.dps - 10:
        raise ValueError(f"{digits} digits needs a working precision of at least {digits + 10}")
    m2 = to_mpf(m2)
    tol = mpf(10) ** (-digits - 3)
    target = mpf(10) ** (-digits - 1)
    with mp.workdps(digits + 20):
        size = start_size
        prev = _lowest_eigenvalue(m2, size, tol)
        while True:
            size *= 2
            if size > max_size:
                raise OracleError(
                    f"eigenvalue not stable to {digits} digits at basis size {max_size}"
                )
            cur = _lowest_eigenvalue(m2, size, tol)
            change = abs(cur - prev)
            if change <= target * abs(cur):
                break
            prev = cur
    return OracleResult(+cur, Method.EIGEN, +change + tol * abs(cur))


def pinned_constants() -> dict[str, mpf]:
    """E(0) of the pure quartic oscillator and Z(0) = Gamma(1/4)/2."""
    return {
        "E0_EXACT": mpf(E0_EXACT_LITERAL),
        "Z0_EXACT": gamma(Fraction(1, 4)) / 2,
    }


def aho_strong_coupling(
    K: int = 4, *, digits: int = 28, radius: Real = "0.02", nodes: int = 13
) -> list[OracleResult]:
    """Taylor coefficients of E(m^2) at m^2 = 0, up to (m^2)^K.

    The eigen oracle is sampled at Chebyshev nodes on ``[-radius, radius]``
    and the interpolating polynomial is solved for exactly.  E(m^2) is
    analytic well beyond the interval, so the interpolation error is set by
    the last fitted coefficient, which is reported as the error estimate.
    """
    if not 1 <= K < nodes - 2:
        raise ValueError("need 1 <= K < nodes - 2")
    r = to_mpf(radius)
    with mp.workdps(digits + 15):
        ts = [mpmath.cos(mpmath.pi * (2 * j + 1) / (2 * nodes)) for j in range(nodes)]
        ys = [aho_ground_energy(r * t, digits=digits).value for t in ts]
        vander = mpmath.matrix([[t ** k for k in range(nodes)] for t in ts])
        c = mpmath.lu_solve(vander, mpmath.matrix(ys))
        tail = abs(c[nodes - 1]) + mpf(10) ** (-digits)
        out = [
            OracleResult(+(c[k] / r ** k), Method.EIGEN, +(tail / r ** k))
            for k in range(K + 1)
        ]
    return out
