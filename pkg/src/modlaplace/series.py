"""Perturbative mass expansions of the two model problems.

Both models are written with the quartic coupling fixed to one:

* ``NONGAUSSIAN``: Z(m) = int dq exp(-m^2 q^2 - q^4)
  = sum_n (-1)^n Gamma(2n + 1/2) / n! * m^-(4n+1)
* ``ANHARMONIC``: ground-state energy of p^2/2 + m^2 q^2/2 + q^4,
  E(m) = sum_n A_n m^(1-3n)

A series is stored in the variable ``sigma = m**beta``; term ``n`` is
``coeff * sigma**exponent`` with an exact rational exponent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import gmpy2
import mpmath
from mpmath import mp, mpf

from .precision import Real, as_rational, gamma, require_precision, to_mpf

Coefficient = Union[Fraction, mpf]
PathLike = Union[str, Path]


class Model(enum.Enum):
    NONGAUSSIAN = "nongaussian"
    ANHARMONIC = "anharmonic"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value: Union[str, "Model"]) -> "Model":
        if isinstance(value, Model):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown model {value!r}") from None


@dataclass(frozen=True)
class PowerTerm:
    """``coeff * sigma**exponent``."""

    coeff: Coefficient
    exponent: Fraction

    def value(self, sigma: mpf) -> mpf:
        return to_mpf(self.coeff) * mpmath.power(sigma, to_mpf(self.exponent))


@dataclass(frozen=True)
class PerturbationSeries:
    """Truncated expansion sum_n a_n sigma**xi_n in sigma = m**beta."""

    terms: tuple[PowerTerm, ...]
    model: Model
    order: int
    beta: Fraction = Fraction(2)

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.model is not Model.CUSTOM and len(self.terms) != self.order + 1:
            raise ValueError("a built-in series carries exactly order + 1 terms")

    @classmethod
    def custom(
        cls,
        terms: Iterable[tuple[Real, Union[int, str, Fraction]]],
        beta: Union[int, str, Fraction] = 1,
    ) -> "PerturbationSeries":
        """Series from ``(coeff, exponent)`` pairs, e.g. ``[(1, -1), (2, Fraction(-5, 2))]``."""
        built = []
        for coeff, exponent in terms:
            if not isinstance(coeff, (Fraction, mpf)):
                coeff = Fraction(coeff) if isinstance(coeff, int) else to_mpf(coeff)
            built.append(PowerTerm(coeff, as_rational(exponent)))
        return cls(tuple(built), Model.CUSTOM, max(len(built) - 1, 0), as_rational(beta))

    def __add__(self, other: "PerturbationSeries") -> "PerturbationSeries":
        if self.beta != other.beta:
            raise ValueError("cannot add series in different variables")
        terms = self.terms + other.terms
        return PerturbationSeries(terms, Model.CUSTOM, max(len(terms) - 1, 0), self.beta)

    def evaluate(self, sigma: Real) -> mpf:
        """Value of the truncated sum at ``sigma`` (> 0)."""
        s = to_mpf(sigma)
        if s <= 0:
            raise ValueError("series are evaluated at sigma > 0")
        return mpmath.fsum(t.value(s) for t in self.terms)

    def evaluate_at_mass(self, m: Real) -> mpf:
        """Value at mass ``m``, i.e. at ``sigma = m**beta``."""
        return self.evaluate(mpmath.power(to_mpf(m), to_mpf(self.beta)))

    __call__ = evaluate


# --------------------------------------------------------------------------
# Anharmonic oscillator: exact Rayleigh-Schroedinger coefficients
# --------------------------------------------------------------------------

# psi = exp(-q^2/2) * sum_n g^n phi_n(q),  phi_n = sum_k C[n][k] q^(2k),  C[n][0] = delta_n0.
# Order g^n of  -phi''/2 + q phi' + q^4 phi = (E - 1/2) phi  gives, for k >= 1,
#   2k C[n][k] = (k+1)(2k+1) C[n][k+1] - C[n-1][k-2] + sum_{j=1}^{n-1} E_j C[n-j][k]
# (solved downward from k = 2n) and E_n = -C[n][1].
_bw_rows: list[list] = [[gmpy2.mpq(1)]]
_bw_energies: list = [gmpy2.mpq(1, 2)]


def _extend_bender_wu(order: int, progress: Optional[Callable[[int, int], None]] = None) -> None:
    rows, energies = _bw_rows, _bw_energies
    for n in range(len(energies), order + 1):
        if progress is not None:
            progress(n, order)
        top = 2 * n
        row = [gmpy2.mpq(0)] * (top + 2)
        prev = rows[n - 1]
        for k in range(top, 0, -1):
            acc = (k + 1) * (2 * k + 1) * row[k + 1]
            if 0 <= k - 2 < len(prev):
                acc -= prev[k - 2]
            # C[n-j][k] vanishes unless k <= 2(n-j)
            for j in range(1, n - (k + 1) // 2 + 1):
                acc += energies[j] * rows[n - j][k]
            row[k] = acc / (2 * k)
        energies.append(-row[1])
        row[0] = gmpy2.mpq(0)
        del row[top + 1:]
        rows.append(row)


def _read_cached(path: Path, order: int) -> Optional[list[Fraction]]:
    if not path.exists():
        return None
    values = cache_read(path)
    return values[: order + 1] if len(values) > order else None


def anharmonic_coefficients(
    order: int,
    cache: Optional[PathLike] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list[Fraction]:
    """Exact A_0..A_order of E = m sum_n A_n (lambda/m^3)^n.

    The recursion is incremental, so results for a lower order are a prefix
    of those for a higher one.  With ``cache`` set, coefficients are read
    from that file when it holds enough of them and written back otherwise.
    ``progress(n, order)`` is called before each newly generated order.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if cache is not None:
        cached = _read_cached(Path(cache), order)
        if cached is not None:
            return cached
    _extend_bender_wu(order, progress)
    values = [Fraction(int(a.numerator), int(a.denominator)) for a in _bw_energies[: order + 1]]
    if cache is not None:
        cache_write(cache, values)
    return values


# --------------------------------------------------------------------------
# Non-Gaussian integral
# --------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _nongaussian(order: int, dps: int) -> tuple[mpf, ...]:
    out = []
    for n in range(order + 1):
        out.append((-1) ** n * gamma(Fraction(4 * n + 1, 2)) / mpmath.factorial(n))
    return tuple(out)


def nongaussian_coefficients(order: int) -> list[mpf]:
    """a_n = (-1)^n Gamma(2n + 1/2) / n!  for n = 0..order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return list(_nongaussian(order, mp.dps))


def build_series(
    model: Union[str, Model],
    order: int,
    beta: Union[int, str, float, Fraction] = 2,
    cache: Optional[PathLike] = None,
) -> PerturbationSeries:
    """The order-``order`` truncation of a built-in model in ``sigma = m**beta``.

    Exponents are xi_n = -(4n+1)/beta (integral) or -(3n-1)/beta (oscillator),
    so the value at ``sigma = m**beta`` does not depend on ``beta``.
    """
    model = Model.parse(model)
    beta = as_rational(beta)
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    require_precision(order)
    if model is Model.NONGAUSSIAN:
        coeffs: Sequence[Coefficient] = nongaussian_coefficients(order)
        exps = [-Fraction(4 * n + 1) / beta for n in range(order + 1)]
    elif model is Model.ANHARMONIC:
        coeffs = anharmonic_coefficients(order, cache)
        exps = [-Fraction(3 * n - 1) / beta for n in range(order + 1)]
    else:
        raise ValueError("build_series only knows the built-in models")
    terms = tuple(PowerTerm(c, x) for c, x in zip(coeffs, exps))
    return PerturbationSeries(terms, model, order, beta)


# --------------------------------------------------------------------------
# Coefficient cache: one "n numerator/denominator" line per coefficient
# --------------------------------------------------------------------------

class CacheFormatError(ValueError):
    def __init__(self, path: PathLike, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: cannot parse coefficient line {line!r}")
        self.path = str(path)
        self.lineno = lineno
        self.line = line


def cache_write(path: PathLike, coefficients: Sequence[Fraction]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for n, c in enumerate(coefficients):
        c = Fraction(c)
        lines.append(f"{n} {c.numerator}/{c.denominator}\n")
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
    tmp.replace(path)
    return path


def cache_read(path: PathLike) -> list[Fraction]:
    values: list[Fraction] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            parts = line.split()
            try:
                if len(parts) != 2 or int(parts[0]) != len(values):
                    raise ValueError
                num, _, den = parts[1].partition("/")
                value = Fraction(int(num), int(den) if den else 1)
            except (ValueError, ZeroDivisionError):
                raise CacheFormatError(path, lineno, line) from None
            values.append(value)
    return values
