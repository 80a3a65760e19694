"""Real Gamma function, signed log-Gamma, Gamma ratios and binomial coefficients.

Only double precision is supported.  Arguments within ``POLE_TOL`` of a
nonpositive integer are treated as poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PoleError

#: Distance to a nonpositive integer below which an argument counts as a pole.
POLE_TOL = 1e-9


def pole_index(x: float, tol: float = POLE_TOL) -> int | None:
    """Return ``m`` if ``x`` is within ``tol`` of the pole at ``-m``, else ``None``."""
    if x > tol:
        return None
    r = round(x)
    if r <= 0 and abs(x - r) <= tol:
        return -int(r)
    return None


def is_pole(x: float, tol: float = POLE_TOL) -> bool:
    return pole_index(x, tol) is not None


def _sin_pi(x: float) -> float:
    # sin(pi*x) with exact argument reduction, so accuracy does not degrade
    # with |x|
    n = round(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def gamma(x: float) -> float:
    """Gamma function for real ``x``.

    Uses the reflection formula ``Γ(x) = π / (sin(πx) Γ(1-x))`` for
    ``x < 0.5``.

    Raises
    ------
    PoleError
        If ``x`` is a nonpositive integer (within ``POLE_TOL``).
    """
    x = float(x)
    if is_pole(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        return math.pi / (_sin_pi(x) * math.gamma(1.0 - x))
    return math.gamma(x)


def gamma_sign(x: float) -> int:
    """Sign of Γ(x) for a non-pole real ``x``."""
    if x > 0:
        return 1
    return -1 if math.floor(x) % 2 else 1


def lgamma_signed(x: float) -> tuple[float, int]:
    """Return ``(log|Γ(x)|, sign Γ(x))``."""
    x = float(x)
    if is_pole(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    return math.lgamma(x), gamma_sign(x)


@dataclass(frozen=True)
class GammaRatio:
    """The value Γ(numerator_arg) / Γ(denominator_arg).

    ``is_zero`` is set when the denominator sits on a pole while the
    numerator does not, in which case ``value`` is exactly 0.
    """

    numerator_arg: float
    denominator_arg: float
    value: float
    is_zero: bool = False

    def __float__(self) -> float:
        return self.value


def gamma_ratio(num_arg: float, den_arg: float) -> GammaRatio:
    """Γ(num_arg) / Γ(den_arg) via log-Gamma differences with sign tracking.

    When both arguments are poles the ratio is the limit of
    ``Γ(-m+ε)/Γ(-n+ε)`` as ``ε → 0``, i.e. ``(-1)^(m-n) n!/m!``.  This is the
    value the classical integer-order power rule needs (``Γ(b+1)/Γ(b) = b``).
    """
    num_arg = float(num_arg)
    den_arg = float(den_arg)
    m = pole_index(num_arg)
    n = pole_index(den_arg)
    if m is not None and n is None:
        raise PoleError(f"Gamma ratio has a pole in the numerator at {num_arg!r}")
    if n is not None:
        if m is None:
            return GammaRatio(num_arg, den_arg, 0.0, True)
        sign = -1.0 if (m - n) % 2 else 1.0
        value = sign * math.exp(math.lgamma(n + 1) - math.lgamma(m + 1))
        return GammaRatio(num_arg, den_arg, value)
    if num_arg == den_arg:
        return GammaRatio(num_arg, den_arg, 1.0)
    ln, sn = lgamma_signed(num_arg)
    ld, sd = lgamma_signed(den_arg)
    return GammaRatio(num_arg, den_arg, sn * sd * math.exp(ln - ld))


def binomial_paper(alpha: float, n: int) -> float:
    """Generalized binomial coefficient in Gamma form.

    ``(-1)^(n-1) α Γ(n-α) / (Γ(1-α) Γ(n+1))`` for ``n >= 1``; 1 for ``n = 0``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    sign = -1.0 if (n - 1) % 2 else 1.0
    ratio = gamma_ratio(n - alpha, 1.0 - alpha)
    return sign * alpha * ratio.value / math.factorial(n)


def binomial_product(alpha: float, n: int) -> float:
    """Generalized binomial coefficient as a falling factorial over ``n!``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0
    for k in range(n):
        out *= (alpha - k) / (k + 1)
    return out


def binomial(alpha: float, n: int) -> float:
    """Binomial coefficient, using the Gamma form unless it hits a pole."""
    try:
        return binomial_paper(alpha, n)
    except PoleError:
        return binomial_product(alpha, n)
