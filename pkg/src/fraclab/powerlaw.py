"""Exact algebra over finite sums of monomials ``c * x^a * t^b``.

The algebra is closed under addition, multiplication, integer powers,
``d/dx``, ``d/dt`` and the fractional power rules (Caputo, Riemann-Liouville
and the fractional integral), so it serves as the ground-truth oracle for the
numerical and symmetry code.

Exponents are floats; two monomials are like terms when both exponents agree
to within ``EXP_TOL``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import (
    DivergentError,
    DomainError,
    NegativeBaseError,
    ParseError,
    StrictModeError,
)
from .special import gamma_ratio

#: Absolute tolerance under which two exponents are considered equal.
EXP_TOL = 1e-12

STRICT = "strict"
EXTENDED = "extended"
MODES = (STRICT, EXTENDED)


@dataclass(frozen=True)
class Monomial:
    """The expression ``coeff * x**x_exp * t**t_exp``."""

    coeff: float
    x_exp: float = 0.0
    t_exp: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_exp) and math.isfinite(self.t_exp)):
            raise DomainError("monomial exponents must be finite")

    def __call__(self, x, t):
        return self.coeff * np.power(x, self.x_exp) * np.power(t, self.t_exp)

    def same_powers(self, other: "Monomial") -> bool:
        return (
            abs(self.x_exp - other.x_exp) <= EXP_TOL
            and abs(self.t_exp - other.t_exp) <= EXP_TOL
        )

    def scaled(self, factor: float) -> "Monomial":
        return Monomial(self.coeff * factor, self.x_exp, self.t_exp)

    def __str__(self) -> str:
        return _render_term(self)


def _normalize(terms: Iterable[Monomial]) -> tuple[Monomial, ...]:
    merged: list[Monomial] = []
    for m in terms:
        for i, other in enumerate(merged):
            if other.same_powers(m):
                merged[i] = Monomial(other.coeff + m.coeff, other.x_exp, other.t_exp)
                break
        else:
            merged.append(m)
    kept = [m for m in merged if m.coeff != 0.0]
    kept.sort(key=lambda m: (m.x_exp, m.t_exp))
    return tuple(kept)


class PowerSum:
    """A normalized finite sum of monomials; the empty sum is zero."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial] = ()) -> None:
        if isinstance(terms, Monomial):
            terms = (terms,)
        self.terms: tuple[Monomial, ...] = _normalize(terms)

    @classmethod
    def const(cls, c: float) -> "PowerSum":
        return cls((Monomial(float(c)),))

    @classmethod
    def parse(cls, text: str) -> "PowerSum":
        return parse(text)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "PowerSum":
        return add(self, as_powersum(other))

    __radd__ = __add__

    def __neg__(self) -> "PowerSum":
        return PowerSum(m.scaled(-1.0) for m in self.terms)

    def __sub__(self, other) -> "PowerSum":
        return add(self, -as_powersum(other))

    def __rsub__(self, other) -> "PowerSum":
        return add(as_powersum(other), -self)

    def __mul__(self, other) -> "PowerSum":
        return mul(self, as_powersum(other))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PowerSum":
        return pow_int(self, k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PowerSum, Monomial, int, float)):
            return NotImplemented
        return self.terms == as_powersum(other).terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- inspection -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(m.coeff) for m in self.terms), default=0.0)

    def coeff_of(self, x_exp: float = 0.0, t_exp: float = 0.0) -> float:
        probe = Monomial(1.0, x_exp, t_exp)
        for m in self.terms:
            if m.same_powers(probe):
                return m.coeff
        return 0.0

    def t_constant_part(self) -> "PowerSum":
        """The terms with ``t_exp == 0``, i.e. the value of the sum at t = 0
        for sums whose other terms vanish there."""
        return PowerSum(m for m in self.terms if abs(m.t_exp) <= EXP_TOL)

    def __call__(self, x, t):
        total = 0.0
        for m in self.terms:
            total = total + m(x, t)
        return total

    def allclose(self, other, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        """Termwise comparison; terms missing on one side count as zero."""
        diff = self - as_powersum(other)
        scale = max(self.max_abs_coeff(), as_powersum(other).max_abs_coeff())
        return diff.max_abs_coeff() <= atol + rtol * scale

    def __repr__(self) -> str:
        return f"PowerSum({str(self)!r})"

    def __str__(self) -> str:
        return render(self)


PowerSumLike = Union[PowerSum, Monomial, int, float]


def as_powersum(obj: PowerSumLike) -> PowerSum:
    if isinstance(obj, PowerSum):
        return obj
    if isinstance(obj, Monomial):
        return PowerSum((obj,))
    if isinstance(obj, (int, float, np.floating, np.integer)):
        return PowerSum.const(float(obj))
    raise TypeError(f"cannot interpret {type(obj).__name__} as a PowerSum")


def as_monomial(obj: PowerSumLike) -> Monomial:
    if isinstance(obj, Monomial):
        return obj
    s = as_powersum(obj)
    if len(s.terms) == 0:
        return Monomial(0.0)
    if len(s.terms) != 1:
        raise DomainError("expected a single monomial")
    return s.terms[0]


X = PowerSum((Monomial(1.0, 1.0, 0.0),))
T = PowerSum((Monomial(1.0, 0.0, 1.0),))
ONE = PowerSum.const(1.0)
ZERO = PowerSum()


# -- ring operations -------------------------------------------------------
def add(a: PowerSumLike, b: PowerSumLike) -> PowerSum:
    return PowerSum(as_powersum(a).terms + as_powersum(b).terms)


def mul(a: PowerSumLike, b: PowerSumLike) -> PowerSum:
    a, b = as_powersum(a), as_powersum(b)
    return PowerSum(
        Monomial(p.coeff * q.coeff, p.x_exp + q.x_exp, p.t_exp + q.t_exp)
        for p in a.terms
        for q in b.terms
    )


def pow_real(m: PowerSumLike, r: float) -> Monomial:
    """Real power of a single monomial: ``(c x^a t^b)^r = c^r x^(ar) t^(br)``."""
    m = as_monomial(m)
    r = float(r)
    if r == 0.0:
        return Monomial(1.0)
    integral = r > 0 and r == int(r)
    if m.coeff <= 0.0 and not integral:
        raise NegativeBaseError(
            f"real power {r} of a monomial with coefficient {m.coeff} is undefined"
        )
    return Monomial(m.coeff**r, m.x_exp * r, m.t_exp * r)


def pow_int(s: PowerSumLike, k: int) -> PowerSum:
    if k < 0 or int(k) != k:
        raise DomainError("pow_int needs a nonnegative integer exponent")
    s = as_powersum(s)
    out = ONE
    for _ in range(int(k)):
        out = mul(out, s)
    return out


# -- classical derivatives -------------------------------------------------
def d_dx(s: PowerSumLike) -> PowerSum:
    return PowerSum(
        Monomial(m.coeff * m.x_exp, m.x_exp - 1.0, m.t_exp)
        for m in as_powersum(s).terms
        if abs(m.x_exp) > EXP_TOL
    )


def d_dt(s: PowerSumLike) -> PowerSum:
    return PowerSum(
        Monomial(m.coeff * m.t_exp, m.x_exp, m.t_exp - 1.0)
        for m in as_powersum(s).terms
        if abs(m.t_exp) > EXP_TOL
    )


# -- fractional power rules ------------------------------------------------
def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"fractional order must satisfy 0 < alpha <= 1, got {alpha}")
    return alpha


def _power_rule(m: Monomial, shift: float) -> Monomial | None:
    """``t^b -> Γ(b+1)/Γ(b+1-shift) t^(b-shift)``; ``None`` if the ratio is 0."""
    b = m.t_exp
    if b <= -1.0 + EXP_TOL:
        raise DivergentError(f"t^{b} is not integrable at t = 0")
    ratio = gamma_ratio(b + 1.0, b + 1.0 - shift)
    if ratio.is_zero:
        return None
    return Monomial(m.coeff * ratio.value, m.x_exp, b - shift)


def caputo_dt(s: PowerSumLike, alpha: float, mode: str = STRICT) -> PowerSum:
    """Caputo time derivative of order ``0 < alpha <= 1``.

    Constants are annihilated.  In ``strict`` mode a term ``t^b`` with
    ``-1 < b < 0`` raises :class:`StrictModeError`, since the Caputo integral
    of its derivative diverges; ``extended`` mode applies the Gamma-ratio
    power rule there as well.
    """
    alpha = _check_order(alpha)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    s = as_powersum(s)
    if alpha == 1.0:
        return d_dt(s)
    out = []
    for m in s.terms:
        b = m.t_exp
        if abs(b) <= EXP_TOL:
            continue
        if b <= -1.0 + EXP_TOL:
            raise DivergentError(f"Caputo derivative of t^{b} diverges")
        if b < 0.0 and mode == STRICT:
            raise StrictModeError(
                f"Caputo derivative of t^{b} (-1 < b < 0) needs extended mode"
            )
        r = _power_rule(m, alpha)
        if r is not None:
            out.append(r)
    return PowerSum(out)


def rl_dt(s: PowerSumLike, alpha: float) -> PowerSum:
    """Riemann-Liouville time derivative of order ``0 < alpha <= 1``."""
    alpha = _check_order(alpha)
    s = as_powersum(s)
    if alpha == 1.0:
        return d_dt(s)
    return PowerSum(r for m in s.terms if (r := _power_rule(m, alpha)) is not None)


def frac_int(s: PowerSumLike, alpha: float) -> PowerSum:
    """Riemann-Liouville fractional integral of order ``alpha >= 0`` from 0."""
    alpha = float(alpha)
    if alpha < 0.0:
        raise DomainError("fractional integral order must be nonnegative")
    s = as_powersum(s)
    if alpha == 0.0:
        return s
    return PowerSum(r for m in s.terms if (r := _power_rule(m, -alpha)) is not None)


# -- the two model equations ------------------------------------------------
def diffusion_flux_term(u: PowerSumLike, p: float) -> PowerSum:
    """``(u^p u_x)_x`` for a positive single-monomial ``u``."""
    u = as_monomial(u)
    return d_dx(mul(pow_real(u, p), d_dx(u)))


def third_order_term(u: PowerSumLike, q: float) -> PowerSum:
    """``(u^q u_xx)_x`` for a positive single-monomial ``u``."""
    u = as_monomial(u)
    return d_dx(mul(pow_real(u, q), d_dx(d_dx(u))))


def residual_diffusion(
    u: PowerSumLike, p: float, alpha: float, mode: str = EXTENDED
) -> PowerSum:
    """``C D_t^α u - (u^p u_x)_x``."""
    return caputo_dt(as_monomial(u), alpha, mode) - diffusion_flux_term(u, p)


def residual_third_order(
    u: PowerSumLike, q: float, alpha: float, mode: str = EXTENDED
) -> PowerSum:
    """``C D_t^α u - (u^q u_xx)_x``."""
    return caputo_dt(as_monomial(u), alpha, mode) - third_order_term(u, q)


@dataclass(frozen=True)
class EtaForm:
    """``η(t, x, u) = Σ_k coefficients[k](t, x) u^k``."""

    coefficients: Mapping[int, PowerSum] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k in self.coefficients:
            if int(k) != k or k < 0:
                raise DomainError("u-degrees must be nonnegative integers")

    @classmethod
    def linear(cls, a: PowerSumLike, b: PowerSumLike) -> "EtaForm":
        return cls({1: as_powersum(a), 0: as_powersum(b)})

    @property
    def degree(self) -> int:
        return max((k for k, c in self.coefficients.items() if not c.is_zero), default=0)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coefficients.values())

    def d_du(self) -> "EtaForm":
        return EtaForm(
            {k - 1: mul(float(k), c) for k, c in self.coefficients.items() if k >= 1}
        )


# -- text form -------------------------------------------------------------
def _fmt(v: float) -> str:
    s = f"{v:.16g}"
    return "0" if s == "-0" else s


def _render_term(m: Monomial) -> str:
    parts = [_fmt(m.coeff)]
    if abs(m.x_exp) > EXP_TOL:
        parts.append("x" if m.x_exp == 1.0 else f"x^{_fmt(m.x_exp)}")
    if abs(m.t_exp) > EXP_TOL:
        parts.append("t" if m.t_exp == 1.0 else f"t^{_fmt(m.t_exp)}")
    return "*".join(parts)


def render(s: PowerSumLike) -> str:
    """Canonical text, e.g. ``3.5*x^0.5*t^-0.25 + 1*t^2``.

    Terms are ordered by descending ``x_exp`` then descending ``t_exp``.
    """
    s = as_powersum(s)
    if s.is_zero:
        return "0"
    ordered = sorted(s.terms, key=lambda m: (-m.x_exp, -m.t_exp))
    out = ""
    for i, m in enumerate(ordered):
        body = _render_term(Monomial(abs(m.coeff), m.x_exp, m.t_exp))
        if i == 0:
            out = ("-" if m.coeff < 0 else "") + body
        else:
            out += (" - " if m.coeff < 0 else " + ") + body
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<var>[xt])|(?P<op>[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at position {pos}: {text[pos:]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind: str | None = None, value: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise ParseError(f"expected {want}, got {tok[1] if tok else 'end of input'}")
        self.i += 1
        return tok[1]

    def signed_number(self) -> float:
        paren = self.peek() == ("op", "(")
        if paren:
            self.take()
        sign = 1.0
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.take() == "-":
                sign = -sign
        v = sign * float(self.take("num"))
        if paren:
            self.take("op", ")")
        return v

    def term(self, sign: float) -> Monomial:
        coeff, xe, te = sign, 0.0, 0.0
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("expected a factor, got end of input")
            if tok[0] == "num":
                coeff *= float(self.take())
            elif tok[0] == "var":
                var = self.take()
                e = 1.0
                if self.peek() == ("op", "^"):
                    self.take()
                    e = self.signed_number()
                if var == "x":
                    xe += e
                else:
                    te += e
            else:
                raise ParseError(f"expected a factor, got {tok[1]!r}")
            if self.peek() == ("op", "*"):
                self.take()
                continue
            return Monomial(coeff, xe, te)

    def expr(self) -> PowerSum:
        if not self.tokens:
            raise ParseError("empty expression")
        terms = []
        sign = 1.0
        if self.peek() in (("op", "-"), ("op", "+")):
            sign = -1.0 if self.take() == "-" else 1.0
        terms.append(self.term(sign))
        while self.peek() is not None:
            op = self.take("op")
            if op not in "+-":
                raise ParseError(f"expected '+' or '-', got {op!r}")
            terms.append(self.term(-1.0 if op == "-" else 1.0))
        return PowerSum(terms)


def parse(text: str) -> PowerSum:
    """Parse the canonical text form (and loose variants such as ``x^2*t``)."""
    return _Parser(text).expr()
