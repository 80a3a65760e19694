"""Power-law similarity solutions of the two model equations.

Substituting ``u = c x^a t^b`` into either equation leaves a single monomial
on each side, so the constant follows from a scalar balance

    c · R = c^(n+1) · S,      R = Γ(1+b) / Γ(1+b-α),

with ``S`` the spatial coefficient.  Every returned solution carries a residual
certificate computed in the power-law algebra.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import powerlaw as pl
from .errors import DivergentError, DomainError, NoRealSolutionError
from .powerlaw import EXTENDED, Monomial
from .special import gamma_ratio
from .symmetry import DIFFUSION, THIRD_ORDER

DEFAULT_RESIDUAL_TOL = 1e-10


def residual_tol() -> float:
    """Certificate tolerance, overridable through ``FRACLAB_TOL``."""
    raw = os.environ.get("FRACLAB_TOL")
    return float(raw) if raw else DEFAULT_RESIDUAL_TOL


@dataclass(frozen=True)
class SimilaritySolution:
    equation: str
    param: float
    alpha: float
    x_exp: float
    t_exp: float
    constant: float
    residual_max_coeff: float
    residual_scale: float
    paper_constant: float | None = None
    matches_paper: bool = False

    @property
    def monomial(self) -> Monomial:
        return Monomial(self.constant, self.x_exp, self.t_exp)

    @property
    def relative_residual(self) -> float:
        return self.residual_max_coeff / self.residual_scale if self.residual_scale else 0.0

    @property
    def certified(self) -> bool:
        return self.residual_max_coeff <= residual_tol() * max(self.residual_scale, 1e-300)

    def __call__(self, x, t):
        return self.constant * np.power(x, self.x_exp) * np.power(t, self.t_exp)

    def to_json(self) -> dict:
        name = "p" if self.equation == DIFFUSION else "q"
        return {
            "equation": self.equation,
            "parameters": {name: self.param, "alpha": self.alpha},
            "x_exp": self.x_exp,
            "t_exp": self.t_exp,
            "constant": self.constant,
            "paper_constant": self.paper_constant,
            "matches_paper": self.matches_paper,
            "residual_max_coeff": self.residual_max_coeff,
            "relative_residual": self.relative_residual,
            "certified": self.certified,
        }


def _residual(equation: str, u: Monomial, param: float, alpha: float) -> tuple[pl.PowerSum, float]:
    """Residual and the size of the larger side of the balance."""
    lhs = pl.caputo_dt(u, alpha, EXTENDED)
    if equation == DIFFUSION:
        rhs = pl.diffusion_flux_term(u, param)
    else:
        rhs = pl.third_order_term(u, param)
    return lhs - rhs, max(lhs.max_abs_coeff(), rhs.max_abs_coeff())


def residual_of(equation: str, constant: float, param: float, alpha: float) -> tuple[float, float]:
    """``(max |residual coeff|, scale)`` for ``u = constant x^a t^b``."""
    a, b = exponents(equation, param, alpha)
    res, scale = _residual(equation, Monomial(constant, a, b), param, alpha)
    return res.max_abs_coeff(), scale


def exponents(equation: str, param: float, alpha: float) -> tuple[float, float]:
    if equation == DIFFUSION:
        return 2.0 / param, -alpha / param
    if equation == THIRD_ORDER:
        return 3.0 / param, -alpha / param
    raise ValueError(f"unknown equation {equation!r}")


def time_ratio(param: float, alpha: float) -> float:
    """``Γ(1 - α/n) / Γ(1 - α/n - α)``, raising on the degenerate pole cases."""
    if alpha == 1.0:
        # classical limit: Γ(1+b)/Γ(b) = b
        return -1.0 / param
    num, den = 1.0 - alpha / param, 1.0 - alpha / param - alpha
    if num <= pl.EXP_TOL:
        raise DivergentError(
            f"t-exponent {-alpha / param:g} <= -1: Caputo derivative diverges"
        )
    r = gamma_ratio(num, den)
    if r.is_zero:
        raise NoRealSolutionError(
            f"1/Γ({den:g}) = 0 (pole): time derivative vanishes, only c = 0 balances"
        )
    return r.value


def _positive_root(base: float, n: float, what: str) -> float:
    if not base > 0.0 or not math.isfinite(base):
        raise NoRealSolutionError(f"{what} = {base:.6g} has no positive real {n:g}-th root")
    return base ** (1.0 / n)


def _paper_root(base: float, n: float) -> float | None:
    if base > 0.0:
        return base ** (1.0 / n)
    if base == 0.0 and n > 0:
        return 0.0
    return None


def _close(a: float | None, b: float, rtol: float = 1e-12) -> bool:
    return a is not None and abs(a - b) <= rtol * max(abs(a), abs(b))


def _certify(equation, param, alpha, c, printed) -> SimilaritySolution:
    a, b = exponents(equation, param, alpha)
    res, scale = _residual(equation, Monomial(c, a, b), param, alpha)
    return SimilaritySolution(
        equation=equation,
        param=param,
        alpha=alpha,
        x_exp=a,
        t_exp=b,
        constant=c,
        residual_max_coeff=res.max_abs_coeff(),
        residual_scale=scale,
        paper_constant=printed,
        matches_paper=_close(printed, c),
    )


def _check(param: float, alpha: float) -> None:
    if param == 0.0:
        raise DomainError("nonlinearity exponent must be nonzero")
    if not 0.0 < alpha <= 1.0:
        raise DomainError("alpha must satisfy 0 < alpha <= 1")


def diffusion_spatial_coeff(p: float) -> float:
    """Coefficient S in ``(u^p u_x)_x = c^(p+1) S x^(2/p) t^(...)``: ``2(p+2)/p²``."""
    return 2.0 * (p + 2.0) / p**2


def third_order_spatial_coeff(q: float) -> float:
    """Coefficient S in ``(u^q u_xx)_x``: ``3(3-q)(3+q)/q³``."""
    return 3.0 * (3.0 - q) * (3.0 + q) / q**3


def paper_constant_p_power(p: float, alpha: float) -> float:
    """The printed closed form ``k^p = 2(2-p) Γ(1-α/p) / (p² Γ(1-α/p-α))``."""
    return 2.0 * (2.0 - p) * time_ratio(p, alpha) / p**2


def paper_constant_q_power(q: float, alpha: float) -> float:
    """The printed closed form ``c'^q = q³ Γ(1-α/q) / (3(3-q)(3+q) Γ(1-α/q-α))``."""
    return q**3 * time_ratio(q, alpha) / (3.0 * (3.0 - q) * (3.0 + q))


def solve_constant_p(p: float, alpha: float) -> SimilaritySolution:
    """Constant for ``u = c x^(2/p) t^(-α/p)`` solving ``C D^α u = (u^p u_x)_x``."""
    _check(p, alpha)
    if abs(p + 2.0) <= pl.EXP_TOL:
        raise DomainError("p = -2 makes the spatial term vanish identically")
    r = time_ratio(p, alpha)
    c = _positive_root(r / diffusion_spatial_coeff(p), p, "c^p")
    printed = _paper_root(paper_constant_p_power(p, alpha), p)
    return _certify(DIFFUSION, p, alpha, c, printed)


def solve_constant_q(q: float, alpha: float) -> SimilaritySolution:
    """Constant for ``u = c' x^(3/q) t^(-α/q)`` solving ``C D^α u = (u^q u_xx)_x``."""
    _check(q, alpha)
    if abs(abs(q) - 3.0) <= pl.EXP_TOL:
        raise DomainError("q = ±3 makes the spatial term vanish identically")
    r = time_ratio(q, alpha)
    c = _positive_root(r / third_order_spatial_coeff(q), q, "c'^q")
    printed = _paper_root(paper_constant_q_power(q, alpha), q)
    return _certify(THIRD_ORDER, q, alpha, c, printed)


def solve(equation: str, param: float, alpha: float) -> SimilaritySolution:
    if equation == DIFFUSION:
        return solve_constant_p(param, alpha)
    if equation == THIRD_ORDER:
        return solve_constant_q(param, alpha)
    raise ValueError(f"unknown equation {equation!r}")


@dataclass(frozen=True)
class IBVPClass:
    zero_boundary: dict
    blowup: dict
    variant: str

    def to_json(self) -> dict:
        return {"zero_boundary": self.zero_boundary, "blowup": self.blowup, "variant": self.variant}


def classify_ibvp(solution: SimilaritySolution) -> IBVPClass:
    """Which boundary is homogeneous and along which axis ``u`` blows up.

    ``x_side``: ``u(t, 0) = 0``; ``t_side``: ``u(0, x) = 0``.
    """
    a, b = solution.x_exp, solution.t_exp
    zero = {"x_side": a > 0, "t_side": b > 0}
    blow = {"t_to_0": b < 0, "x_to_0": a < 0}
    name = "p" if solution.equation == DIFFUSION else "q"
    sign = ">" if solution.param > 0 else "<"
    return IBVPClass(zero, blow, f"{solution.equation}, {name} {sign} 0")


def verify_blowup(solution: SimilaritySolution, axis: str, sequence) -> bool:
    """Finite-sequence proxy for ``u -> +inf`` as ``axis -> 0``, the other
    coordinate fixed at 1.

    True iff the values increase strictly and the log-log growth rate does
    not decay along the sequence (last segment at least half the first), which
    separates power-law blow-up from convergence to a finite limit.
    """
    s = np.asarray(sequence, dtype=float)
    if s.ndim != 1 or s.size < 3 or np.any(s <= 0) or np.any(np.diff(s) >= 0):
        raise DomainError("sequence must be at least 3 strictly decreasing positive reals")
    if axis == "t":
        vals = solution(1.0, s)
    elif axis == "x":
        vals = solution(s, 1.0)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    if not np.all(np.isfinite(vals)) or not np.all(np.diff(vals) > 0):
        return False
    rates = np.diff(np.log(vals)) / -np.diff(np.log(s))
    return bool(rates[-1] > 0 and rates[-1] >= 0.5 * rates[0])


def classical_porous_medium_constant(p: float) -> float | None:
    """At α = 1: ``u = c x^(2/p) t^(-1/p)`` needs ``-c/p = c^(p+1) 2(p+2)/p²``."""
    base = -p / (2.0 * (p + 2.0))
    return base ** (1.0 / p) if base > 0 else None
