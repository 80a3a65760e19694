"""Scaling/translation generators and invariance checks for the two model IBVPs.

A :class:`Generator` is the vector field

    X = (e0 + e1 x) ∂x + (f0 + f1 t) ∂t + g1 u ∂u,

which spans every point symmetry used for ``C D_t^α u = (u^p u_x)_x`` and
``C D_t^α u = (u^q u_xx)_x``.  All checks are done by direct substitution in
the power-law algebra.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping

import numpy as np

from . import powerlaw as pl
from .errors import DegenerateError, DomainError
from .powerlaw import EXTENDED, EtaForm, Monomial, PowerSum
from .special import gamma

COEFFS = ("e0", "e1", "f0", "f1", "g1")

DIFFUSION = "diffusion"
THIRD_ORDER = "third_order"


@dataclass(frozen=True)
class Generator:
    e0: float = 0.0
    e1: float = 0.0
    f0: float = 0.0
    f1: float = 0.0
    g1: float = 0.0
    #: optional display names for the coefficients, e.g. ``{"e0": "c1"}``
    labels: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if all(getattr(self, c) == 0.0 for c in COEFFS):
            raise DegenerateError("generator has all coefficients zero")

    @classmethod
    def diffusion(cls, c1: float, c2: float, c3: float, p: float, alpha: float) -> "Generator":
        """Generator admitted by ``C D_t^α u = (u^p u_x)_x``:
        ``(c1 + α/2 c2 x + p c3 x) ∂x + c2 t ∂t + 2 c3 u ∂u``."""
        return cls(
            e0=c1,
            e1=0.5 * alpha * c2 + p * c3,
            f0=0.0,
            f1=c2,
            g1=2.0 * c3,
            labels={"e0": "c1", "f1": "c2"},
        )

    @classmethod
    def third_order(
        cls, c1: float, c2: float, c3: float, c4: float, q: float, alpha: float
    ) -> "Generator":
        """Generator admitted by ``C D_t^α u = (u^q u_xx)_x``:
        ``(c1 x + c2) ∂x + (c3 t + c4) ∂t + (3 c1 - α c3)/q u ∂u``."""
        return cls(
            e0=c2,
            e1=c1,
            f0=c4,
            f1=c3,
            g1=(3.0 * c1 - alpha * c3) / q,
            labels={"e0": "c2", "e1": "c1", "f0": "c4", "f1": "c3"},
        )

    @classmethod
    def X1(cls, alpha: float) -> "Generator":
        return cls(e1=0.5 * alpha, f1=1.0)

    @classmethod
    def X2(cls, p: float) -> "Generator":
        return cls(e1=p, g1=2.0)

    @classmethod
    def Y1(cls, q: float) -> "Generator":
        return cls(e1=1.0, g1=3.0 / q)

    @classmethod
    def Y2(cls, q: float, alpha: float) -> "Generator":
        return cls(f1=1.0, g1=-alpha / q)

    @property
    def xi(self) -> PowerSum:
        return self.e0 + self.e1 * pl.X

    @property
    def tau(self) -> PowerSum:
        return self.f0 + self.f1 * pl.T

    def label(self, name: str) -> str:
        return self.labels.get(name, name)

    def scaled(self, lam: float) -> "Generator":
        return Generator(*(lam * getattr(self, c) for c in COEFFS), labels=self.labels)

    def zeroed(self, names) -> "Generator":
        """Copy with the named coefficients (internal or display names) set to 0."""
        inverse = {v: k for k, v in self.labels.items()}
        fields = {inverse.get(n, n): 0.0 for n in names}
        return replace(self, **fields)

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in COEFFS}


def apply_generator(gen: Generator, surface) -> PowerSum:
    """``η(θ) - ξ θ_x - τ θ_t``; zero iff ``u = θ`` is an invariant surface."""
    theta = pl.as_powersum(surface)
    return gen.g1 * theta - gen.xi * pl.d_dx(theta) - gen.tau * pl.d_dt(theta)


@dataclass(frozen=True)
class ConstraintReport:
    required_zero: tuple[str, ...]
    admissible: bool

    def to_json(self) -> dict:
        return {"required_zero": list(self.required_zero), "admissible": self.admissible}


def _line_report(gen: Generator, coeff: str) -> ConstraintReport:
    if getattr(gen, coeff) == 0.0:
        return ConstraintReport((), True)
    rest = [getattr(gen, c) for c in COEFFS if c != coeff]
    return ConstraintReport((gen.label(coeff),), any(v != 0.0 for v in rest))


def initial_line_invariance(gen: Generator) -> ConstraintReport:
    """Invariance of the line ``t = 0``: ``X t = τ`` must vanish there, so ``f0 = 0``."""
    return _line_report(gen, "f0")


def boundary_line_invariance(gen: Generator) -> ConstraintReport:
    """Invariance of the line ``x = 0``: ``X x = ξ`` must vanish there, so ``e0 = 0``."""
    return _line_report(gen, "e0")


BOUNDARY_X0 = "boundary_x0"
INITIAL_T0 = "initial_t0"


def boundary_condition_exponent(gen: Generator, side: str) -> float:
    """Exponent of the only power-law data compatible with ``gen``.

    ``boundary_x0``: ``u(t, 0) = k t^s`` with ``f1 t a' = g1 a``, so ``s = g1/f1``.
    ``initial_t0``: ``u(0, x) = k x^s`` with ``e1 x b' = g1 b``, so ``s = g1/e1``.

    Both lines must already be invariant (``e0 = f0 = 0``); otherwise the data
    would not be a pure power.
    """
    for report in (boundary_line_invariance(gen), initial_line_invariance(gen)):
        if report.required_zero:
            raise DomainError(
                f"generator does not leave the boundary lines invariant; "
                f"requires {', '.join(report.required_zero)} = 0"
            )
    if side == BOUNDARY_X0:
        if gen.f1 == 0.0:
            raise DegenerateError(f"{gen.label('f1')} = 0: boundary data is unconstrained")
        return gen.g1 / gen.f1
    if side == INITIAL_T0:
        if gen.e1 == 0.0:
            raise DegenerateError(f"{gen.label('e1')} = 0: initial data is unconstrained")
        return gen.g1 / gen.e1
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class SimilarityForm:
    """Invariant form of a scaling generator.

    ``degenerate_axis is None``: ``u = t^u_t_exponent F(x^z_exponent[0] t^z_exponent[1])``.
    ``degenerate_axis == "t"``: ``u = x^u_x_exponent G(t)``.
    ``degenerate_axis == "x"``: ``u = t^u_t_exponent F(x)``.
    """

    u_t_exponent: float | None
    z_exponent: tuple[float, float] | None
    degenerate_axis: str | None
    u_x_exponent: float | None = None

    def surface(self, profile_exponent: float = 0.0, profile: PowerSum | None = None) -> PowerSum:
        """Build one member of the family.

        ``profile_exponent`` picks ``F(z) = z^k``; ``profile`` gives ``G`` (a
        PowerSum in t for ``degenerate_axis == "t"``, in x for ``"x"``).
        """
        if self.degenerate_axis == "t":
            g = profile if profile is not None else pl.ONE
            return pl.mul(Monomial(1.0, self.u_x_exponent, 0.0), g)
        if self.degenerate_axis == "x":
            f = profile if profile is not None else pl.ONE
            return pl.mul(Monomial(1.0, 0.0, self.u_t_exponent), f)
        zx, zt = self.z_exponent
        k = profile_exponent
        return PowerSum(Monomial(1.0, zx * k, self.u_t_exponent + zt * k))

    def to_json(self) -> dict:
        d = asdict(self)
        d["z_exponent"] = list(self.z_exponent) if self.z_exponent else None
        return d


def similarity_form(gen: Generator) -> SimilarityForm:
    if gen.e0 != 0.0 or gen.f0 != 0.0:
        raise DomainError("similarity_form needs a pure scaling generator (e0 = f0 = 0)")
    if gen.e1 == 0.0 and gen.f1 == 0.0:
        raise DegenerateError("e1 = f1 = 0: no scaling in x or t")
    if gen.f1 == 0.0:
        return SimilarityForm(None, None, "t", gen.g1 / gen.e1)
    if gen.e1 == 0.0:
        return SimilarityForm(gen.g1 / gen.f1, None, "x")
    return SimilarityForm(gen.g1 / gen.f1, (1.0, -gen.e1 / gen.f1), None)


def intersect_power_law(gen_a: Generator, gen_b: Generator) -> tuple[float, float]:
    """The unique ``(x_exp, t_exp)`` such that ``x^a t^b`` is invariant under both.

    Each scaling generator imposes ``g1 - e1 a - f1 b = 0``.
    """
    for g in (gen_a, gen_b):
        if g.e0 != 0.0 or g.f0 != 0.0:
            raise DomainError("intersection needs pure scaling generators")
    m = np.array([[gen_a.e1, gen_a.f1], [gen_b.e1, gen_b.f1]])
    rhs = np.array([gen_a.g1, gen_b.g1])
    if abs(np.linalg.det(m)) < 1e-14 * max(1.0, np.abs(m).max() ** 2):
        raise DegenerateError("generators do not determine a unique power law")
    a, b = np.linalg.solve(m, rhs)
    return float(a), float(b)


def equation_operator(equation: str, u, param: float) -> PowerSum:
    """Right-hand side ``g`` of the model equation evaluated at monomial ``u``."""
    if equation == DIFFUSION:
        return pl.diffusion_flux_term(u, param)
    if equation == THIRD_ORDER:
        return pl.third_order_term(u, param)
    raise ValueError(f"unknown equation {equation!r}")


def invariant_surface_residual_thm31(
    gen: Generator,
    nu,
    equation: str,
    param: float,
    alpha: float,
    outer: str = "caputo",
) -> PowerSum:
    """``η(ν) - ξ ν_x - τ D_t^(1-α) g(ν)`` where ``g`` is the equation's RHS.

    For a solution ``ν`` this replaces ``ν_t`` by ``D^(1-α) C D^α ν``.  With
    ``outer="caputo"`` (extended mode) this composition loses terms whose
    ``g``-part is constant in t; ``outer="rl"`` keeps them.
    """
    nu = pl.as_monomial(nu)
    g = equation_operator(equation, nu, param)
    order = 1.0 - alpha
    if order == 0.0:
        dg = g
    elif outer == "caputo":
        dg = pl.caputo_dt(g, order, EXTENDED)
    elif outer == "rl":
        dg = pl.rl_dt(g, order)
    else:
        raise ValueError(f"unknown outer operator {outer!r}")
    return gen.g1 * PowerSum(nu) - gen.xi * pl.d_dx(nu) - gen.tau * dg


def mu_leading(eta: EtaForm, alpha: float) -> EtaForm:
    """Leading (k = 2) term of the Caputo expansion of ``η``, per power of u.

    ``μ = -t^(2-α) / (2 Γ(3-α)) · η_uu · u · u_tt``; the result maps
    ``d -> coefficient of u^d u_tt``.  Linear ``η`` gives zero.
    """
    if eta.degree > 3:
        raise DomainError("mu_leading supports u-degree <= 3")
    prefactor = Monomial(-1.0 / (2.0 * gamma(3.0 - alpha)), 0.0, 2.0 - alpha)
    eta_uu = eta.d_du().d_du()
    return EtaForm({k + 1: pl.mul(prefactor, c) for k, c in eta_uu.coefficients.items() if not c.is_zero})
