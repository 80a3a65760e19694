"""Grid-based fractional operators on uniform time grids.

* :func:`l1_caputo` -- L1 scheme for the Caputo derivative, order ``2 - α``.
* :func:`rl_integral_num` -- product-trapezoid Riemann-Liouville integral.
* :func:`rl_derivative_num` -- Caputo value plus the ``f(0)`` correction.
* :func:`leibniz_partial_sum` -- generalized Leibniz series for power laws,
  evaluated exactly through :mod:`fraclab.powerlaw`.

Output at ``t = 0`` is 0 by convention for the derivatives.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import powerlaw as pl
from .errors import DomainError, NonUniformGridError
from .special import binomial, gamma

GRID_RTOL = 1e-12


@dataclass(frozen=True)
class SampledFunction:
    """Values of a function of time on nodes starting at ``t = 0``."""

    t_nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t_nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise DomainError("t_nodes and values must be 1-d and of equal length")
        if t.size < 2:
            raise DomainError("a sampled function needs at least two nodes")
        if t[0] != 0.0:
            raise DomainError("t_nodes must start at 0")
        if np.any(np.diff(t) <= 0):
            raise DomainError("t_nodes must be strictly increasing")
        object.__setattr__(self, "t_nodes", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, f, t_final: float, n_steps: int) -> "SampledFunction":
        t = np.linspace(0.0, t_final, n_steps + 1)
        return cls(t, np.asarray(f(t), dtype=float) * np.ones_like(t))

    @property
    def step(self) -> float:
        """Uniform spacing; raises :class:`NonUniformGridError` otherwise."""
        h = np.diff(self.t_nodes)
        tau = self.t_nodes[-1] / (self.t_nodes.size - 1)
        if np.max(np.abs(h - tau)) > GRID_RTOL * tau:
            raise NonUniformGridError("operation requires a uniform time grid")
        return float(tau)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.t_nodes, self.values):
            w.writerow([repr(float(t)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
            raise DomainError("expected header 't,value'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1])


def _check_alpha_open(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(
            f"L1 scheme needs 0 < alpha < 1 (got {alpha}); use ordinary differencing at alpha = 1"
        )
    return alpha


def l1_weights(alpha: float, n_steps: int) -> np.ndarray:
    """``b_j = (j+1)^(1-α) - j^(1-α)`` for ``j = 0 .. n_steps-1``."""
    alpha = _check_alpha_open(alpha)
    if n_steps < 1:
        raise DomainError("n_steps must be positive")
    j = np.arange(n_steps + 1, dtype=float)
    return np.diff(j ** (1.0 - alpha))


def l1_caputo(f: SampledFunction, alpha: float) -> SampledFunction:
    r"""L1 approximation of the Caputo derivative at every node.

    .. math::

        D^\alpha f(t_n) \approx \frac{\tau^{-\alpha}}{\Gamma(2-\alpha)}
            \sum_{j=0}^{n-1} b_j (f_{n-j} - f_{n-j-1})
    """
    alpha = _check_alpha_open(alpha)
    tau = f.step
    n = f.values.size - 1
    b = l1_weights(alpha, n)
    diffs = np.diff(f.values)
    # out[n] = sum_j b_j diffs[n-1-j], a causal convolution
    conv = np.convolve(b, diffs)[:n]
    out = np.zeros(n + 1)
    out[1:] = conv * tau ** (-alpha) / gamma(2.0 - alpha)
    return SampledFunction(f.t_nodes, out)


def product_trapezoid_weights(alpha: float, n: int) -> np.ndarray:
    """Weights ``a_{k,n}`` (k = 0..n) of the product-trapezoid rule, without the
    ``τ^α / Γ(α+2)`` prefactor."""
    if n == 0:
        return np.zeros(1)
    k = np.arange(n + 1, dtype=float)
    m = n - k
    a1 = alpha + 1.0
    w = (m + 1.0) ** a1 - 2.0 * m**a1 + np.abs(m - 1.0) ** a1
    w[0] = (n - 1.0) ** a1 - (n - alpha - 1.0) * n**alpha
    w[-1] = 1.0
    return w


def rl_integral_num(f: SampledFunction, alpha: float) -> SampledFunction:
    """Fractional integral of the piecewise-linear interpolant of ``f``.

    Each interval's contribution is integrated exactly against the kernel
    ``(t - s)^(α-1) / Γ(α)``, so linear data is reproduced to rounding.
    """
    alpha = float(alpha)
    if alpha <= 0.0:
        raise DomainError("fractional integral order must be positive")
    tau = f.step
    n_total = f.values.size - 1
    out = np.zeros(n_total + 1)
    scale = tau**alpha / gamma(alpha + 2.0)
    for n in range(1, n_total + 1):
        out[n] = scale * np.dot(product_trapezoid_weights(alpha, n), f.values[: n + 1])
    return SampledFunction(f.t_nodes, out)


def rl_derivative_num(f: SampledFunction, alpha: float, f0: float) -> SampledFunction:
    """Riemann-Liouville derivative as ``L1 Caputo + f0 t^(-α) / Γ(1-α)``."""
    caputo = l1_caputo(f, alpha)
    t = f.t_nodes
    out = caputo.values.copy()
    out[1:] += f0 * t[1:] ** (-alpha) / gamma(1.0 - alpha)
    return SampledFunction(t, out)


def leibniz_terms(a_exp: float, b_exp: float, alpha: float, n_terms: int) -> list[pl.PowerSum]:
    """Terms ``binom(α, n) I^(n-α)[t^a] · d^n/dt^n [t^b]`` for ``n < n_terms``.

    The ``n = 0`` term uses ``I^(-α) = D^α`` (Riemann-Liouville).
    """
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    f = pl.PowerSum(pl.Monomial(1.0, 0.0, a_exp))
    g = pl.PowerSum(pl.Monomial(1.0, 0.0, b_exp))
    terms = []
    dg = g
    for n in range(n_terms):
        order = n - alpha
        if order < 0:
            fi = pl.rl_dt(f, -order)
        else:
            fi = pl.frac_int(f, order)
        terms.append(binomial(alpha, n) * pl.mul(fi, dg))
        dg = pl.d_dt(dg)
    return terms


def leibniz_partial_sum(
    a_exp: float, b_exp: float, alpha: float, n_terms: int, t: float = 1.0
) -> float:
    """Partial sum of the generalized Leibniz series for ``D^α (t^a · t^b)``.

    When ``b_exp`` is a nonnegative integer the series terminates after
    ``b_exp + 1`` terms and the sum is exact.
    """
    if a_exp <= -1.0:
        raise DomainError("a_exp must exceed -1")
    if b_exp < 0:
        raise DomainError("b_exp must be nonnegative")
    if t <= 0:
        raise DomainError("t must be positive")
    return math.fsum(float(term(1.0, t)) for term in leibniz_terms(a_exp, b_exp, alpha, n_terms))
