"""L1 / finite-difference solver for ``C D_t^α u = (u^p u_x)_x + s`` on a rectangle.

Time: L1 scheme with the full memory sum (O(nt²) work, no fast convolution).
Space: centered flux differences, diffusivity ``((u_i + u_{i+1})/2)^p`` on
faces.  Each linear solve freezes the diffusivity at a known state, so it is
one tridiagonal system.  ``coefficient_lag`` selects the state:

* ``"picard"`` (default): start from the extrapolation ``2 u^{n-1} - u^{n-2}``
  and repeat the frozen solve until the iterates agree to ``PICARD_RTOL``,
  i.e. the fully implicit step.
* ``"extrapolated"``: one solve frozen at ``2 u^{n-1} - u^{n-2}``.  Cheap, but
  the explicit coefficient acts like explicit advection and loses stability
  once ``τ^α / h`` is large.
* ``"previous"``: one solve frozen at ``u^{n-1}``; first order in τ.

The first step has no history, so it is always iterated to convergence.
Dirichlet data is imposed at both ends of ``[x_lo, x_hi]``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from . import powerlaw as pl
from .errors import ConfigError, DivergenceError, DomainError
from .numerics import l1_weights
from .powerlaw import PowerSum
from .solutions import SimilaritySolution, solve_constant_p
from .special import gamma

MMS = "mms"
EXACT_SIMILARITY = "exact_similarity"
LAGS = ("picard", "extrapolated", "previous")

PICARD_MAXITER = 100
PICARD_RTOL = 1e-13


def mms_source(u_star, p: int, alpha: float) -> PowerSum:
    """Exact source making ``u_star`` solve the forced equation."""
    if p < 0 or int(p) != p:
        raise DomainError("manufactured solutions need a nonnegative integer p")
    u = pl.as_powersum(u_star)
    flux = pl.mul(pl.pow_int(u, int(p)), pl.d_dx(u))
    return pl.caputo_dt(u, alpha) - pl.d_dx(flux)


@dataclass
class SolverConfig:
    alpha: float
    p: float
    x_lo: float
    x_hi: float
    t_final: float
    nx: int
    nt: int
    mode: str = MMS
    u_star: PowerSum | None = None
    coefficient_lag: str = "picard"
    #: t -> (u(t, x_lo), u(t, x_hi)); defaults to the reference solution
    dirichlet: Callable[[float], tuple[float, float]] | None = None
    #: x-array -> u(0, x); defaults to the reference solution
    initial: Callable[[np.ndarray], np.ndarray] | None = None
    solution: SimilaritySolution | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must satisfy 0 < alpha < 1 for the L1 scheme")
        if self.p == 0:
            raise ConfigError("p must be nonzero")
        if not self.x_lo < self.x_hi:
            raise ConfigError("x_lo must be smaller than x_hi")
        if not self.t_final > 0:
            raise ConfigError("t_final must be positive")
        if int(self.nx) != self.nx or self.nx < 3:
            raise ConfigError("nx must be an integer >= 3")
        if int(self.nt) != self.nt or self.nt < 2:
            raise ConfigError("nt must be an integer >= 2")
        if self.coefficient_lag not in LAGS:
            raise ConfigError(f"coefficient_lag must be one of {LAGS}")
        self.nx, self.nt = int(self.nx), int(self.nt)
        if self.mode == MMS:
            if self.u_star is None:
                raise ConfigError("mms mode needs u_star")
            if self.p < 0 or int(self.p) != self.p:
                raise ConfigError("mms mode needs a positive integer p")
            self.u_star = pl.as_powersum(self.u_star)
        elif self.mode == EXACT_SIMILARITY:
            if self.u_star is not None:
                raise ConfigError("u_star is only used in mms mode")
            if self.solution is None:
                try:
                    self.solution = solve_constant_p(self.p, self.alpha)
                except DomainError as exc:
                    raise ConfigError(f"no certified similarity solution: {exc}") from exc
            if not self.solution.certified:
                raise ConfigError("similarity solution failed its residual certificate")
            if self.solution.x_exp < 0 and self.x_lo <= 0:
                raise ConfigError("solution blows up at x = 0; need x_lo > 0")
            if self.x_lo < 0 and self.solution.x_exp != int(self.solution.x_exp):
                raise ConfigError("non-integer x power on a domain with x < 0")
            if self.solution.t_exp < 0 and self.initial is None:
                raise ConfigError("solution blows up at t = 0; no initial data at t = 0")
        else:
            raise ConfigError(f"unknown mode {self.mode!r}")

    # reference / data -----------------------------------------------------
    def reference(self, x, t):
        if self.mode == MMS:
            return self.u_star(x, t)
        if self.solution.t_exp > 0 and np.ndim(t) == 0 and t == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.solution(x, t)

    def source(self) -> PowerSum:
        if self.mode == MMS:
            return mms_source(self.u_star, int(self.p), self.alpha)
        return pl.ZERO

    def boundary_values(self, t: float) -> tuple[float, float]:
        if self.dirichlet is not None:
            return self.dirichlet(t)
        return float(self.reference(self.x_lo, t)), float(self.reference(self.x_hi, t))

    def initial_values(self, x: np.ndarray) -> np.ndarray:
        if self.initial is not None:
            return np.asarray(self.initial(x), dtype=float) * np.ones_like(x)
        return np.asarray(self.reference(x, 0.0), dtype=float) * np.ones_like(x)


@dataclass
class Field:
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    reference: np.ndarray | None = None
    data_min: float = -math.inf
    data_max: float = math.inf

    @property
    def error(self) -> np.ndarray | None:
        return None if self.reference is None else np.abs(self.u - self.reference)

    @property
    def max_error(self) -> float:
        """Max-norm error over x at the final time."""
        return float(np.max(self.error[-1]))

    @property
    def l2_error(self) -> float:
        """Discrete L2 error over x at the final time."""
        h = self.x[1] - self.x[0]
        return float(np.sqrt(h * np.sum(self.error[-1] ** 2)))

    @property
    def within_data_bounds(self) -> bool:
        """Field lies within the data range widened by 10% on each side."""
        margin = 0.1 * (self.data_max - self.data_min)
        return bool(
            np.all(self.u >= self.data_min - margin) and np.all(self.u <= self.data_max + margin)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "u", "reference", "abs_error"])
        ref = self.reference if self.reference is not None else np.full_like(self.u, np.nan)
        err = np.abs(self.u - ref)
        for n, tn in enumerate(self.t):
            for i, xi in enumerate(self.x):
                w.writerow([repr(float(v)) for v in (tn, xi, self.u[n, i], ref[n, i], err[n, i])])
        return buf.getvalue()


def _face_diffusivity(w: np.ndarray, p: float) -> np.ndarray | None:
    mid = 0.5 * (w[1:] + w[:-1])
    with np.errstate(all="ignore"):
        k = np.power(mid, p)
    if not np.all(np.isfinite(k)):
        return None
    return k


def _step(u_prev, rhs_extra, k_face, mu_h2, left, right):
    """Solve ``u - μ A(k) u = u_prev + rhs_extra`` with Dirichlet ends.

    Works on the increment ``u - u_prev`` so that a steady state gives an
    exactly zero right-hand side.
    """
    m = u_prev.size - 2
    lower = -mu_h2 * k_face[:-1]
    upper = -mu_h2 * k_face[1:]
    diag = 1.0 + mu_h2 * (k_face[:-1] + k_face[1:])
    flux = k_face * np.diff(u_prev)
    rhs = mu_h2 * (flux[1:] - flux[:-1]) + rhs_extra
    d_left, d_right = left - u_prev[0], right - u_prev[-1]
    rhs[0] -= lower[0] * d_left
    rhs[-1] -= upper[-1] * d_right
    ab = np.zeros((3, m))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    out = np.empty_like(u_prev)
    out[0], out[-1] = left, right
    out[1:-1] = u_prev[1:-1] + solve_banded((1, 1), ab, rhs)
    return out


def solve(config: SolverConfig) -> Field:
    """March ``nt`` L1 steps and return the field with reference errors."""
    c = config
    x = np.linspace(c.x_lo, c.x_hi, c.nx + 1)
    t = np.linspace(0.0, c.t_final, c.nt + 1)
    tau = c.t_final / c.nt
    h = x[1] - x[0]
    b = l1_weights(c.alpha, c.nt)
    mu = tau**c.alpha * gamma(2.0 - c.alpha)
    mu_h2 = mu / h**2
    src = c.source()

    u = np.empty((c.nt + 1, c.nx + 1))
    u[0] = c.initial_values(x)
    diffs = np.zeros((c.nt, c.nx + 1))
    data = [u[0]]

    for n in range(1, c.nt + 1):
        left, right = c.boundary_values(t[n])
        data.append(np.array([left, right]))
        history = b[n - 1 : 0 : -1] @ diffs[: n - 1] if n > 1 else 0.0
        extra = -history[1:-1] if n > 1 else np.zeros(c.nx - 1)
        if not src.is_zero:
            extra = extra + mu * src(x[1:-1], t[n])

        if n == 1:
            guess = _first_guess(u[0], left, right, c.p)
            sweeps = PICARD_MAXITER
        else:
            guess = u[n - 1]
            if c.coefficient_lag != "previous":
                ext = 2.0 * u[n - 1] - u[n - 2]
                if _face_diffusivity(ext, c.p) is not None:
                    guess = ext
            sweeps = PICARD_MAXITER if c.coefficient_lag == "picard" else 1
        u[n] = _fixed_point(u[n - 1], extra, mu_h2, left, right, c.p, guess, sweeps, n)
        if not np.all(np.isfinite(u[n])):
            raise DivergenceError(f"non-finite values at step {n} (t = {t[n]:g})")
        diffs[n - 1] = u[n] - u[n - 1]

    ref = np.array([c.reference(x, tn) for tn in t])
    flat = np.concatenate(data)
    return Field(t, x, u, ref, float(flat.min()), float(flat.max()))


def _first_guess(u0, left, right, p):
    guess = u0.copy()
    guess[0], guess[-1] = left, right
    if _face_diffusivity(guess, p) is None:
        guess = np.linspace(left, right, u0.size)
    return guess


def _fixed_point(u_prev, extra, mu_h2, left, right, p, guess, sweeps, n):
    for _ in range(sweeps):
        k_face = _face_diffusivity(guess, p)
        if k_face is None:
            raise DivergenceError(f"diffusivity not finite at step {n}")
        new = _step(u_prev, extra, k_face, mu_h2, left, right)
        if not np.all(np.isfinite(new)):
            raise DivergenceError(f"non-finite values at step {n}")
        done = np.max(np.abs(new - guess)) <= PICARD_RTOL * max(np.max(np.abs(new)), 1e-300)
        guess = new
        if done:
            break
    return guess


@dataclass(frozen=True)
class ConvergenceRow:
    nt: int
    nx: int
    max_error: float
    l2_error: float
    observed_order: float | None


def refinement_levels(config: SolverConfig, levels: int) -> list[tuple[int, int]]:
    """``nt`` doubles per level; ``nx`` grows like ``nt^((2-α)/2)``."""
    if levels < 3:
        raise ConfigError("need at least three refinement levels")
    out = []
    for k in range(levels):
        nt = config.nt * 2**k
        nx = max(3, int(round(config.nx * 2 ** (k * (2.0 - config.alpha) / 2.0))))
        out.append((nt, nx))
    return out


def convergence_study(config: SolverConfig, levels: int = 4) -> list[ConvergenceRow]:
    rows: list[ConvergenceRow] = []
    prev = None
    for nt, nx in refinement_levels(config, levels):
        cfg = SolverConfig(**{**config.__dict__, "nt": nt, "nx": nx})
        f = solve(cfg)
        err = f.max_error
        order = math.log2(prev / err) if prev is not None and err > 0 else None
        rows.append(ConvergenceRow(nt, nx, err, f.l2_error, order))
        prev = err
    return rows


def convergence_csv(rows: list[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["nt", "nx", "max_error", "l2_error", "observed_order"])
    for r in rows:
        order = "" if r.observed_order is None else repr(r.observed_order)
        w.writerow([r.nt, r.nx, repr(r.max_error), repr(r.l2_error), order])
    return buf.getvalue()
