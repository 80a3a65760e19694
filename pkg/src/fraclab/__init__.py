"""Fractional power-law calculus, symmetry checks and an L1 solver for
time-fractional nonlinear diffusion."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DivergenceError,
    DomainError,
    FraclabError,
    ParseError,
)
from .powerlaw import Monomial, PowerSum, caputo_dt, frac_int, parse, render, rl_dt  # noqa: E402
from .solutions import SimilaritySolution, solve_constant_p, solve_constant_q  # noqa: E402
from .symmetry import Generator, apply_generator  # noqa: E402

__all__ = [
    "ConfigError",
    "DivergenceError",
    "DomainError",
    "FraclabError",
    "Generator",
    "Monomial",
    "ParseError",
    "PowerSum",
    "SimilaritySolution",
    "apply_generator",
    "caputo_dt",
    "frac_int",
    "parse",
    "render",
    "rl_dt",
    "solve_constant_p",
    "solve_constant_q",
]
