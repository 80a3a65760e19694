"""Exception hierarchy shared by all fraclab modules."""


class FraclabError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(FraclabError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """A Gamma function argument sits on (or within tolerance of) a pole."""


class NegativeBaseError(DomainError):
    """Real power of a non-positive coefficient."""


class StrictModeError(DomainError):
    """Caputo derivative of t^b with -1 < b < 0 requested in strict mode."""


class DivergentError(DomainError):
    """Power t^b with b <= -1: the fractional integral diverges at 0."""


class DegenerateError(DomainError):
    """A generator coefficient needed as a divisor vanishes."""


class NoRealSolutionError(DomainError):
    """No positive real constant makes the power-law ansatz a solution."""


class NonUniformGridError(DomainError):
    """A sampled function was given on a non-uniform time grid."""


class ParseError(FraclabError, ValueError):
    """Textual power-sum expression could not be parsed."""


class ConfigError(FraclabError, ValueError):
    """Solver configuration violates its preconditions."""


class DivergenceError(FraclabError, ArithmeticError):
    """Numerical solution produced NaN or overflowed."""
