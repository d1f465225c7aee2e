"""Heat-kernel values on R^2 and symbolic bookkeeping of scale divergences.

Every channel of a :class:`DivergentValue` is measured in units of 1/(4 pi):

    value = (1/4pi) * [ inv_eps / eps + log * log(L/eps) + sum_t finite[t] * t ]

where the finite tokens are "1", "log L", "1/L", "log <name>" for other
symbolic scales and "log(p/q)" for explicit rational scales.
"""
from __future__ import annotations

import math
from fractions import Fraction

from sigma_forge.algebra.series import parse_ratio
from sigma_forge.errors import DomainError


class Scale:
    """A length scale: symbolic (``eps``, ``L`` or any other name) or a positive rational."""

    __slots__ = ("name", "value")

    def __init__(self, name=None, value=None):
        if (name is None) == (value is None):
            raise ValueError("give exactly one of name or value")
        if value is not None:
            value = parse_ratio(value) if isinstance(value, str) else Fraction(value)
            if value <= 0:
                raise DomainError("scales must be positive")
        self.name = name
        self.value = value

    @classmethod
    def of(cls, x):
        if isinstance(x, Scale):
            return x
        if isinstance(x, str) and not x.replace("/", "").lstrip("-").isdigit():
            return cls(name=x)
        return cls(value=x)

    def __eq__(self, other):
        other = Scale.of(other)
        return (self.name, self.value) == (other.name, other.value)

    def __hash__(self):
        return hash((self.name, self.value))

    def __repr__(self):
        return f"Scale({self.name or self.value})"

    def log(self) -> "DivergentValue":
        """log of this scale (in the same 1/(4 pi) units, i.e. times 4 pi)."""
        if self.name == "eps":
            # log eps = log L - log(L/eps)
            return DivergentValue(0, -1, {"log L": 1})
        if self.name == "L":
            return DivergentValue(0, 0, {"log L": 1})
        if self.name == "e":
            return DivergentValue(0, 0, {"1": 1})
        if self.name is not None:
            return DivergentValue(0, 0, {f"log {self.name}": 1})
        if self.value == 1:
            return DivergentValue()
        return DivergentValue(0, 0, {f"log({self.value})": 1})


EPS = Scale("eps")
L = Scale("L")


class DivergentValue:
    """Exact Q-linear combination of the divergence channels and finite tokens."""

    __slots__ = ("coeff_inv_eps", "coeff_log", "finite_part")

    def __init__(self, coeff_inv_eps=0, coeff_log=0, finite_part=None):
        self.coeff_inv_eps = Fraction(coeff_inv_eps)
        self.coeff_log = Fraction(coeff_log)
        fin = {}
        for tok, c in (finite_part or {}).items():
            c = Fraction(c)
            if c:
                fin[tok] = c
        self.finite_part = fin

    def __add__(self, other):
        if not isinstance(other, DivergentValue):
            return NotImplemented
        fin = dict(self.finite_part)
        for t, c in other.finite_part.items():
            fin[t] = fin.get(t, 0) + c
        return DivergentValue(self.coeff_inv_eps + other.coeff_inv_eps, self.coeff_log + other.coeff_log, fin)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return DivergentValue(self.coeff_inv_eps * c, self.coeff_log * c, {t: v * c for t, v in self.finite_part.items()})

    __mul__ = scale
    __rmul__ = scale

    def is_finite(self) -> bool:
        return not self.coeff_inv_eps and not self.coeff_log

    def is_zero(self) -> bool:
        return self.is_finite() and not self.finite_part

    def __eq__(self, other):
        if not isinstance(other, DivergentValue):
            return NotImplemented
        return (self.coeff_inv_eps, self.coeff_log, self.finite_part) == (other.coeff_inv_eps, other.coeff_log, other.finite_part)

    def __hash__(self):
        return hash((self.coeff_inv_eps, self.coeff_log, frozenset(self.finite_part.items())))

    def finite_text(self) -> str:
        if not self.finite_part:
            return "0"
        return " + ".join(f"{c}*[{t}]" for t, c in sorted(self.finite_part.items()))

    def to_record(self):
        return {"inv_eps": str(self.coeff_inv_eps), "log": str(self.coeff_log), "finite": self.finite_text()}

    def evaluate(self, eps: float, L: float, **others) -> float:
        """Float value including the 1/(4 pi) prefactor."""
        total = float(self.coeff_inv_eps) / eps + float(self.coeff_log) * math.log(L / eps)
        for tok, c in self.finite_part.items():
            if tok == "1":
                v = 1.0
            elif tok == "log L":
                v = math.log(L)
            elif tok == "1/L":
                v = 1.0 / L
            elif tok.startswith("log(") and tok.endswith(")"):
                v = math.log(float(Fraction(tok[4:-1])))
            elif tok.startswith("log "):
                v = math.log(others[tok[4:]])
            else:
                raise KeyError(tok)
            total += float(c) * v
        return total / (4 * math.pi)

    def __repr__(self):
        return f"DivergentValue(inv_eps={self.coeff_inv_eps}, log={self.coeff_log}, finite={self.finite_text()})"


def heat_kernel_coincident(t):
    """K_t(x, x) = 1/(4 pi t): returns 1/t in units of 1/(4 pi).

    A rational t gives a Fraction; the symbolic scale ``eps`` gives the
    1/(4 pi eps) channel and ``L`` the finite token 1/L.
    """
    if isinstance(t, Scale) or (isinstance(t, str) and t in ("eps", "L")):
        t = Scale.of(t)
        if t.value is not None:
            return 1 / t.value
        if t.name == "eps":
            return DivergentValue(1, 0)
        if t.name == "L":
            return DivergentValue(0, 0, {"1/L": 1})
        raise DomainError(f"no closed form for K at symbolic time {t.name!r}")
    t = parse_ratio(t) if isinstance(t, str) else Fraction(t)
    if t <= 0:
        raise DomainError("heat kernel time must be positive")
    return 1 / t


def tadpole_integral(lo, hi) -> DivergentValue:
    """P(lo, hi)(x, x) = int_lo^hi dt/(4 pi t) = (1/4pi)(log hi - log lo)."""
    lo, hi = Scale.of(lo), Scale.of(hi)
    if lo.value is not None and hi.value is not None and hi.value < lo.value:
        raise DomainError("tadpole window needs lo <= hi")
    return hi.log() - lo.log()


class EigenPropagator:
    """sum over eigenvalues lam in the window (lo, hi] of (1/lam) e_a (x) e_a."""

    __slots__ = ("eigenvalues", "lo", "hi")

    def __init__(self, eigenvalues, lo, hi=None):
        eig = tuple(Fraction(x) for x in eigenvalues)
        if any(x <= 0 for x in eig):
            raise DomainError("eigenvalues of -Q must be positive")
        lo = Fraction(lo)
        hi = None if hi is None or hi == math.inf else Fraction(hi)
        if hi is not None and not lo < hi:
            raise DomainError("propagator window needs lo < hi")
        self.eigenvalues, self.lo, self.hi = eig, lo, hi

    def in_window(self, lam) -> bool:
        return lam > self.lo and (self.hi is None or lam <= self.hi)

    @property
    def diagonal(self):
        return [1 / x if self.in_window(x) else Fraction(0) for x in self.eigenvalues]

    def matrix(self):
        d = self.diagonal
        return [[d[i] if i == j else Fraction(0) for j in range(len(d))] for i in range(len(d))]

    def __add__(self, other):
        if not isinstance(other, EigenPropagator) or other.eigenvalues != self.eigenvalues:
            return NotImplemented
        if self.hi is not None and self.hi == other.lo:
            return EigenPropagator(self.eigenvalues, self.lo, other.hi)
        if other.hi is not None and other.hi == self.lo:
            return EigenPropagator(self.eigenvalues, other.lo, self.hi)
        raise DomainError("only adjacent windows can be merged")

    def __eq__(self, other):
        if not isinstance(other, EigenPropagator):
            return NotImplemented
        return self.diagonal == other.diagonal

    __hash__ = None

    def __repr__(self):
        return f"EigenPropagator({self.diagonal}, window=({self.lo}, {self.hi if self.hi is not None else 'inf'}])"


def eigen_propagator(eigenvalues, lo, hi=None) -> EigenPropagator:
    return EigenPropagator(eigenvalues, lo, hi)
