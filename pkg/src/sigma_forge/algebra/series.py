"""Sparse truncated multivariate power series over the rationals.

A :class:`TruncSeries` is a map from multi-indices (exponent tuples) to
:class:`fractions.Fraction` coefficients, truncated at a fixed total degree.
Stored maps are canonical: no zero coefficients and no monomial above the
cutoff, so equality of series is equality of term maps.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from types import MappingProxyType
from typing import Iterable, Mapping

from sigma_forge import kernels
from sigma_forge.errors import DimensionMismatchError, DomainError

MultiIndex = tuple[int, ...]


def parse_ratio(text) -> Fraction:
    """Parse ``"p/q"`` (or an int/Fraction) into a Fraction; rejects zero denominators."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_ratio(x) -> str:
    return str(Fraction(x))


def grlex_key(exps: MultiIndex):
    """Graded-lex order: total degree first, then larger leading exponents first."""
    return (sum(exps), tuple(-e for e in exps))


def monomials(nvars: int, degree: int) -> list[MultiIndex]:
    """All multi-indices of exact total ``degree``, in graded-lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grlex_key)
    return out


def monomials_upto(nvars: int, cutoff: int) -> list[MultiIndex]:
    out = []
    for d in range(cutoff + 1):
        out.extend(monomials(nvars, d))
    return out


class TruncSeries:
    """Immutable truncated power series in ``nvars`` variables.

    Arithmetic between series requires matching ``nvars`` and ``cutoff``;
    results are truncated at the shared cutoff.
    """

    __slots__ = ("nvars", "cutoff", "_terms")

    def __init__(self, nvars: int, cutoff: int, terms: Mapping | Iterable | None = None):
        if nvars < 0 or cutoff < 0:
            raise ValueError("nvars and cutoff must be non-negative")
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise DimensionMismatchError(f"multi-index {exps} has length {len(exps)}, expected {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if sum(exps) > cutoff:
                continue
            c = clean.get(exps, 0) + Fraction(c)
            if c:
                clean[exps] = c
            else:
                clean.pop(exps, None)
        self.nvars = nvars
        self.cutoff = cutoff
        self._terms = clean

    @classmethod
    def _raw(cls, nvars, cutoff, terms):
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.cutoff = cutoff
        obj._terms = terms
        return obj

    # constructors

    @classmethod
    def zero(cls, nvars, cutoff):
        return cls._raw(nvars, cutoff, {})

    @classmethod
    def constant(cls, nvars, cutoff, value=1):
        value = Fraction(value)
        return cls._raw(nvars, cutoff, {(0,) * nvars: value} if value else {})

    @classmethod
    def variable(cls, nvars, cutoff, index):
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, cutoff, {tuple(e): 1})

    @classmethod
    def monomial(cls, nvars, cutoff, exps, coeff=1):
        return cls(nvars, cutoff, {tuple(exps): coeff})

    # inspection

    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return MappingProxyType(self._terms)

    def items(self):
        """Terms in graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))

    def coefficient(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def order(self):
        """Lowest total degree present, or None for the zero series."""
        return min((sum(e) for e in self._terms), default=None)

    def degree(self):
        return max((sum(e) for e in self._terms), default=None)

    def homogeneous(self, d: int) -> TruncSeries:
        return TruncSeries._raw(self.nvars, self.cutoff, {e: c for e, c in self._terms.items() if sum(e) == d})

    def truncate(self, cutoff: int) -> TruncSeries:
        """Drop everything above ``cutoff`` and lower the stored cutoff to it."""
        if cutoff > self.cutoff:
            raise ValueError(f"cannot truncate cutoff {self.cutoff} series at higher order {cutoff}")
        return TruncSeries._raw(self.nvars, cutoff, {e: c for e, c in self._terms.items() if sum(e) <= cutoff})

    def extend(self, cutoff: int) -> TruncSeries:
        """Raise the cutoff, reading the stored terms as an exact polynomial."""
        if cutoff < self.cutoff:
            raise ValueError("extend() cannot lower the cutoff; use truncate()")
        return TruncSeries._raw(self.nvars, cutoff, dict(self._terms))

    def with_cutoff(self, cutoff: int) -> TruncSeries:
        return self.truncate(cutoff) if cutoff <= self.cutoff else self.extend(cutoff)

    # arithmetic

    def _check(self, other):
        if self.nvars != other.nvars or self.cutoff != other.cutoff:
            raise DimensionMismatchError(
                f"series shapes differ: (nvars={self.nvars}, cutoff={self.cutoff}) "
                f"vs (nvars={other.nvars}, cutoff={other.cutoff})"
            )

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return TruncSeries.constant(self.nvars, self.cutoff, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return TruncSeries._raw(self.nvars, self.cutoff, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.nvars, self.cutoff, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> TruncSeries:
        factor = Fraction(factor)
        if not factor:
            return TruncSeries.zero(self.nvars, self.cutoff)
        return TruncSeries._raw(self.nvars, self.cutoff, {e: c * factor for e, c in self._terms.items()})

    def shift(self, exps, coeff=1) -> TruncSeries:
        """Multiply by the monomial ``coeff * y**exps``."""
        coeff = Fraction(coeff)
        dm = sum(exps)
        out = {}
        if coeff:
            for e, c in self._terms.items():
                if sum(e) + dm <= self.cutoff:
                    out[tuple(a + b for a, b in zip(e, exps))] = c * coeff
        return TruncSeries._raw(self.nvars, self.cutoff, out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        if len(other._terms) == 1:
            (e, c), = other._terms.items()
            return self.shift(e, c)
        if len(self._terms) == 1:
            (e, c), = self._terms.items()
            return other.shift(e, c)
        return TruncSeries._raw(self.nvars, self.cutoff, kernels.mul_terms(self._terms, other._terms, self.nvars, self.cutoff))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = TruncSeries.constant(self.nvars, self.cutoff, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.nvars == other.nvars and self.cutoff == other.cutoff and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == TruncSeries.constant(self.nvars, self.cutoff, other)._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, self.cutoff, frozenset(self._terms.items())))

    # calculus and evaluation

    def derive(self, var: int) -> TruncSeries:
        """Formal partial derivative; keeps the cutoff, so the top degree is incomplete."""
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable index {var} out of range for {self.nvars} variables")
        out = {}
        for e, c in self._terms.items():
            k = e[var]
            if k:
                e2 = list(e)
                e2[var] = k - 1
                out[tuple(e2)] = c * k
        return TruncSeries._raw(self.nvars, self.cutoff, out)

    def evaluate(self, point) -> Fraction:
        point = [Fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x**k
            total += v
        return total

    def drop_variables(self, variables) -> TruncSeries:
        """Set the given variables to zero."""
        vs = set(variables)
        return TruncSeries._raw(
            self.nvars, self.cutoff, {e: c for e, c in self._terms.items() if not any(e[i] for i in vs)}
        )

    # serialization

    def to_text(self) -> str:
        """One ``e1,...,en : p/q`` line per term, graded-lex order, LF terminated."""
        return "".join(f"{','.join(map(str, e))} : {c}\n" for e, c in self.items())

    @classmethod
    def from_text(cls, text: str, nvars: int, cutoff: int) -> TruncSeries:
        terms = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            lhs, sep, rhs = line.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: missing ':'")
            exps = tuple(int(x) for x in lhs.split(",")) if lhs.strip() else ()
            if exps in terms:
                raise ValueError(f"line {lineno}: duplicate multi-index {exps}")
            terms[exps] = parse_ratio(rhs)
        return cls(nvars, cutoff, terms)

    def __repr__(self):
        return f"TruncSeries(nvars={self.nvars}, cutoff={self.cutoff}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = ["y"] if self.nvars == 1 else [f"y{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.items():
            mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# higher-level operations


def series_arith(a: TruncSeries, b, op: str) -> TruncSeries:
    """``op`` is one of ``add``, ``mul`` or ``scalar_mul`` (``b`` a rational)."""
    if op == "add":
        if isinstance(b, TruncSeries):
            a._check(b)
        return a + b
    if op == "mul":
        if isinstance(b, TruncSeries):
            a._check(b)
        return a * b
    if op == "scalar_mul":
        return a.scale(b)
    raise ValueError(f"unknown series operation {op!r}")


def _horner(coeffs, x: TruncSeries) -> TruncSeries:
    """sum_n coeffs[n] * x**n for x without constant term."""
    result = TruncSeries.zero(x.nvars, x.cutoff)
    for c in reversed(coeffs):
        result = result * x + c
    return result


def _iroot(n: int, q: int):
    """Exact integer q-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = 1 << ((n.bit_length() + q - 1) // q)
    while True:
        nxt = ((q - 1) * r + n // r ** (q - 1)) // q
        if nxt >= r:
            break
        r = nxt
    return r if r**q == n else None


def _rational_root(c: Fraction, q: int):
    if c < 0 and q % 2 == 0:
        return None
    num = _iroot(abs(c.numerator), q)
    den = _iroot(c.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(-num if c < 0 else num, den)


def rational_power(a: TruncSeries, alpha) -> TruncSeries:
    """``a**alpha`` for rational alpha via the binomial series around the constant term."""
    alpha = Fraction(alpha)
    c0 = a.constant_term
    if not c0:
        raise DomainError("rational power needs a nonzero constant term")
    root = _rational_root(c0, alpha.denominator)
    if root is None:
        raise DomainError(f"constant term {c0} has no rational {alpha.denominator}-th root")
    lead = root**alpha.numerator
    u = a.scale(1 / c0) - 1
    coeffs = [Fraction(1)]
    for n in range(1, a.cutoff + 1):
        coeffs.append(coeffs[-1] * (alpha - n + 1) / n)
    return _horner(coeffs, u).scale(lead)


def series_transcendental(a: TruncSeries, kind: str) -> TruncSeries:
    """Formal ``log1p_of``, ``exp``, ``inverse``, ``inv_sqrt`` (and ``sqrt``) of a series."""
    k = a.cutoff
    if kind in ("log1p_of", "exp"):
        if a.constant_term:
            raise DomainError(f"{kind} requires a zero constant term, got {a.constant_term}")
        if kind == "log1p_of":
            coeffs = [Fraction(0)] + [Fraction((-1) ** (n + 1), n) for n in range(1, k + 1)]
        else:
            coeffs = [Fraction(1)]
            for n in range(1, k + 1):
                coeffs.append(coeffs[-1] / n)
        return _horner(coeffs, a)
    if kind == "inverse":
        c0 = a.constant_term
        if not c0:
            raise DomainError("inverse requires an invertible constant term")
        u = a.scale(1 / c0) - 1
        return _horner([Fraction((-1) ** n) for n in range(k + 1)], u).scale(1 / c0)
    if kind == "inv_sqrt":
        return rational_power(a, Fraction(-1, 2))
    if kind == "sqrt":
        return rational_power(a, Fraction(1, 2))
    raise ValueError(f"unknown transcendental kind {kind!r}")


def series_substitute(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    """Compose a univariate ``outer`` with ``inner`` (which must vanish at the origin).

    The result is exact up to ``min(outer.cutoff, inner.cutoff)``, which is
    the returned cutoff.
    """
    if outer.nvars != 1:
        raise DimensionMismatchError("outer series must be univariate")
    if inner.constant_term:
        raise DomainError(f"inner series must have zero constant term, got {inner.constant_term}")
    k = min(outer.cutoff, inner.cutoff)
    x = inner.truncate(k)
    coeffs = [outer.coefficient((n,)) for n in range(k + 1)]
    return _horner(coeffs, x)


def series_derive(a: TruncSeries, var: int) -> TruncSeries:
    return a.derive(var)


def norm_squared(nvars: int, cutoff: int) -> TruncSeries:
    """|y|^2 = sum_i y_i^2."""
    terms = {}
    for i in range(nvars):
        e = [0] * nvars
        e[i] = 2
        terms[tuple(e)] = 1
    return TruncSeries(nvars, cutoff, terms)
