"""Formal power series in ℏ with series-valued coefficients."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from sigma_forge.algebra.series import TruncSeries
from sigma_forge.errors import DimensionMismatchError


class HbarSeries:
    """``sum_{h <= hbar_cutoff} hbar**h * payload[h]``.

    Payloads are usually :class:`TruncSeries` sharing ``nvars`` and
    ``cutoff``; any payload type with ``+``, ``*`` and ``scale`` works.
    ℏ is purely formal and never evaluated.
    """

    __slots__ = ("hbar_cutoff", "coefficients")

    def __init__(self, hbar_cutoff: int, coefficients: Sequence):
        coefficients = list(coefficients)
        if hbar_cutoff < 0:
            raise ValueError("hbar_cutoff must be non-negative")
        if not coefficients:
            raise ValueError("at least the hbar^0 payload is required")
        if len(coefficients) > hbar_cutoff + 1:
            coefficients = coefficients[: hbar_cutoff + 1]
        first = coefficients[0]
        if isinstance(first, TruncSeries):
            for c in coefficients[1:]:
                if (c.nvars, c.cutoff) != (first.nvars, first.cutoff):
                    raise DimensionMismatchError("all hbar payloads must share nvars and cutoff")
        while len(coefficients) < hbar_cutoff + 1:
            coefficients.append(first * 0)
        self.hbar_cutoff = hbar_cutoff
        self.coefficients = tuple(coefficients)

    @classmethod
    def from_payload(cls, payload, hbar_cutoff: int, power: int = 0):
        zero = payload * 0
        coeffs = [zero] * (hbar_cutoff + 1)
        if power <= hbar_cutoff:
            coeffs[power] = payload
        return cls(hbar_cutoff, coeffs)

    def __getitem__(self, h):
        return self.coefficients[h]

    def __len__(self):
        return len(self.coefficients)

    def _check(self, other):
        if not isinstance(other, HbarSeries) or other.hbar_cutoff != self.hbar_cutoff:
            raise DimensionMismatchError("hbar series must share hbar_cutoff")

    def __add__(self, other):
        self._check(other)
        return HbarSeries(self.hbar_cutoff, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other):
        self._check(other)
        return HbarSeries(self.hbar_cutoff, [a - b for a, b in zip(self.coefficients, other.coefficients)])

    def __neg__(self):
        return HbarSeries(self.hbar_cutoff, [-a for a in self.coefficients])

    def scale(self, factor):
        factor = Fraction(factor)
        return HbarSeries(self.hbar_cutoff, [a * factor for a in self.coefficients])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out = []
        for h in range(self.hbar_cutoff + 1):
            acc = self.coefficients[0] * other.coefficients[h]
            for i in range(1, h + 1):
                acc = acc + self.coefficients[i] * other.coefficients[h - i]
            out.append(acc)
        return HbarSeries(self.hbar_cutoff, out)

    __rmul__ = scale

    def shift(self, powers: int = 1):
        """Multiply by ``hbar**powers`` (dropping what leaves the window)."""
        zero = self.coefficients[0] * 0
        return HbarSeries(self.hbar_cutoff, [zero] * powers + list(self.coefficients[: len(self) - powers]))

    def map(self, fn: Callable):
        return HbarSeries(self.hbar_cutoff, [fn(c) for c in self.coefficients])

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self.hbar_cutoff == other.hbar_cutoff and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.hbar_cutoff, self.coefficients))

    def is_zero(self):
        return all(c.is_zero() for c in self.coefficients)

    def __repr__(self):
        parts = [f"hbar^{h}: {c}" for h, c in enumerate(self.coefficients) if not c.is_zero()]
        return f"HbarSeries({', '.join(parts) or '0'})"
