"""Pure-Python hot loops: sparse truncated products and integer row reduction.

This module is the reference implementation; ``_kernels.pyx`` mirrors it
function for function and must return identical results.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

BACKEND = "python"


def _pack(exps, base):
    key = 0
    for e in exps:
        key = key * base + e
    return key


def _unpack(key, base, nvars):
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        key, out[i] = divmod(key, base)
    return tuple(out)


def _integerize(terms, base):
    """Packed keys, degrees and integer numerators over a common denominator."""
    den = 1
    for c in terms.values():
        den = lcm(den, c.denominator)
    packed = []
    for exps, c in terms.items():
        packed.append((sum(exps), _pack(exps, base), c.numerator * (den // c.denominator)))
    packed.sort()
    return packed, den


def mul_terms(a, b, nvars, cutoff):
    """Product of two term maps, dropping every monomial above ``cutoff``.

    Coefficients are accumulated as integers over the product of the two
    common denominators and normalized once per output monomial.
    """
    if not a or not b:
        return {}
    base = cutoff + 1
    pa, da = _integerize(a, base)
    pb, db = _integerize(b, base)
    acc = {}
    for dga, ka, ca in pa:
        room = cutoff - dga
        if room < 0:
            break
        for dgb, kb, cb in pb:
            if dgb > room:
                break
            k = ka + kb
            acc[k] = acc.get(k, 0) + ca * cb
    den = da * db
    out = {}
    for k, v in acc.items():
        if v:
            out[_unpack(k, base, nvars)] = Fraction(v, den)
    return out


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def reduce_row(row, pivots):
    """Reduce an integer row against echelon pivots; returns the primitive remainder."""
    row = {k: v for k, v in row.items() if v}
    while row:
        c = min(row)
        prow = pivots.get(c)
        if prow is None:
            return _primitive(row)
        a = row[c]
        b = prow[c]
        g = gcd(a, b)
        fa = b // g
        fb = a // g
        new = {}
        for k, v in row.items():
            if k != c:
                new[k] = v * fa
        for k, v in prow.items():
            if k == c:
                continue
            x = new.get(k, 0) - fb * v
            if x:
                new[k] = x
            else:
                new.pop(k, None)
        row = new
    return row


def echelon(rows):
    """Fraction-free sparse echelon form; rows are processed in the given order.

    Returns ``{pivot_column: primitive_row}`` where each row's smallest column
    is its pivot and the pivot entry is positive.
    """
    pivots = {}
    for row in rows:
        r = reduce_row(row, pivots)
        if r:
            pivots[min(r)] = r
    return pivots


def back_substitute(pivots):
    """Clear every pivot column from the other pivot rows (reduced echelon form)."""
    cols = sorted(pivots)
    out = dict(pivots)
    for c in reversed(cols):
        prow = out[c]
        b = prow[c]
        for c2 in cols:
            if c2 >= c:
                break
            row = out[c2]
            a = row.get(c)
            if not a:
                continue
            g = gcd(a, b)
            fa = b // g
            fb = a // g
            new = {}
            for k, v in row.items():
                if k != c:
                    new[k] = v * fa
            for k, v in prow.items():
                if k == c:
                    continue
                x = new.get(k, 0) - fb * v
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            out[c2] = _primitive(new)
    return out
