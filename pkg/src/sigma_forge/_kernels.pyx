# cython: language_level=3
"""Compiled twin of ``_kernels_py``; keep the two in lock step."""
from fractions import Fraction
from math import gcd, lcm

from libc.stdlib cimport free, malloc

BACKEND = "cython"


cdef inline object _pack(exps, long long base):
    cdef object key = 0
    for e in exps:
        key = key * base + e
    return key


cdef tuple _unpack(long long key, long long base, int nvars):
    cdef list out = [0] * nvars
    cdef int i
    for i in range(nvars - 1, -1, -1):
        out[i] = key % base
        key //= base
    return tuple(out)


cdef tuple _integerize(dict terms, long long base):
    cdef object den = 1
    for c in terms.values():
        den = lcm(den, c.denominator)
    cdef list packed = []
    for exps, c in terms.items():
        packed.append((sum(exps), _pack(exps, base), c.numerator * (den // c.denominator)))
    packed.sort()
    return packed, den


def _fits(int nvars, long long base):
    # packed keys must stay below 2**62 for the C accumulator
    cdef object limit = 1 << 62
    return base ** nvars < limit


def mul_terms(dict a, dict b, int nvars, int cutoff):
    """Product of two term maps truncated at ``cutoff`` (see ``_kernels_py``)."""
    if not a or not b:
        return {}
    cdef long long base = cutoff + 1
    if not _fits(nvars, base):
        from sigma_forge import _kernels_py
        return _kernels_py.mul_terms(a, b, nvars, cutoff)
    pa, da = _integerize(a, base)
    pb, db = _integerize(b, base)
    cdef Py_ssize_t na = len(pa), nb = len(pb), i, j
    cdef long long *ka = <long long *> malloc(na * sizeof(long long))
    cdef long long *kb = <long long *> malloc(nb * sizeof(long long))
    cdef int *dga = <int *> malloc(na * sizeof(int))
    cdef int *dgb = <int *> malloc(nb * sizeof(int))
    cdef list ca = [None] * na
    cdef list cb = [None] * nb
    cdef dict acc = {}
    cdef long long k
    cdef int room
    cdef object prev
    try:
        for i in range(na):
            dga[i] = pa[i][0]
            ka[i] = pa[i][1]
            ca[i] = pa[i][2]
        for j in range(nb):
            dgb[j] = pb[j][0]
            kb[j] = pb[j][1]
            cb[j] = pb[j][2]
        for i in range(na):
            room = cutoff - dga[i]
            if room < 0:
                break
            for j in range(nb):
                if dgb[j] > room:
                    break
                k = ka[i] + kb[j]
                prev = acc.get(k)
                if prev is None:
                    acc[k] = ca[i] * cb[j]
                else:
                    acc[k] = prev + ca[i] * cb[j]
    finally:
        free(ka)
        free(kb)
        free(dga)
        free(dgb)
    den = da * db
    cdef dict out = {}
    for key, v in acc.items():
        if v:
            out[_unpack(key, base, nvars)] = Fraction(v, den)
    return out


cdef dict _primitive(dict row):
    cdef object g = 0
    for v in row.values():
        g = gcd(g, v)
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


cdef dict _combine(dict row, dict prow, long long c):
    a = row[c]
    b = prow[c]
    g = gcd(a, b)
    fa = b // g
    fb = a // g
    cdef dict new = {}
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
    return new


def reduce_row(row, dict pivots):
    """Reduce an integer row against echelon pivots; returns the primitive remainder."""
    cdef dict r = {k: v for k, v in row.items() if v}
    cdef dict prow
    while r:
        c = min(r)
        prow = pivots.get(c)
        if prow is None:
            return _primitive(r)
        r = _combine(r, prow, c)
    return r


def echelon(rows):
    """Fraction-free sparse echelon form (see ``_kernels_py.echelon``)."""
    cdef dict pivots = {}
    cdef dict r
    for row in rows:
        r = reduce_row(row, pivots)
        if r:
            pivots[min(r)] = r
    return pivots


def back_substitute(dict pivots):
    """Clear every pivot column from the other pivot rows (reduced echelon form)."""
    cdef list cols = sorted(pivots)
    cdef dict out = dict(pivots)
    cdef dict prow, row
    for c in reversed(cols):
        prow = out[c]
        for c2 in cols:
            if c2 >= c:
                break
            row = out[c2]
            if not row.get(c):
                continue
            out[c2] = _primitive(_combine(row, prow, c))
    return out
