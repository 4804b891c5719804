"""Fraction-free sparse elimination over the integers.

Rows are dicts ``col -> int``.  Everything here is exact; this module is
the reference implementation and the fallback when the compiled kernel is
unavailable.
"""
from fractions import Fraction
from math import gcd

BACKEND = "python"


def _content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def _normalize(row, lead):
    g = _content(row)
    if row[lead] < 0:
        g = -g
    if g != 1:
        for k in row:
            row[k] //= g
    return row


def echelon(rows, ncols, reverse=False):
    """Integer row echelon form.

    Returns a dict ``pivot column -> row``.  ``reverse`` picks the largest
    column as the leading entry, which gives a second, independent pivot
    order used by the consistency tests.
    """
    pick = max if reverse else min
    pivots = {}
    for src in rows:
        row = {k: v for k, v in src.items() if v}
        while row:
            lead = pick(row)
            prow = pivots.get(lead)
            if prow is None:
                pivots[lead] = _normalize(row, lead)
                break
            a = prow[lead]
            b = row[lead]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {}
            for k, v in row.items():
                new[k] = a * v
            for k, v in prow.items():
                w = new.get(k, 0) - b * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            row = new
            if row:
                _normalize(row, pick(row))
        if len(pivots) == ncols:
            break
    return pivots


def _reduce(pivots, reverse=False):
    # back-substitution: clear every pivot column from the other pivot rows
    order = sorted(pivots, reverse=not reverse)
    done = {}
    for pc in order:
        row = dict(pivots[pc])
        for qc in list(row):
            if qc == pc or qc not in done:
                continue
            c = row.get(qc)
            if not c:
                continue
            qrow = done[qc]
            a = qrow[qc]
            g = gcd(a, c)
            sa, sc = a // g, c // g
            new = {k: sa * v for k, v in row.items()}
            for k, v in qrow.items():
                w = new.get(k, 0) - sc * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            row = new
        done[pc] = _normalize(row, pc)
    return done


def kernel_from_pivots(pivots, ncols, reverse=False):
    red = _reduce(pivots, reverse)
    free = [j for j in range(ncols) if j not in red]
    basis = []
    for j in free:
        v = {j: Fraction(1)}
        for pc, row in red.items():
            c = row.get(j)
            if c:
                v[pc] = Fraction(-c, row[pc])
        basis.append(v)
    return basis


def rank(rows, ncols):
    return len(echelon(rows, ncols))


def rank_and_kernel(rows, ncols, reverse=False):
    piv = echelon(rows, ncols, reverse)
    return len(piv), kernel_from_pivots(piv, ncols, reverse)
