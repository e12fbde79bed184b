"""Small exact linear algebra over the rationals.

Everything here operates on lists of lists of Fraction and is meant for the
modest systems that show up when matching coefficients degree by degree;
nothing is optimized beyond plain Gaussian elimination.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def rational_sqrt(q):
    """Exact square root of a nonnegative rational, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def rref(rows):
    """Reduced row echelon form.  Returns (new_rows, pivot_columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(rows, ncols=None):
    """Basis of the right kernel of the matrix, as lists of Fraction."""
    if ncols is None:
        if not rows:
            raise ValueError("need ncols for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        basis = []
        for j in range(ncols):
            v = [Fraction(0)] * ncols
            v[j] = Fraction(1)
            basis.append(v)
        return basis
    m, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def solve(rows, rhs):
    """One solution of A x = b, or None if inconsistent.

    Free coordinates are set to zero, so the answer is deterministic.
    """
    if not rows:
        return None if any(rhs) else []
    ncols = len(rows[0])
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    for r in range(len(m)):
        if m[r][-1] and not any(m[r][:-1]):
            return None
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][-1]
    return x


def expand_filtered(target, candidates, cap):
    """Write ``target`` as an exact combination of ``candidates``, level by level.

    Both sides live in the same universe and are handled through completion
    order ``cap``: at each level d we match the order-d terms of the running
    remainder against the order-d leading terms of the candidates whose
    minimal order is d, subtract the chosen combination in full, and move on.
    Returns a list of coefficients aligned with ``candidates`` or None if the
    remainder fails to vanish through order cap.

    This is sound whenever the candidates are "triangular" in the sense that
    a combination whose order-d leading parts cancel has all its leading
    orders > d -- which holds for the generator-monomial families used here.
    """
    alg = target.alg
    by_level = {}
    for idx, c in enumerate(candidates):
        d = c.eff_deg()
        if d is None:
            continue
        by_level.setdefault(d, []).append(idx)
    coeffs = [Fraction(0)] * len(candidates)
    rem = target.truncate(cap)
    for d in range(0, cap + 1):
        idxs = by_level.get(d, [])
        rem_d = rem.eff_component(d)
        if not idxs:
            if not rem_d.is_zero():
                return None
            continue
        monos = set(rem_d.terms)
        lead = [candidates[i].eff_component(d) for i in idxs]
        for L in lead:
            monos.update(L.terms)
        monos = sorted(monos)
        if not monos:
            continue
        rows = [[L.coeff(m) for L in lead] for m in monos]
        rhs = [rem_d.coeff(m) for m in monos]
        sol = solve(rows, rhs)
        if sol is None:
            return None
        for i, x in zip(idxs, sol):
            if x:
                coeffs[i] = x
                rem = rem - candidates[i].truncate(cap) * x
    if not rem.is_zero():
        return None
    return coeffs
