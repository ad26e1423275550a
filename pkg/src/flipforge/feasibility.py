"""Exact rational linear feasibility.

Systems are lists of rows ``(coeffs, rhs)`` meaning ``sum(c * x) >= rhs``
over free variables.  Two independent solvers are provided: a dense
phase-I simplex (the workhorse) and Fourier-Motzkin elimination (an
oracle for small systems).  Both return an exact witness or None.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Row = Tuple[Sequence[Fraction], Fraction]


def solve_feasibility_simplex(rows: Sequence[Row], nvars: int) -> Optional[List[Fraction]]:
    """Phase-I simplex with Bland's rule over exact rationals.

    Free variables are split into positive and negative parts, each
    inequality gets a surplus variable, and an artificial basis is driven
    to zero.  Returns a satisfying assignment or None.
    """
    m = len(rows)
    if m == 0:
        return [Fraction(0)] * nvars
    # normalize rows to rhs >= 0 so the artificial start is basic feasible
    norm = []
    for coeffs, rhs in rows:
        coeffs = [Fraction(c) for c in coeffs]
        rhs = Fraction(rhs)
        if rhs < 0:
            # sum c x >= rhs with rhs < 0: rewrite as -sum c x <= -rhs, i.e.
            # keep orientation by flipping the surplus sign instead; easiest
            # is to multiply by -1 which flips to <=, so encode via slack
            norm.append(([-c for c in coeffs], -rhs, +1))
        else:
            norm.append((coeffs, rhs, -1))
    ncols = 2 * nvars + m + m  # u, w, slack/surplus, artificial
    tableau = []
    for i, (coeffs, rhs, slack_sign) in enumerate(norm):
        row = [Fraction(0)] * (ncols + 1)
        for j, c in enumerate(coeffs):
            row[j] = c
            row[nvars + j] = -c
        row[2 * nvars + i] = Fraction(slack_sign)
        row[2 * nvars + m + i] = Fraction(1)
        row[ncols] = rhs
        tableau.append(row)
    basis = [2 * nvars + m + i for i in range(m)]

    def reduced_costs():
        z = [Fraction(0)] * ncols
        for j in range(ncols):
            cj = Fraction(1) if j >= 2 * nvars + m else Fraction(0)
            acc = Fraction(0)
            for i in range(m):
                if basis[i] >= 2 * nvars + m:
                    acc += tableau[i][j]
            z[j] = cj - acc
        return z

    while True:
        z = reduced_costs()
        enter = next((j for j in range(ncols) if z[j] < 0), None)
        if enter is None:
            break
        pivot_row = None
        best = None
        for i in range(m):
            if tableau[i][enter] > 0:
                ratio = tableau[i][ncols] / tableau[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[pivot_row]):
                    best = ratio
                    pivot_row = i
        if pivot_row is None:
            # phase-I objective never unbounded below; defensive
            return None
        piv = tableau[pivot_row][enter]
        tableau[pivot_row] = [v / piv for v in tableau[pivot_row]]
        for i in range(m):
            if i != pivot_row and tableau[i][enter] != 0:
                factor = tableau[i][enter]
                tableau[i] = [
                    v - factor * pv for v, pv in zip(tableau[i], tableau[pivot_row])
                ]
        basis[pivot_row] = enter

    objective = sum(
        tableau[i][ncols] for i in range(m) if basis[i] >= 2 * nvars + m
    )
    if objective != 0:
        return None
    values = [Fraction(0)] * ncols
    for i in range(m):
        values[basis[i]] = tableau[i][ncols]
    return [values[j] - values[nvars + j] for j in range(nvars)]


def _normalize_row(coeffs, rhs):
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None:
        return tuple(coeffs), rhs
    scale = abs(lead)
    return tuple(c / scale for c in coeffs), rhs / scale


def solve_feasibility_fm(rows: Sequence[Row], nvars: int) -> Optional[List[Fraction]]:
    """Fourier-Motzkin elimination with back-substituted witness.

    Meant for small systems (the constraint count can square with each
    eliminated variable); used as an independent oracle against the
    simplex solver.
    """
    system = [([Fraction(c) for c in coeffs], Fraction(rhs)) for coeffs, rhs in rows]
    stages = []
    for k in range(nvars):
        stages.append((k, [(list(c), r) for c, r in system]))
        pos = [(c, r) for c, r in system if c[k] > 0]
        neg = [(c, r) for c, r in system if c[k] < 0]
        zero = [(c, r) for c, r in system if c[k] == 0]
        new = {}
        for c, r in zero:
            key = _normalize_row(c, r)
            new[key] = (c, r)
        for cp, rp in pos:
            for cq, rq in neg:
                coeffs = [cp[k] * cq[j] - cq[k] * cp[j] for j in range(nvars)]
                rhs = cp[k] * rq - cq[k] * rp
                key = _normalize_row(coeffs, rhs)
                new[key] = (coeffs, rhs)
        system = list(new.values())
    for c, r in system:
        if r > 0:
            return None
    values: List[Optional[Fraction]] = [None] * nvars
    for k, sys_rows in reversed(stages):
        lo, hi = None, None
        for c, r in sys_rows:
            if c[k] == 0:
                continue
            rest = sum(
                cj * values[j]
                for j, cj in enumerate(c)
                if j != k and cj != 0
            )
            bound = (r - rest) / c[k]
            if c[k] > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        if lo is not None and hi is not None:
            if lo > hi:
                return None
            values[k] = (lo + hi) / 2
        elif lo is not None:
            values[k] = lo + 1
        elif hi is not None:
            values[k] = hi - 1
        else:
            values[k] = Fraction(0)
    out = [v if v is not None else Fraction(0) for v in values]
    for coeffs, rhs in rows:
        total = sum(Fraction(c) * out[j] for j, c in enumerate(coeffs))
        if total < rhs:
            return None
    return out
