"""Independent naive oracles used to cross-check the library.

Everything here is deliberately written the dumb way: full enumeration with
itertools, exact rational arithmetic, no pruning, no shared code with the
package internals.  Only usable at tiny sizes.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np


def matching_value_by_enumeration(edges, weights):
    """Max-weight matching by trying every subset of edges."""
    m = len(edges)
    best = 0
    for r in range(m + 1):
        for combo in combinations(range(m), r):
            seen = set()
            ok = True
            for idx in combo:
                u, v = edges[idx]
                if u in seen or v in seen:
                    ok = False
                    break
                seen.add(u)
                seen.add(v)
            if ok:
                best = max(best, sum(weights[i] for i in combo))
    return best


def set_packing_value_by_enumeration(sets, weights):
    """Max-weight disjoint sub-collection by trying every subset."""
    m = len(sets)
    best = 0
    for r in range(m + 1):
        for combo in combinations(range(m), r):
            union = set()
            ok = True
            for idx in combo:
                s = set(sets[idx])
                if union & s:
                    ok = False
                    break
                union |= s
            if ok:
                best = max(best, sum(weights[i] for i in combo))
    return best


def packing_value_by_enumeration(A, b, weights):
    """Exact 0/1 packing optimum by trying all 2^m vectors."""
    A = np.asarray(A)
    b = np.asarray(b)
    m = A.shape[1]
    best = 0
    for mask in range(1 << m):
        x = np.array([(mask >> j) & 1 for j in range(m)])
        if np.all(A @ x <= b):
            best = max(best, int(np.dot(weights, x)))
    return best


def independent_set_value_by_enumeration(matroid, weights):
    """Max-weight independent set by trying every subset of the ground set."""
    best = 0
    for mask in range(1 << matroid.m):
        subset = [e for e in range(matroid.m) if (mask >> e) & 1]
        if matroid.independent(subset):
            best = max(best, sum(weights[e] for e in subset))
    return best


def lp_value_by_vertex_enumeration(A, b, c):
    """Exact LP optimum of max{c.x : Ax <= b, 0 <= x <= 1} over all vertices.

    Enumerates every choice of m tight constraints among the rows and the box
    facets, solves the square rational system, and keeps feasible points.
    x = 0 is always feasible, so the running best starts at zero.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    c = np.asarray(c)
    n, m = A.shape
    rows = [([Fraction(int(v)) for v in A[i]], Fraction(int(b[i]))) for i in range(n)]
    for j in range(m):
        unit = [Fraction(0)] * m
        unit[j] = Fraction(1)
        rows.append((unit, Fraction(0)))
        rows.append((unit, Fraction(1)))
    best = Fraction(0)
    for combo in combinations(range(len(rows)), m):
        point = _solve_square([rows[i] for i in combo], m)
        if point is None:
            continue
        if any(v < 0 or v > 1 for v in point):
            continue
        feasible = True
        for i in range(n):
            total = sum(Fraction(int(A[i][j])) * point[j] for j in range(m))
            if total > b[i]:
                feasible = False
                break
        if feasible:
            value = sum(Fraction(int(c[j])) * point[j] for j in range(m))
            best = max(best, value)
    return best


def _solve_square(system, m):
    mat = [list(coeffs) + [rhs] for coeffs, rhs in system]
    for col in range(m):
        pivot_row = None
        for r in range(col, m):
            if mat[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            return None  # singular
        mat[col], mat[pivot_row] = mat[pivot_row], mat[col]
        piv = mat[col][col]
        mat[col] = [v / piv for v in mat[col]]
        for r in range(m):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * bb for a, bb in zip(mat[r], mat[col])]
    return [mat[j][m] for j in range(m)]


def count_vectors_under_cap(n, cap):
    """Stars and bars: number of y in Z+^n with sum(y) <= cap."""
    import math

    return math.comb(n + cap, cap)
