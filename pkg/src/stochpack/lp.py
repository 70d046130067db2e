"""Exact-at-desk-scale LP solving for max{c.x : Ax <= b, 0 <= x <= 1}.

The engine is a dense bounded-variable primal simplex with least-index
(Bland) pivoting, so runs are deterministic and never cycle.  Two arithmetic
backends share the same pivoting logic: ``float`` works on numpy tableaus,
``rational`` works on ``fractions.Fraction`` and is exact (arbitrary
precision, so there is no overflow to degrade to).

Row duals are read off the final basis (the reduced costs of the slack
columns); an independent route that solves the explicit covering dual is
provided as a cross-check.  Problems whose constraint count dwarfs the
variable count (blossom-augmented matchings) are automatically solved through
that covering form, with the primal vertex recovered from its duals.

Solver state is per-call; problems are immutable and shareable across
threads.  Feasibility comparisons use ``FEAS_TOL``; duality-gap acceptance
uses ``GAP_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import PivotLimitError, StructureError

FEAS_TOL = 1e-9
GAP_TOL = 1e-6

_LOWER, _UPPER, _BASIC = 0, 1, 2


@dataclass(frozen=True, eq=False)
class LpProblem:
    """max objective.x subject to A x <= b and 0 <= x (<= 1 when explicit).

    When ``explicit_unit_bounds`` is false the unit box is assumed to be
    implied by the constraints themselves and the dual has row variables
    only; when true, each variable carries an explicit upper bound of one
    whose dual shows up as a reduced-cost component.
    """

    A: np.ndarray
    b: np.ndarray
    objective: np.ndarray
    explicit_unit_bounds: bool = False

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=np.float64)
        if A.ndim != 2:
            raise StructureError(f"A must be a matrix, got shape {A.shape}")
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        c = np.asarray(self.objective, dtype=np.float64).reshape(-1)
        if b.shape[0] != A.shape[0]:
            raise StructureError("b does not match the row count of A")
        if c.shape[0] != A.shape[1]:
            raise StructureError("objective does not match the column count of A")
        if c.size and c.min() < 0:
            raise StructureError("objective must be nonnegative")
        for arr in (A, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "objective", c)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True, eq=False)
class LpSolution:
    x: Sequence
    value: object
    basis: tuple
    is_vertex: bool
    arithmetic: str
    problem: LpProblem
    tableau_dump: Optional[str] = None


@dataclass(frozen=True, eq=False)
class DualSolution:
    y: Sequence
    bound_duals: Optional[Sequence]
    value: object
    arithmetic: str
    problem: LpProblem


@dataclass(frozen=True)
class DualityReport:
    ok: bool
    gap: object
    primal_feasible: bool
    dual_feasible: bool
    complementary: bool
    worst: str

    def __str__(self) -> str:
        head = "pass" if self.ok else "FAIL"
        return f"{head}: gap={self.gap}, worst={self.worst}"


# ---------------------------------------------------------------------------
# float backend
# ---------------------------------------------------------------------------


def _solve_float(A, b, c, upper, max_pivots=None):
    """Two-phase bounded simplex on numpy float64 tableaus.

    Returns a dict with the structural solution, basis, row duals, and the
    final reduced costs.  ``upper`` holds per-variable upper bounds with
    ``np.inf`` for free-above variables.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n, m = A.shape
    flip = b < 0
    sign = np.where(flip, -1.0, 1.0)
    art_rows = np.nonzero(flip)[0]
    n_art = art_rows.size
    total = m + n + n_art
    if max_pivots is None:
        max_pivots = 200 + 60 * (n + m)

    T = np.zeros((n, total))
    T[:, :m] = A * sign[:, None]
    T[np.arange(n), m + np.arange(n)] = sign
    for k, r in enumerate(art_rows):
        T[r, m + n + k] = 1.0
    rhs = (b * sign).astype(np.float64)
    ub = np.full(total, np.inf)
    ub[:m] = upper
    status = np.full(total, _LOWER, dtype=np.int8)
    basis = (m + np.arange(n)).astype(np.int64)
    for k, r in enumerate(art_rows):
        basis[r] = m + n + k
    status[basis] = _BASIC
    allowed = np.ones(total, dtype=bool)
    pivots = 0

    def compute_xb():
        up = np.nonzero(status == _UPPER)[0]
        if up.size:
            return rhs - T[:, up] @ ub[up]
        return rhs.copy()

    def pivot(r, j, z):
        piv = T[r, j]
        T[r] /= piv
        rhs[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        T[...] -= np.outer(col, T[r])
        rhs[...] -= col * rhs[r]
        z[...] -= z[j] * T[r]

    def run_phase(z):
        nonlocal pivots
        while True:
            cand = allowed & (
                ((status == _LOWER) & (z > FEAS_TOL))
                | ((status == _UPPER) & (z < -FEAS_TOL))
            )
            js = np.nonzero(cand)[0]
            if js.size == 0:
                return z
            pivots += 1
            if pivots > max_pivots:
                raise PivotLimitError(f"exceeded {max_pivots} pivots")
            j = int(js[0])
            sigma = 1.0 if status[j] == _LOWER else -1.0
            d = sigma * T[:, j]
            xb = compute_xb()
            ub_basis = ub[basis]
            ratios = np.full(n, np.inf)
            dec = d > FEAS_TOL
            ratios[dec] = np.maximum(xb[dec], 0.0) / d[dec]
            inc = (d < -FEAS_TOL) & np.isfinite(ub_basis)
            ratios[inc] = np.maximum(ub_basis[inc] - xb[inc], 0.0) / (-d[inc])
            rmin = ratios.min() if n else np.inf
            t_own = ub[j]
            if not np.isfinite(min(rmin, t_own)):
                raise StructureError("LP is unbounded")
            if t_own <= rmin:
                status[j] = _UPPER if status[j] == _LOWER else _LOWER
                continue
            tied = np.nonzero(ratios <= rmin + 1e-12 * max(1.0, rmin))[0]
            r = int(tied[np.argmin(basis[tied])])
            leave = int(basis[r])
            status[leave] = _LOWER if d[r] > 0 else _UPPER
            basis[r] = j
            status[j] = _BASIC
            pivot(r, j, z)

    if n_art:
        c1 = np.zeros(total)
        c1[m + n :] = -1.0
        z = c1 - c1[basis] @ T
        run_phase(z)
        xb = compute_xb()
        art_total = sum(xb[r] for r in range(n) if basis[r] >= m + n)
        if art_total > 1e-7:
            raise StructureError("LP is infeasible")
        for r in range(n):
            if basis[r] >= m + n:
                cols = np.nonzero(
                    (np.abs(T[r, : m + n]) > FEAS_TOL) & (status[: m + n] != _BASIC)
                )[0]
                if cols.size:
                    j = int(cols[0])
                    old = int(basis[r])
                    status[old] = _LOWER
                    basis[r] = j
                    status[j] = _BASIC
                    pivot(r, j, np.zeros(total))
        allowed[m + n :] = False

    c2 = np.zeros(total)
    c2[:m] = c
    z = c2 - c2[basis] @ T
    run_phase(z)

    xb = compute_xb()
    x = np.zeros(m)
    up = (status[:m] == _UPPER).nonzero()[0]
    x[up] = ub[up]
    for r in range(n):
        v = int(basis[r])
        if v < m:
            x[v] = xb[r]
    return {
        "x": x,
        "basis": tuple(int(v) for v in basis),
        "z": z,
        "status": status,
        "T": T,
        "rhs": rhs,
        "n": n,
        "m": m,
    }


# ---------------------------------------------------------------------------
# rational backend
# ---------------------------------------------------------------------------


def _solve_exact(A, b, c, upper, max_pivots=None):
    """Twin of :func:`_solve_float` over Fractions; comparisons are exact."""
    n = len(A)
    m = len(A[0]) if n else len(c)
    flip = [bi < 0 for bi in b]
    art_rows = [i for i in range(n) if flip[i]]
    n_art = len(art_rows)
    total = m + n + n_art
    if max_pivots is None:
        max_pivots = 200 + 60 * (n + m)
    zero, one = Fraction(0), Fraction(1)

    T = [[zero] * total for _ in range(n)]
    rhs = [zero] * n
    for i in range(n):
        s = -one if flip[i] else one
        for j in range(m):
            if A[i][j]:
                T[i][j] = s * A[i][j]
        T[i][m + i] = s
        rhs[i] = s * b[i]
    for k, r in enumerate(art_rows):
        T[r][m + n + k] = one
    ub: list[Optional[Fraction]] = list(upper) + [None] * (n + n_art)
    status = [_LOWER] * total
    basis = [m + i for i in range(n)]
    for k, r in enumerate(art_rows):
        basis[r] = m + n + k
    for v in basis:
        status[v] = _BASIC
    allowed = [True] * total
    pivots = 0

    def compute_xb():
        xb = list(rhs)
        for j in range(total):
            if status[j] == _UPPER:
                u = ub[j]
                for i in range(n):
                    if T[i][j]:
                        xb[i] -= T[i][j] * u
        return xb

    def pivot(r, j, z):
        piv = T[r][j]
        if piv != one:
            T[r] = [v / piv for v in T[r]]
            rhs[r] /= piv
        row = T[r]
        for i in range(n):
            if i == r:
                continue
            f = T[i][j]
            if f:
                Ti = T[i]
                for k in range(total):
                    if row[k]:
                        Ti[k] -= f * row[k]
                rhs[i] -= f * rhs[r]
        f = z[j]
        if f:
            for k in range(total):
                if row[k]:
                    z[k] -= f * row[k]

    def run_phase(z):
        nonlocal pivots
        while True:
            j = -1
            for k in range(total):
                if not allowed[k]:
                    continue
                if status[k] == _LOWER and z[k] > 0:
                    j = k
                    break
                if status[k] == _UPPER and z[k] < 0:
                    j = k
                    break
            if j < 0:
                return
            pivots += 1
            if pivots > max_pivots:
                raise PivotLimitError(f"exceeded {max_pivots} pivots")
            sigma = one if status[j] == _LOWER else -one
            xb = compute_xb()
            rmin: Optional[Fraction] = None
            r_best = -1
            for i in range(n):
                d = sigma * T[i][j]
                if d > 0:
                    ratio = max(xb[i], zero) / d
                elif d < 0:
                    u = ub[basis[i]]
                    if u is None:
                        continue
                    ratio = max(u - xb[i], zero) / (-d)
                else:
                    continue
                if rmin is None or ratio < rmin or (
                    ratio == rmin and basis[i] < basis[r_best]
                ):
                    rmin = ratio
                    r_best = i
            t_own = ub[j]
            if rmin is None and t_own is None:
                raise StructureError("LP is unbounded")
            if t_own is not None and (rmin is None or t_own <= rmin):
                status[j] = _UPPER if status[j] == _LOWER else _LOWER
                continue
            r = r_best
            leave = basis[r]
            status[leave] = _LOWER if sigma * T[r][j] > 0 else _UPPER
            basis[r] = j
            status[j] = _BASIC
            pivot(r, j, z)

    if n_art:
        z = [zero] * total
        c1b = {m + n + k: -one for k in range(n_art)}
        for j in range(total):
            acc = c1b.get(j, zero)
            for i in range(n):
                cb = c1b.get(basis[i], zero)
                if cb and T[i][j]:
                    acc -= cb * T[i][j]
            z[j] = acc
        run_phase(z)
        xb = compute_xb()
        art_total = sum(xb[r] for r in range(n) if basis[r] >= m + n)
        if art_total > 0:
            raise StructureError("LP is infeasible")
        for r in range(n):
            if basis[r] >= m + n:
                for j in range(m + n):
                    if T[r][j] != 0 and status[j] != _BASIC:
                        old = basis[r]
                        status[old] = _LOWER
                        basis[r] = j
                        status[j] = _BASIC
                        pivot(r, j, [zero] * total)
                        break
        for k in range(n_art):
            allowed[m + n + k] = False

    z = [zero] * total
    for j in range(total):
        acc = c[j] if j < m else zero
        for i in range(n):
            v = basis[i]
            cb = c[v] if v < m else zero
            if cb and T[i][j]:
                acc -= cb * T[i][j]
        z[j] = acc
    run_phase(z)
    # refresh reduced costs from the final basis so duals are exact
    zf = [zero] * total
    for j in range(total):
        acc = c[j] if j < m else zero
        for i in range(n):
            v = basis[i]
            cb = c[v] if v < m else zero
            if cb and T[i][j]:
                acc -= cb * T[i][j]
        zf[j] = acc

    xb = compute_xb()
    x = [zero] * m
    for j in range(m):
        if status[j] == _UPPER:
            x[j] = ub[j]
    for r in range(n):
        v = basis[r]
        if v < m:
            x[v] = xb[r]
    return {
        "x": x,
        "basis": tuple(basis),
        "z": zf,
        "status": status,
        "n": n,
        "m": m,
    }


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def _structural_upper(prob: LpProblem, arithmetic: str):
    if arithmetic == "float":
        return np.full(prob.m, 1.0) if prob.explicit_unit_bounds else np.full(
            prob.m, np.inf
        )
    one = Fraction(1)
    return [one] * prob.m if prob.explicit_unit_bounds else [None] * prob.m


def _exact_data(prob: LpProblem):
    A = [[Fraction(v) for v in row] for row in prob.A.tolist()]
    b = [Fraction(v) for v in prob.b.tolist()]
    c = [Fraction(v) for v in prob.objective.tolist()]
    return A, b, c


def _wants_dual_route(prob: LpProblem, route: str) -> bool:
    if route == "dual":
        return True
    if route == "primal":
        return False
    if route != "auto":
        raise StructureError(f"unknown route {route!r}")
    return prob.n > 300 and prob.n > 3 * prob.m


def solve_primal(
    prob: LpProblem,
    arithmetic: str = "float",
    perturbation_seed: Optional[int] = None,
    route: str = "auto",
    dump_tableau: bool = False,
) -> LpSolution:
    """Solve to an optimal basic feasible solution.

    Deterministic for fixed inputs.  ``perturbation_seed`` (float mode only)
    adds deterministic noise of size 1e-7 to the objective before pivoting to
    explore alternative optimal vertices; the reported value and duals are
    always taken against the unperturbed objective.
    """
    sol, _ = _solve_pair(prob, arithmetic, perturbation_seed, route, dump_tableau)
    return sol


def solve_dual(prob: LpProblem, arithmetic: str = "float") -> DualSolution:
    """Row duals extracted from the optimal basis of the primal solve."""
    _, dual = _solve_pair(prob, arithmetic, None, "auto", False)
    return dual


def _solve_pair(prob, arithmetic, perturbation_seed, route, dump_tableau):
    if arithmetic not in ("float", "rational"):
        raise StructureError(f"unknown arithmetic {arithmetic!r}")
    if _wants_dual_route(prob, route):
        return _solve_via_covering(prob, arithmetic)
    if arithmetic == "float":
        c_eff = prob.objective
        if perturbation_seed is not None:
            rng = np.random.default_rng(perturbation_seed)
            c_eff = prob.objective + 1e-7 * rng.random(prob.m)
        res = _solve_float(prob.A, prob.b, c_eff, _structural_upper(prob, "float"))
        if perturbation_seed is not None:
            # re-derive reduced costs for the original objective at this basis
            c2 = np.zeros(len(res["z"]))
            c2[: prob.m] = prob.objective
            res["z"] = c2 - c2[list(res["basis"])] @ res["T"]
        x = res["x"]
        value = float(prob.objective @ x)
        y = np.maximum(-res["z"][prob.m : prob.m + prob.n], 0.0)
        bound = None
        if prob.explicit_unit_bounds:
            bound = np.where(
                np.asarray(res["status"][: prob.m]) == _UPPER,
                np.maximum(res["z"][: prob.m], 0.0),
                0.0,
            )
        dval = float(y @ prob.b + (bound.sum() if bound is not None else 0.0))
        dump = _format_tableau(res) if dump_tableau else None
    else:
        if perturbation_seed is not None:
            raise StructureError("perturbation is a float-mode feature")
        A, b, c = _exact_data(prob)
        res = _solve_exact(A, b, c, _structural_upper(prob, "rational"))
        x = res["x"]
        value = sum(ci * xi for ci, xi in zip(c, x)) if x else Fraction(0)
        y = [max(-res["z"][prob.m + i], Fraction(0)) for i in range(prob.n)]
        bound = None
        if prob.explicit_unit_bounds:
            bound = [
                max(res["z"][j], Fraction(0))
                if res["status"][j] == _UPPER
                else Fraction(0)
                for j in range(prob.m)
            ]
        dval = sum(yi * bi for yi, bi in zip(y, b))
        if bound is not None:
            dval += sum(bound)
        dump = None
    sol = LpSolution(
        x=x,
        value=value,
        basis=res["basis"],
        is_vertex=True,
        arithmetic=arithmetic,
        problem=prob,
        tableau_dump=dump,
    )
    dual = DualSolution(
        y=y, bound_duals=bound, value=dval, arithmetic=arithmetic, problem=prob
    )
    return sol, dual


def _covering_data(prob: LpProblem):
    """The explicit dual as a max problem: variables (y, z), rows per item."""
    n, m = prob.n, prob.m
    if prob.explicit_unit_bounds:
        Ac = np.hstack([-prob.A.T, -np.eye(m)])
        cc = np.concatenate([-prob.b, -np.ones(m)])
    else:
        Ac = -prob.A.T
        cc = -prob.b
    bc = -prob.objective
    return Ac, bc, cc


def _solve_via_covering(prob: LpProblem, arithmetic: str):
    """Solve the covering dual and recover the primal vertex from its duals."""
    Ac, bc, cc = _covering_data(prob)
    n, m = prob.n, prob.m
    nvars = Ac.shape[1]
    if arithmetic == "float":
        res = _solve_float(Ac, bc, cc, np.full(nvars, np.inf))
        yz = res["x"]
        x = np.maximum(-res["z"][nvars : nvars + m], 0.0)
        y = yz[:n]
        bound = yz[n:] if prob.explicit_unit_bounds else None
        value = float(prob.objective @ x)
        dval = float(y @ prob.b + (bound.sum() if bound is not None else 0.0))
    else:
        A = [[Fraction(v) for v in row] for row in Ac.tolist()]
        b = [Fraction(v) for v in bc.tolist()]
        c = [Fraction(v) for v in cc.tolist()]
        res = _solve_exact(A, b, c, [None] * nvars)
        yz = res["x"]
        x = [max(-res["z"][nvars + j], Fraction(0)) for j in range(m)]
        y = yz[:n]
        bound = yz[n:] if prob.explicit_unit_bounds else None
        cobj = [Fraction(v) for v in prob.objective.tolist()]
        value = sum(ci * xi for ci, xi in zip(cobj, x))
        dval = sum(
            yi * Fraction(bi) for yi, bi in zip(y, prob.b.tolist())
        )
        if bound is not None:
            dval += sum(bound)
    sol = LpSolution(
        x=x,
        value=value,
        basis=res["basis"],
        is_vertex=True,
        arithmetic=arithmetic,
        problem=prob,
    )
    dual = DualSolution(
        y=y, bound_duals=bound, value=dval, arithmetic=arithmetic, problem=prob
    )
    return sol, dual


def solve_dual_explicit(prob: LpProblem, arithmetic: str = "float") -> DualSolution:
    """Independently solve min{y.b (+ z.1) : y.A (+ z) >= c} as a cross-check."""
    _, dual = _solve_via_covering(prob, arithmetic)
    return dual


def check_duality(primal: LpSolution, dual: DualSolution) -> DualityReport:
    """Verify the optimality certificate: feasibility, zero gap, slackness."""
    if not _same_problem(primal.problem, dual.problem):
        raise StructureError("primal and dual come from different problems")
    prob = primal.problem
    exact = primal.arithmetic == "rational" and dual.arithmetic == "rational"
    worst = ("", 0.0)

    def note(kind, amount):
        nonlocal worst
        if float(amount) > worst[1]:
            worst = (kind, float(amount))

    if exact:
        A = [[Fraction(v) for v in row] for row in prob.A.tolist()]
        b = [Fraction(v) for v in prob.b.tolist()]
        c = [Fraction(v) for v in prob.objective.tolist()]
        x = [Fraction(v) for v in primal.x]
        y = [Fraction(v) for v in dual.y]
        z = (
            [Fraction(v) for v in dual.bound_duals]
            if dual.bound_duals is not None
            else [Fraction(0)] * prob.m
        )
        row_act = [sum(A[i][j] * x[j] for j in range(prob.m)) for i in range(prob.n)]
        col_y = [sum(A[i][j] * y[i] for i in range(prob.n)) for j in range(prob.m)]
        pf = all(xj >= 0 for xj in x) and all(
            row_act[i] <= b[i] for i in range(prob.n)
        )
        if prob.explicit_unit_bounds:
            pf = pf and all(xj <= 1 for xj in x)
        df = all(yi >= 0 for yi in y) and all(
            col_y[j] + z[j] >= c[j] for j in range(prob.m)
        )
        gap = primal.value - dual.value
        cs = all(
            y[i] == 0 or row_act[i] == b[i] for i in range(prob.n)
        ) and all(x[j] == 0 or col_y[j] + z[j] == c[j] for j in range(prob.m))
        if prob.explicit_unit_bounds:
            cs = cs and all(z[j] == 0 or x[j] == 1 for j in range(prob.m))
        ok = pf and df and gap == 0 and cs
        if not pf:
            note("primal infeasible", 1.0)
        if not df:
            note("dual infeasible", 1.0)
        if gap != 0:
            note("duality gap", abs(gap))
        if not cs:
            note("complementary slackness", 1.0)
        return DualityReport(ok, gap, pf, df, cs, worst[0] or "none")

    A, b, c = prob.A, prob.b, prob.objective
    x = np.asarray([float(v) for v in primal.x])
    y = np.asarray([float(v) for v in dual.y])
    z = (
        np.asarray([float(v) for v in dual.bound_duals])
        if dual.bound_duals is not None
        else np.zeros(prob.m)
    )
    row_act = A @ x if prob.m else np.zeros(prob.n)
    col_y = y @ A if prob.n else np.zeros(prob.m)
    p_viol = max(
        float(np.max(row_act - b, initial=0.0)), float(np.max(-x, initial=0.0))
    )
    if prob.explicit_unit_bounds:
        p_viol = max(p_viol, float(np.max(x - 1.0, initial=0.0)))
    d_viol = max(
        float(np.max(c - col_y - z, initial=0.0)), float(np.max(-y, initial=0.0))
    )
    gap = float(primal.value) - float(dual.value)
    cs_viol = max(
        float(np.max(np.abs(y * (b - row_act)), initial=0.0)),
        float(np.max(np.abs(x * (c - col_y - z)), initial=0.0)),
    )
    if prob.explicit_unit_bounds:
        cs_viol = max(cs_viol, float(np.max(np.abs(z * (1.0 - x)), initial=0.0)))
    pf = p_viol <= FEAS_TOL
    df = d_viol <= FEAS_TOL
    cs = cs_viol <= GAP_TOL
    ok = pf and df and abs(gap) <= GAP_TOL and cs
    note("primal feasibility", p_viol)
    note("dual feasibility", d_viol)
    note("duality gap", abs(gap))
    note("complementary slackness", cs_viol)
    return DualityReport(ok, gap, pf, df, cs, f"{worst[0]} ({worst[1]:.3g})")


def _same_problem(p1, p2) -> bool:
    if p1 is p2:
        return True
    if p1 is None or p2 is None:
        return False
    return (
        p1.explicit_unit_bounds == p2.explicit_unit_bounds
        and p1.A.shape == p2.A.shape
        and np.array_equal(p1.A, p2.A)
        and np.array_equal(p1.b, p2.b)
        and np.array_equal(p1.objective, p2.objective)
    )


def _format_tableau(res) -> str:
    """Plain-text dump of the final tableau for debugging."""
    T, rhs, basis = res["T"], res["rhs"], res["basis"]
    lines = ["basis | " + " ".join(f"v{j:<3d}" for j in range(T.shape[1])) + " | rhs"]
    for i in range(T.shape[0]):
        row = " ".join(f"{v:5.2f}" for v in T[i])
        lines.append(f"v{basis[i]:<4d} | {row} | {rhs[i]:7.3f}")
    lines.append("z     | " + " ".join(f"{v:5.2f}" for v in res["z"]))
    return "\n".join(lines)
