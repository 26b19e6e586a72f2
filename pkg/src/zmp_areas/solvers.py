"""Small dense LP and convex QP solvers.

LP: two-phase tableau simplex with Bland's anti-cycling rule, deterministic
by construction. QP: primal active set after equality elimination. Both are
sized for the problems here (at most a few hundred variables); there is no
sparse machinery.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CycleLimit, MaxIterations

ENTER_TOL = 1e-9
PIVOT_TOL = 1e-10
PHASE1_TOL = 1e-8


@dataclass(frozen=True)
class LpProblem:
    """min c.x  s.t.  g x <= h,  a x = b  (x free)."""

    c: np.ndarray
    g: np.ndarray = None
    h: np.ndarray = None
    a: np.ndarray = None
    b: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = len(c)
        g = np.zeros((0, n)) if self.g is None else np.asarray(self.g, dtype=float).reshape(-1, n)
        h = np.zeros(0) if self.h is None else np.asarray(self.h, dtype=float).reshape(-1)
        a = np.zeros((0, n)) if self.a is None else np.asarray(self.a, dtype=float).reshape(-1, n)
        b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float).reshape(-1)
        if len(g) != len(h) or len(a) != len(b):
            raise ValueError("inconsistent constraint dimensions")
        for name, val in (("c", c), ("g", g), ("h", h), ("a", a), ("b", b)):
            object.__setattr__(self, name, val)

    @property
    def dim(self):
        return len(self.c)


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray = None
    value: float = None


def _pivot(t, row, col):
    t[row] /= t[row, col]
    factors = t[:, col].copy()
    factors[row] = 0.0
    t -= np.outer(factors, t[row])


def _simplex_loop(t, basis, cost_row, max_iter, allow_unbounded):
    """Run Bland-rule simplex on tableau t (cost_row is the last row index)."""
    n_cols = t.shape[1] - 1
    for _ in range(max_iter):
        costs = t[cost_row, :n_cols]
        entering = -1
        for j in range(n_cols):
            if costs[j] < -ENTER_TOL:
                entering = j
                break
        if entering < 0:
            return "optimal"
        col = t[:cost_row, entering]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if len(rows) == 0:
            if allow_unbounded:
                return "unbounded"
            return "stalled"
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        leave = ties[int(np.argmin([basis[i] for i in ties]))]
        _pivot(t, leave, entering)
        basis[leave] = entering
    raise CycleLimit("simplex iteration cap reached")


def solve_lp(problem, max_iter=20000):
    """Two-phase dense simplex. Returns LpResult with a certified status."""
    n = problem.dim
    g, h, a, b = problem.g, problem.h, problem.a, problem.b
    m_g, m_a = len(g), len(a)
    m = m_g + m_a
    if m == 0:
        if np.max(np.abs(problem.c), initial=0.0) <= ENTER_TOL:
            return LpResult("optimal", np.zeros(n), 0.0)
        return LpResult("unbounded")

    # standard form: x = u - w, slacks on inequality rows, artificial basis
    n_std = 2 * n + m_g
    rows = np.zeros((m, n_std))
    rhs = np.zeros(m)
    rows[:m_g, :n] = g
    rows[:m_g, n:2 * n] = -g
    rows[:m_g, 2 * n:] = np.eye(m_g)
    rhs[:m_g] = h
    if m_a:
        rows[m_g:, :n] = a
        rows[m_g:, n:2 * n] = -a
        rhs[m_g:] = b
    flip = rhs < 0
    rows[flip] *= -1.0
    rhs[flip] *= -1.0

    # phase 1 tableau with one artificial per row
    t = np.zeros((m + 1, n_std + m + 1))
    t[:m, :n_std] = rows
    t[:m, n_std:n_std + m] = np.eye(m)
    t[:m, -1] = rhs
    t[m, :n_std] = -rows.sum(axis=0)
    t[m, -1] = -rhs.sum()
    basis = [n_std + i for i in range(m)]
    status = _simplex_loop(t, basis, m, max_iter, allow_unbounded=False)
    if status == "stalled":
        raise CycleLimit("phase-1 stall")
    if -t[m, -1] > PHASE1_TOL:
        return LpResult("infeasible")

    # drive remaining artificials out of the basis, drop redundant rows
    drop = []
    for i in range(m):
        if basis[i] < n_std:
            continue
        row = t[i, :n_std]
        j = next((k for k in range(n_std) if abs(row[k]) > PIVOT_TOL), None)
        if j is None:
            drop.append(i)
        else:
            _pivot(t, i, j)
            basis[i] = j
    keep = [i for i in range(m) if i not in drop]
    t2 = np.zeros((len(keep) + 1, n_std + 1))
    t2[:len(keep), :n_std] = t[keep][:, :n_std]
    t2[:len(keep), -1] = t[keep][:, -1]
    basis2 = [basis[i] for i in keep]

    cost = np.zeros(n_std)
    cost[:n] = problem.c
    cost[n:2 * n] = -problem.c
    t2[-1, :n_std] = cost
    t2[-1, -1] = 0.0
    for i, bi in enumerate(basis2):
        if abs(cost[bi]) > 0.0:
            t2[-1] -= cost[bi] * t2[i]
    status = _simplex_loop(t2, basis2, len(keep), max_iter, allow_unbounded=True)
    if status == "unbounded":
        return LpResult("unbounded")
    x_std = np.zeros(n_std)
    for i, bi in enumerate(basis2):
        x_std[bi] = t2[i, -1]
    x = x_std[:n] - x_std[n:2 * n]
    return LpResult("optimal", x, float(problem.c @ x))


@dataclass(frozen=True)
class QpProblem:
    """min 0.5 x.Q.x + q.x  s.t.  g x <= h,  a x = b.

    Q must be symmetric (tol 1e-10) and PSD (eigenvalue floor -1e-8).
    """

    q_mat: np.ndarray
    q_vec: np.ndarray
    g: np.ndarray = None
    h: np.ndarray = None
    a: np.ndarray = None
    b: np.ndarray = None

    def __post_init__(self):
        q_mat = np.asarray(self.q_mat, dtype=float)
        n = q_mat.shape[0]
        if q_mat.shape != (n, n):
            raise ValueError("cost matrix must be square")
        if np.max(np.abs(q_mat - q_mat.T)) > 1e-10:
            raise ValueError("cost matrix must be symmetric")
        if np.linalg.eigvalsh(q_mat).min() < -1e-8:
            raise ValueError("cost matrix must be positive semidefinite")
        q_vec = np.asarray(self.q_vec, dtype=float).reshape(n)
        g = np.zeros((0, n)) if self.g is None else np.asarray(self.g, dtype=float).reshape(-1, n)
        h = np.zeros(0) if self.h is None else np.asarray(self.h, dtype=float).reshape(-1)
        a = np.zeros((0, n)) if self.a is None else np.asarray(self.a, dtype=float).reshape(-1, n)
        b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float).reshape(-1)
        if len(g) != len(h) or len(a) != len(b):
            raise ValueError("inconsistent constraint dimensions")
        for name, val in (
            ("q_mat", q_mat), ("q_vec", q_vec),
            ("g", g), ("h", h), ("a", a), ("b", b),
        ):
            object.__setattr__(self, name, val)

    @property
    def dim(self):
        return len(self.q_vec)


@dataclass(frozen=True)
class QpResult:
    status: str  # "optimal" | "infeasible"
    x: np.ndarray = None
    value: float = None


def _null_space(mat, dim):
    if len(mat) == 0:
        return np.eye(dim)
    _, sv, vt = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(sv > PIVOT_TOL * max(sv[0] if len(sv) else 0.0, 1.0)))
    return vt[rank:].T


def solve_qp(problem, max_iter=None):
    """Primal active-set QP with equality elimination."""
    n = problem.dim
    if max_iter is None:
        max_iter = 100 * (len(problem.h) + n + 5)

    # eliminate equalities: x = x0 + basis @ y
    if len(problem.a):
        x0, *_ = np.linalg.lstsq(problem.a, problem.b, rcond=None)
        if np.max(np.abs(problem.a @ x0 - problem.b)) > 1e-8 * max(
            1.0, np.max(np.abs(problem.b), initial=0.0)
        ):
            return QpResult("infeasible")
        basis = _null_space(problem.a, n)
    else:
        x0 = np.zeros(n)
        basis = np.eye(n)
    q_red = basis.T @ problem.q_mat @ basis
    q_red = 0.5 * (q_red + q_red.T)
    c_red = basis.T @ (problem.q_vec + problem.q_mat @ x0)
    g_red = problem.g @ basis
    h_red = problem.h - problem.g @ x0

    def full_result(y):
        x = x0 + basis @ y
        value = 0.5 * x @ problem.q_mat @ x + problem.q_vec @ x
        return QpResult("optimal", x, float(value))

    def solve_psd(mat, rhs):
        try:
            sol = np.linalg.solve(mat + 1e-12 * np.eye(len(mat)), rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        return sol

    if len(g_red) == 0:
        return full_result(solve_psd(q_red, -c_red))

    # feasible start: least-norm point if it fits, else phase-1 simplex
    y = np.zeros(basis.shape[1])
    if not np.all(g_red @ y <= h_red + 1e-10):
        res = solve_lp(LpProblem(np.zeros(basis.shape[1]), g_red, h_red))
        if res.status != "optimal":
            return QpResult("infeasible")
        y = res.x

    working = [i for i in range(len(g_red)) if g_red[i] @ y >= h_red[i] - 1e-9]
    for _ in range(max_iter):
        grad = q_red @ y + c_red
        g_w = g_red[working] if working else np.zeros((0, len(y)))
        z = _null_space(g_w, len(y))
        if z.shape[1] == 0:
            p = np.zeros(len(y))
        else:
            w = solve_psd(z.T @ q_red @ z, -z.T @ grad)
            p = z @ w
        if np.max(np.abs(p), initial=0.0) <= 1e-11:
            if not working:
                return full_result(y)
            lam, *_ = np.linalg.lstsq(g_w.T, -grad, rcond=None)
            if np.min(lam) >= -1e-9:
                return full_result(y)
            worst = next(k for k in range(len(lam)) if lam[k] < -1e-9)
            working.pop(worst)
            continue
        alpha = 1.0
        blocker = None
        for i in range(len(g_red)):
            if i in working:
                continue
            advance = g_red[i] @ p
            if advance <= 1e-12:
                continue
            step = (h_red[i] - g_red[i] @ y) / advance
            if step < alpha - 1e-12:
                alpha = max(step, 0.0)
                blocker = i
        y = y + alpha * p
        if blocker is not None:
            working.append(blocker)
            working.sort()
    raise MaxIterations("active-set iteration cap reached")
