"""Dense two-phase revised simplex with dual solutions.

Design choices, fixed here and relied on elsewhere:

* vertex (basic) solutions, so active sets are exact and dual vectors of
  bound computations translate directly into atomic measures;
* Dantzig pricing until a run of degenerate pivots trips a counter, then
  Bland's rule until the vertex is escaped (anti-cycling);
* LU basis factorization with product-form eta updates, refactorized
  every ``REFACTOR_EVERY`` pivots;
* row/column equilibration by powers of two (lossless in floating point);
* a fixed verification tolerance (1e-8, overridable through the
  ERGOBOUND_LP_TOL environment variable) applied to primal and dual
  feasibility, complementary slackness, and the duality gap before a
  solution is declared optimal.

Sign convention for duals: multipliers of the Lagrangian
``c'x + duals_ineq'(A_ub x - b_ub) + duals_eq'(A_eq x - b_eq)`` of the
minimization, so ``duals_ineq >= 0`` and for a maximization encoded as
``min -c'x`` the inequality duals are the familiar nonnegative shadow
prices.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

DEFAULT_TOL = 1e-8
PIVOT_TOL = 1e-11
REFACTOR_EVERY = 50
DEGENERACY_TRIP = 25


class LPError(RuntimeError):
    pass


class IllConditionedBasisError(LPError):
    pass


def solver_tolerance() -> float:
    """1e-8 unless overridden by ERGOBOUND_LP_TOL (documented non-default)."""
    raw = os.environ.get("ERGOBOUND_LP_TOL")
    if raw is None:
        return DEFAULT_TOL
    tol = float(raw)
    if not (0 < tol < 1):
        raise ValueError(f"ERGOBOUND_LP_TOL must lie in (0, 1), got {raw!r}")
    return tol


@dataclass(frozen=True)
class LinearProgram:
    """min c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi."""

    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    bounds: tuple | None = None  # per-variable (lo, hi); None means (0, +inf)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        object.__setattr__(self, "c", c)
        n = len(c)

        def norm_block(a, b, label):
            if a is None or (hasattr(a, "__len__") and len(a) == 0):
                return np.zeros((0, n)), np.zeros(0)
            a = np.atleast_2d(np.asarray(a, dtype=float))
            b = np.atleast_1d(np.asarray(b, dtype=float))
            if a.shape[1] != n or a.shape[0] != len(b):
                raise ValueError(f"inconsistent {label} dimensions")
            return a, b

        a_ub, b_ub = norm_block(self.a_ub, self.b_ub, "inequality")
        a_eq, b_eq = norm_block(self.a_eq, self.b_eq, "equality")
        object.__setattr__(self, "a_ub", a_ub)
        object.__setattr__(self, "b_ub", b_ub)
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", b_eq)

        if self.bounds is None:
            bounds = tuple((0.0, math.inf) for _ in range(n))
        else:
            bounds = tuple(
                (float(lo) if lo is not None else -math.inf,
                 float(hi) if hi is not None else math.inf)
                for lo, hi in self.bounds
            )
            if len(bounds) != n:
                raise ValueError("bounds length differs from variable count")
        object.__setattr__(self, "bounds", bounds)

        for arr in (c, a_ub, b_ub, a_eq, b_eq):
            if arr.size and np.any(np.isnan(arr)):
                raise ValueError("NaN entry in linear program data")

    @property
    def n_vars(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None
    duals_ineq: np.ndarray | None
    duals_eq: np.ndarray | None
    iterations: int
    residuals: dict = field(default_factory=dict)
    basis_labels: tuple | None = None


@dataclass(frozen=True)
class DualityReport:
    duality_gap: float
    max_slackness_violation: float
    primal_infeasibility: float
    dual_infeasibility: float


# ---------------------------------------------------------------------------
# Standard form
# ---------------------------------------------------------------------------

class _StandardForm:
    """min c'z, A z = b, z >= 0, with bookkeeping to map back.

    Column labels (stable under appending variables or rows at the end):
        ("var+", j), ("var-", j)   split or shifted original variable
        ("slack_ub", i)            slack of inequality row i
        ("slack_bnd", j)           slack of the upper-bound row of variable j
    Artificial columns are virtual unit vectors labeled ("art", row).
    """

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        self.lp = lp
        cols: list[tuple] = []
        col_sign: list[float] = []
        col_var: list[int] = []
        shift = np.zeros(n)
        bnd_rows: list[tuple[int, float]] = []  # (var, ub-row rhs)

        self.infeasible_bounds = False
        for j, (lo, hi) in enumerate(lp.bounds):
            if lo > hi:
                self.infeasible_bounds = True
                return
            if lo == -math.inf and hi == math.inf:
                cols.append(("var+", j)); col_sign.append(1.0); col_var.append(j)
                cols.append(("var-", j)); col_sign.append(-1.0); col_var.append(j)
            elif lo != -math.inf and hi == math.inf:
                shift[j] = lo
                cols.append(("var+", j)); col_sign.append(1.0); col_var.append(j)
            elif lo == -math.inf:
                shift[j] = hi
                cols.append(("var-", j)); col_sign.append(-1.0); col_var.append(j)
            else:
                shift[j] = lo
                cols.append(("var+", j)); col_sign.append(1.0); col_var.append(j)
                bnd_rows.append((j, hi - lo))

        m_ub, m_eq, m_bnd = len(lp.b_ub), len(lp.b_eq), len(bnd_rows)
        n_struct = len(cols)
        for i in range(m_ub):
            cols.append(("slack_ub", i)); col_sign.append(1.0); col_var.append(-1)
        for r, (j, _) in enumerate(bnd_rows):
            cols.append(("slack_bnd", j)); col_sign.append(1.0); col_var.append(-1)

        m = m_ub + m_eq + m_bnd
        a = np.zeros((m, len(cols)))
        b = np.zeros(m)
        big = np.vstack([lp.a_ub, lp.a_eq]) if m_ub + m_eq else np.zeros((0, n))
        rhs = np.concatenate([lp.b_ub, lp.b_eq])
        for r in range(m_ub + m_eq):
            b[r] = rhs[r] - big[r] @ shift
            for k in range(n_struct):
                j = col_var[k]
                a[r, k] = big[r, j] * col_sign[k]
        for i in range(m_ub):
            a[i, n_struct + i] = 1.0
        for r, (j, width) in enumerate(bnd_rows):
            row = m_ub + m_eq + r
            k = next(
                k for k in range(n_struct)
                if cols[k] == ("var+", j)
            )
            a[row, k] = 1.0
            a[row, n_struct + m_ub + r] = 1.0
            b[row] = width

        c_std = np.zeros(len(cols))
        for k in range(n_struct):
            c_std[k] = lp.c[col_var[k]] * col_sign[k]
        self.obj_offset = float(lp.c @ shift)

        # Lossless power-of-two equilibration: rows then columns.
        def pow2(x):
            out = np.ones_like(x)
            nz = x > 0
            out[nz] = np.exp2(np.round(np.log2(x[nz])))
            return out

        row_scale = np.ones(m)
        if m:
            row_max = np.max(np.abs(a), axis=1)
            row_max = np.maximum(row_max, np.abs(b))
            row_scale = pow2(row_max)
            a = a / row_scale[:, None]
            b = b / row_scale
        col_max = np.max(np.abs(a), axis=0) if m else np.abs(c_std)
        col_scale = pow2(col_max)  # zero columns keep scale 1
        a = a / col_scale[None, :]
        c_scaled = c_std / col_scale

        self.a = a
        self.b = b
        self.c = c_scaled
        self.cols = cols
        self.col_sign = col_sign
        self.col_var = col_var
        self.shift = shift
        self.row_scale = row_scale
        self.col_scale = col_scale
        self.m_ub, self.m_eq, self.m_bnd = m_ub, m_eq, m_bnd
        self.n_struct = n_struct

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def recover_x(self, z_scaled: np.ndarray) -> np.ndarray:
        # A was divided by the column scales, so true column activity is
        # the scaled activity divided by the same factors.
        z = z_scaled / self.col_scale
        x = self.shift.copy()
        for k in range(self.n_struct):
            x[self.col_var[k]] += self.col_sign[k] * z[k]
        return x

    def recover_duals(self, y_scaled: np.ndarray):
        """Map simplex multipliers to Lagrangian duals of the original rows."""
        y = y_scaled / self.row_scale
        lam = -y[: self.m_ub]
        mu = -y[self.m_ub : self.m_ub + self.m_eq]
        return lam, mu


# ---------------------------------------------------------------------------
# Revised simplex core
# ---------------------------------------------------------------------------

class _EtaFile:
    """LU factors of a reference basis plus product-form updates."""

    def __init__(self, b_matrix: np.ndarray):
        self.lu = lu_factor(b_matrix, check_finite=False)
        self.etas: list[tuple[np.ndarray, int]] = []

    def ftran(self, v: np.ndarray) -> np.ndarray:
        x = lu_solve(self.lu, v, check_finite=False)
        for d, r in self.etas:
            xr = x[r] / d[r]
            x -= d * xr
            x[r] = xr
        return x

    def btran(self, w: np.ndarray) -> np.ndarray:
        # E has column r equal to d; solving E'y = w changes only y_r.
        y = w.copy()
        for d, r in reversed(self.etas):
            s = y @ d
            y[r] = (y[r] - (s - d[r] * y[r])) / d[r]
        return lu_solve(self.lu, y, trans=1, check_finite=False)

    def push(self, d: np.ndarray, r: int):
        self.etas.append((d.copy(), r))


class _Simplex:
    def __init__(self, sf: _StandardForm, tol: float):
        self.sf = sf
        self.a = sf.a
        self.b = sf.b
        self.m = sf.m
        self.n = sf.n
        # Pricing runs well below the verification tolerance so vertices
        # are resolved to near machine precision; tol itself only gates
        # the final optimality certificate.
        self.verify_tol = tol
        self.tol = max(tol * 1e-3, 1e-12)
        self.iterations = 0
        self.basis = np.array([self.n + i for i in range(self.m)], dtype=int)
        self.in_basis = np.zeros(self.n + self.m, dtype=bool)
        self.in_basis[self.n :] = True
        # flip rows so b >= 0, making the all-artificial basis feasible
        self.row_flip = np.where(self.b < 0, -1.0, 1.0)
        self.a = self.a * self.row_flip[:, None]
        self.b = self.b * self.row_flip
        self.xb = self.b.copy()
        self.eta: _EtaFile | None = None
        self.refactor()

    # -- column access ---------------------------------------------------

    def column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.a[:, j]
        e = np.zeros(self.m)
        e[j - self.n] = 1.0
        return e

    def basis_matrix(self) -> np.ndarray:
        cols = np.empty((self.m, self.m))
        for i, j in enumerate(self.basis):
            cols[:, i] = self.column(j)
        return cols

    def refactor(self):
        try:
            self.eta = _EtaFile(self.basis_matrix())
        except Exception as exc:  # singular refactorization
            raise IllConditionedBasisError(
                f"basis refactorization failed: {exc}"
            ) from exc
        self.xb = self.eta.ftran(self.b)

    def set_basis(self, basis: np.ndarray) -> bool:
        """Install a warm-start basis; returns False if unusable."""
        basis = np.asarray(basis, dtype=int)
        if len(basis) != self.m or len(np.unique(basis)) != self.m:
            return False
        self.basis = basis.copy()
        self.in_basis[:] = False
        self.in_basis[self.basis] = True
        try:
            self.eta = _EtaFile(self.basis_matrix())
        except Exception:
            return False
        diag = np.abs(np.diag(self.eta.lu[0]))
        if diag.min() < PIVOT_TOL * max(1.0, diag.max()):
            return False
        self.xb = self.eta.ftran(self.b)
        if np.min(self.xb) < -1e3 * self.tol:
            return False
        # artificial columns must sit at zero for original feasibility
        art = self.basis >= self.n
        if np.any(np.abs(self.xb[art]) > 1e3 * self.tol):
            return False
        self.xb = np.maximum(self.xb, 0.0)
        return True

    # -- pivoting ----------------------------------------------------------

    def run_phase(self, cost: np.ndarray, max_iter: int):
        """Minimize cost'z from the current basis. Returns 'optimal'/'unbounded'.

        Pricing starts well below the verification tolerance; if the
        objective stops improving (degenerate churn at the noise floor)
        the pricing threshold is relaxed step by step, never beyond the
        verification tolerance, so termination is guaranteed while the
        optimality certificate stays intact.
        """
        degen_streak = 0
        bland = False
        banned: set[int] = set()
        retried = False
        price_tol = self.tol
        stagnation = 0
        best_obj = math.inf
        while True:
            if self.iterations > max_iter:
                raise IllConditionedBasisError(
                    f"iteration limit {max_iter} exceeded (possible cycling)"
                )
            obj = float(cost[self.basis] @ self.xb)
            if obj < best_obj - 1e-12 * (1.0 + abs(best_obj)):
                best_obj = obj
                stagnation = 0
            else:
                stagnation += 1
                if stagnation >= DEGENERACY_TRIP:
                    bland = True
                if stagnation == 1500:
                    self.refactor()  # fresh numerics often break the churn
                if stagnation >= 3000:
                    if price_tol >= self.verify_tol:
                        return "optimal"  # at the certified tolerance already
                    price_tol = min(price_tol * 100.0, self.verify_tol)
                    stagnation = 0
                    bland = False
            cb = cost[self.basis]
            y = self.eta.btran(cb)
            red = cost[: self.n] - self.a.T @ y
            mask = ~self.in_basis[: self.n]
            if banned:
                mask = mask.copy()
                mask[list(banned)] = False
            cand = np.where(mask & (red < -price_tol))[0]
            if len(cand) == 0:
                return "optimal"
            # artificial columns never re-enter: once driven out they stay out
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmin(red[cand])])

            d = self.eta.ftran(self.column(q))
            pos = np.where(d > PIVOT_TOL)[0]
            if len(pos) == 0:
                return "unbounded"
            ratios = np.maximum(self.xb[pos], 0.0) / d[pos]
            theta = np.min(ratios)
            tie = pos[np.abs(ratios - theta) <= 1e-12 * (1.0 + abs(theta))]
            # deterministic leave: largest pivot among ties, then smallest label
            piv = np.abs(d[tie])
            best = tie[piv >= piv.max() * 0.5]
            r = int(best[np.argmin(self.basis[best])])
            if abs(d[r]) < PIVOT_TOL:
                banned.add(q)
                if len(banned) > 10 and not retried:
                    self.refactor()
                    banned.clear()
                    retried = True
                elif len(banned) > 10:
                    raise IllConditionedBasisError(
                        "repeated tiny pivots; basis too ill-conditioned"
                    )
                continue
            banned.clear()

            leave = self.basis[r]
            self.xb = self.xb - theta * d
            self.xb[r] = theta
            self.xb = np.maximum(self.xb, 0.0)
            self.in_basis[leave] = False
            self.in_basis[q] = True
            self.basis[r] = q
            self.eta.push(d, r)
            self.iterations += 1
            if len(self.eta.etas) >= REFACTOR_EVERY:
                self.refactor()

            if theta <= 1e-12:
                degen_streak += 1
                if degen_streak >= DEGENERACY_TRIP:
                    bland = True
            else:
                degen_streak = 0
                bland = False


def _solve_unconstrained(lp: LinearProgram, tol: float) -> LPSolution:
    """No rows at all: minimize each variable against its own bounds."""
    x = np.zeros(lp.n_vars)
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo > hi:
            return LPSolution("infeasible", None, None, None, None, 0)
        if lp.c[j] > tol:
            if lo == -math.inf:
                return LPSolution("unbounded", None, None, None, None, 0)
            x[j] = lo
        elif lp.c[j] < -tol:
            if hi == math.inf:
                return LPSolution("unbounded", None, None, None, None, 0)
            x[j] = hi
        else:
            x[j] = min(max(0.0, lo), hi)
    obj = float(lp.c @ x)
    return LPSolution(
        "optimal", x, obj, np.zeros(0), np.zeros(0), 0,
        {"primal": 0.0, "dual": 0.0, "slackness": 0.0, "gap": 0.0},
        basis_labels=(),
    )


def solve_lp(lp: LinearProgram, warm_basis: tuple | None = None) -> LPSolution:
    """Two-phase revised simplex returning certified primal and dual vectors.

    ``warm_basis`` may carry ``basis_labels`` from a previous solution of a
    smaller instance of the same family (columns and rows appended at the
    end); an unusable warm basis silently falls back to a cold start.
    """
    tol = solver_tolerance()
    sf = _StandardForm(lp)
    if getattr(sf, "infeasible_bounds", False):
        return LPSolution("infeasible", None, None, None, None, 0)
    if sf.m == 0:
        return _solve_unconstrained(lp, tol)

    sx = _Simplex(sf, tol)
    max_iter = 50 * (sf.m + sf.n) + 2000

    label_to_index = {lab: k for k, lab in enumerate(sf.cols)}
    warmed = False
    if warm_basis is not None:
        idx = []
        ok = True
        for lab in warm_basis:
            if lab[0] == "art":
                if lab[1] >= sf.m:
                    ok = False
                    break
                idx.append(sf.n + lab[1])
            elif lab in label_to_index:
                idx.append(label_to_index[lab])
            else:
                ok = False
                break
        if ok:
            warmed = sx.set_basis(np.array(idx, dtype=int))

    if not warmed:
        phase1_cost = np.concatenate([np.zeros(sf.n), np.ones(sf.m)])
        status = sx.run_phase(phase1_cost, max_iter=max_iter)
        if status != "optimal":
            raise LPError("phase 1 terminated abnormally")
        infeas = float(phase1_cost[sx.basis] @ sx.xb)
        if infeas > 1e4 * tol * (1.0 + float(np.linalg.norm(sx.b))):
            return LPSolution(
                "infeasible", None, None, None, None, sx.iterations
            )

    phase2_cost = np.concatenate([sf.c, np.zeros(sf.m)])
    status = sx.run_phase(phase2_cost, max_iter=max_iter)
    if status == "unbounded":
        return LPSolution("unbounded", None, None, None, None, sx.iterations)

    for attempt in range(2):
        # refresh the basic values from the factorized basis: incremental
        # updates drift over long pivot sequences
        sx.refactor()
        sx.xb = np.maximum(sx.xb, 0.0)
        z = np.zeros(sf.n + sf.m)
        z[sx.basis] = sx.xb
        art_mass = float(np.sum(np.abs(z[sf.n :])))
        y = sx.eta.btran(phase2_cost[sx.basis])
        red = phase2_cost[: sf.n] - sx.a.T @ y
        obj_scaled = float(sf.c @ z[: sf.n])
        gap = abs(obj_scaled - float(y @ sx.b))
        dual_viol = float(max(0.0, -np.min(red))) if sf.n else 0.0
        slack_viol = float(np.max(np.abs(z[: sf.n] * red))) if sf.n else 0.0
        primal_viol = float(np.max(np.abs(sx.a @ z[: sf.n] - sx.b))) if sf.m else 0.0
        scale = 1.0 + abs(obj_scaled)
        ok = (
            art_mass <= 1e4 * tol
            and gap <= tol * scale
            and dual_viol <= tol * scale
            and slack_viol <= 1e2 * tol * scale
            and primal_viol <= 1e2 * tol * (1.0 + float(np.max(np.abs(sx.b))))
        )
        if ok:
            break
        if attempt == 0:
            sx.refactor()
            status = sx.run_phase(phase2_cost, max_iter=max_iter)
            if status == "unbounded":
                return LPSolution(
                    "unbounded", None, None, None, None, sx.iterations
                )
        else:
            raise IllConditionedBasisError(
                "optimality verification failed: "
                f"gap={gap:.3g} dual={dual_viol:.3g} slack={slack_viol:.3g} "
                f"primal={primal_viol:.3g} artificials={art_mass:.3g}"
            )

    # undo the phase-1 row flips before mapping multipliers back
    y_unflipped = y * sx.row_flip
    x = sf.recover_x(z[: sf.n])
    lam, mu = sf.recover_duals(y_unflipped)
    lam = np.maximum(lam, 0.0)  # clip multiplier noise at the active/inactive edge
    objective = float(lp.c @ x)
    labels = tuple(
        sf.cols[j] if j < sf.n else ("art", int(j - sf.n)) for j in sx.basis
    )
    return LPSolution(
        status="optimal",
        x=x,
        objective=objective,
        duals_ineq=lam,
        duals_eq=mu,
        iterations=sx.iterations,
        residuals={
            "primal": primal_viol,
            "dual": dual_viol,
            "slackness": slack_viol,
            "gap": gap,
        },
        basis_labels=labels,
    )


def duality_report(lp: LinearProgram, sol: LPSolution) -> DualityReport:
    """Recompute gap, slackness, and feasibility residuals from scratch."""
    if sol.status != "optimal":
        raise LPError(f"duality report requires an optimal solution, got {sol.status}")
    x = sol.x
    lam = sol.duals_ineq
    mu = sol.duals_eq

    primal = 0.0
    if len(lp.b_ub):
        primal = max(primal, float(np.max(lp.a_ub @ x - lp.b_ub)))
    if len(lp.b_eq):
        primal = max(primal, float(np.max(np.abs(lp.a_eq @ x - lp.b_eq))))
    for j, (lo, hi) in enumerate(lp.bounds):
        primal = max(primal, lo - x[j], x[j] - hi)

    # stationarity residual per variable; its sign pattern encodes the
    # active bound, so the dual objective can be rebuilt exactly
    rc = lp.c.copy()
    if len(lp.b_ub):
        rc += lp.a_ub.T @ lam
    if len(lp.b_eq):
        rc += lp.a_eq.T @ mu

    dual_infeas = float(max(0.0, -np.min(lam))) if len(lam) else 0.0
    dual_obj = 0.0
    if len(lp.b_ub):
        dual_obj -= float(lam @ lp.b_ub)
    if len(lp.b_eq):
        dual_obj -= float(mu @ lp.b_eq)
    slackness = 0.0
    for j, (lo, hi) in enumerate(lp.bounds):
        if rc[j] > 0:
            if lo == -math.inf:
                dual_infeas = max(dual_infeas, rc[j])
            else:
                dual_obj += rc[j] * lo
                slackness = max(slackness, abs(rc[j] * (x[j] - lo)))
        elif rc[j] < 0:
            if hi == math.inf:
                dual_infeas = max(dual_infeas, -rc[j])
            else:
                dual_obj += rc[j] * hi
                slackness = max(slackness, abs(rc[j] * (hi - x[j])))
    if len(lp.b_ub):
        slackness = max(
            slackness, float(np.max(np.abs(lam * (lp.b_ub - lp.a_ub @ x))))
        )
    gap = abs(float(lp.c @ x) - dual_obj)
    return DualityReport(
        duality_gap=gap,
        max_slackness_violation=slackness,
        primal_infeasibility=float(primal),
        dual_infeasibility=dual_infeas,
    )


def write_mps(lp: LinearProgram, name: str = "ERGOLP") -> str:
    """MPS-format text dump of the program (debugging interface)."""
    lines = [f"NAME          {name}", "ROWS", " N  COST"]
    for i in range(len(lp.b_ub)):
        lines.append(f" L  R{i}")
    for i in range(len(lp.b_eq)):
        lines.append(f" E  E{i}")
    lines.append("COLUMNS")
    for j in range(lp.n_vars):
        entries = []
        if lp.c[j]:
            entries.append(("COST", lp.c[j]))
        for i in range(len(lp.b_ub)):
            if lp.a_ub[i, j]:
                entries.append((f"R{i}", lp.a_ub[i, j]))
        for i in range(len(lp.b_eq)):
            if lp.a_eq[i, j]:
                entries.append((f"E{i}", lp.a_eq[i, j]))
        for row, val in entries:
            lines.append(f"    X{j}  {row}  {val:.17g}")
    lines.append("RHS")
    for i, v in enumerate(lp.b_ub):
        if v:
            lines.append(f"    RHS  R{i}  {v:.17g}")
    for i, v in enumerate(lp.b_eq):
        if v:
            lines.append(f"    RHS  E{i}  {v:.17g}")
    lines.append("BOUNDS")
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo == -math.inf and hi == math.inf:
            lines.append(f" FR BND  X{j}")
            continue
        if lo != 0.0 and lo != -math.inf:
            lines.append(f" LO BND  X{j}  {lo:.17g}")
        if lo == -math.inf:
            lines.append(f" MI BND  X{j}")
        if hi != math.inf:
            lines.append(f" UP BND  X{j}  {hi:.17g}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
