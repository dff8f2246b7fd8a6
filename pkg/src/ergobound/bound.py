"""Optimal upper bounds on stationary averages via auxiliary functions.

The bound on an observable phi over a system with trapping region K is

    U_d = min over degree-d polynomials Psi of  max over K of
          phi + drift(Psi),

a semi-infinite linear program in the coefficients of Psi.  It is solved
by an exchange (cutting-plane) loop: collect a finite point set in K,
solve the induced LP, locate the worst violation of the current
auxiliary function by global search over K, add it as a cut, repeat.

The finite LP is posed in its measure form

    max over weights w >= 0 of  sum_i w_i phi(u_i)
    s.t.  sum_i w_i = 1  and  sum_i w_i drift_k(u_i) = 0 for every k,

whose equality duals are exactly (U, -c): the bound and the auxiliary
coefficients.  The primal weights are the atomic witness measure, which
makes complementary slackness between the bound and the witness average
an identity of the solver rather than a post-hoc estimate.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ergobound import simulate
from ergobound.dynamics import (
    CompactRegion,
    Observable,
    PolySystem,
    basis_exponents,
    drift,
    monomial_basis,
)
from ergobound.lp import LinearProgram, solve_lp
from ergobound.measures import DiscreteMeasure, integrate_observable
from ergobound.polyalg import Polynomial, eval_polynomials, grad

WEIGHT_PRUNE = 1e-10
# The exchange loop polishes beyond the certification tolerance so the
# reported bound and the witness average agree to the LP tolerance.
POLISH_TOL = 1e-9
POLISH_BUDGET = 40


class BoundIterationError(RuntimeError):
    """Outer loop exhausted; carries the best bound and final violation."""

    def __init__(self, best_bound: float, violation: float, iterations: int):
        self.best_bound = best_bound
        self.violation = violation
        self.iterations = iterations
        super().__init__(
            f"exchange loop did not converge in {iterations} iterations: "
            f"best bound {best_bound:.12g}, violation {violation:.3g}"
        )


class WeakDualityError(RuntimeError):
    pass


@dataclass(frozen=True)
class InnerMaxConfig:
    grid_per_dim: int = 201
    n_multistarts: int = 4096
    ascent_tol: float = 1e-12
    n_refine: int = 20
    max_ascent: int = 300


# ---------------------------------------------------------------------------
# Inner maximization over the region
# ---------------------------------------------------------------------------

def _project_ascend(
    g: Polynomial,
    ggrad,
    region: CompactRegion,
    u0: np.ndarray,
    cfg: InnerMaxConfig,
) -> tuple[np.ndarray, float]:
    """Refine one start to a local maximum of g over the region.

    Constrained quasi-Newton with analytic gradients (bound-constrained
    BFGS on boxes, SLSQP with the ball inequality on balls); plain
    steepest ascent stalls on the stiff ridges these drift surfaces
    produce.  Falls back to the start if the solver misbehaves.
    """
    from scipy import optimize

    u0 = region.project(np.asarray(u0, dtype=float))
    f0 = g.eval(u0)

    def neg(u):
        return -g.eval(u)

    def neg_grad(u):
        return -ggrad.eval(u)

    try:
        if region.kind == "box":
            lo, hi = region.bounding_box()
            res = optimize.minimize(
                neg,
                u0,
                jac=neg_grad,
                method="L-BFGS-B",
                bounds=list(zip(lo, hi)),
                options={
                    "maxiter": cfg.max_ascent,
                    "ftol": 1e-16,
                    "gtol": cfg.ascent_tol,
                },
            )
        else:
            c = np.array(region.center)
            r2 = region.radius**2
            res = optimize.minimize(
                neg,
                u0,
                jac=neg_grad,
                method="SLSQP",
                constraints=[
                    {
                        "type": "ineq",
                        "fun": lambda u: r2 - float((u - c) @ (u - c)),
                        "jac": lambda u: -2.0 * (u - c),
                    }
                ],
                options={"maxiter": cfg.max_ascent, "ftol": 1e-16},
            )
        u = region.project(np.asarray(res.x, dtype=float))
        f = g.eval(u)
    except (ValueError, FloatingPointError):
        return u0, f0
    if not np.all(np.isfinite(u)) or f < f0:
        return u0, f0
    return u, f


def _sphere_shell(region: CompactRegion, n: int) -> np.ndarray:
    """Points on the boundary sphere of a ball region.

    The grid filtered to the ball under-samples the shell, where maxima of
    observable-plus-drift frequently sit; an explicit shell removes the
    blind spot.
    """
    c = np.array(region.center)
    r = region.radius
    if region.dim == 1:
        return np.array([c - r, c + r])
    if region.dim == 2:
        th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return c + r * np.stack([np.cos(th), np.sin(th)], axis=1)
    if region.dim == 3:
        # Fibonacci sphere
        i = np.arange(n) + 0.5
        phi_ang = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / n
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = np.stack([rho * np.cos(phi_ang), rho * np.sin(phi_ang), z], axis=1)
        return c + r * pts
    # higher dimensions: normalized low-discrepancy directions
    raw = region.sobol_points(n) - c
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return c + r * raw / norms


def _scan_points(region: CompactRegion, cfg: InnerMaxConfig) -> np.ndarray:
    if region.dim <= 3:
        pts = region.grid(cfg.grid_per_dim)
        if region.kind == "ball":
            n_shell = {1: 2, 2: 4096, 3: 8192}[region.dim]
            pts = np.vstack([pts, _sphere_shell(region, n_shell)])
        return pts
    pts = region.sobol_points(cfg.n_multistarts)
    if region.kind == "ball":
        pts = np.vstack([pts, _sphere_shell(region, cfg.n_multistarts // 4)])
    return pts


def _candidate_maxima(
    g: Polynomial,
    region: CompactRegion,
    cfg: InnerMaxConfig,
    scan: np.ndarray | None = None,
    scan_values: np.ndarray | None = None,
) -> list[tuple[np.ndarray, float]]:
    """Refined local maxima from the best scan points, best first."""
    if scan is None:
        scan = _scan_points(region, cfg)
    if scan_values is None:
        scan_values = g.eval_many(scan)
    order = np.argsort(scan_values)[::-1][: cfg.n_refine]
    ggrad = grad(g)
    found: list[tuple[np.ndarray, float]] = []
    scale = float(np.max(region.scale_vector()))
    for idx in order:
        u, f = _project_ascend(g, ggrad, region, scan[idx], cfg)
        dup = any(np.linalg.norm(u - v) <= 1e-9 * scale for v, _ in found)
        if not dup:
            found.append((u, f))
    found.sort(key=lambda t: -t[1])
    return found


def inner_max(
    g: Polynomial, region: CompactRegion, cfg: InnerMaxConfig | None = None
) -> tuple[np.ndarray, float]:
    """Best found maximizer of g over the region.

    Dense grid plus ascent for dimension <= 3; low-discrepancy multistart
    plus ascent above that.  The value is a lower bound on the true
    maximum; in dimension > 3 the search is heuristic and bound reports
    carry certified=False.
    """
    if g.dim != region.dim:
        raise ValueError("polynomial dimension does not match the region")
    cfg = cfg or InnerMaxConfig()
    cands = _candidate_maxima(g, region, cfg)
    return cands[0]


# ---------------------------------------------------------------------------
# Auxiliary space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuxiliarySpace:
    """Scaled monomial basis of auxiliary functions with precomputed drifts."""

    dim: int
    degree: int
    region: CompactRegion
    basis: tuple[Polynomial, ...]
    drift_basis: tuple[Polynomial, ...]
    exponents: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, sys: PolySystem, degree: int) -> "AuxiliarySpace":
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        if degree == 0:
            basis = ()
            exps = ()
        else:
            basis = tuple(monomial_basis(sys.region, degree))
            exps = tuple(basis_exponents(sys.dim, degree))
        drifts = tuple(drift(sys, psi) for psi in basis)
        return cls(
            dim=sys.dim,
            degree=degree,
            region=sys.region,
            basis=basis,
            drift_basis=drifts,
            exponents=exps,
        )

    @property
    def size(self) -> int:
        return len(self.basis)

    def combine(self, coefficients) -> Polynomial:
        """The auxiliary polynomial sum_k c_k basis_k."""
        out = Polynomial.zero(self.dim)
        for c, psi in zip(coefficients, self.basis):
            if c:
                out = out + psi.scale(float(c))
        return out

    def combine_drift(self, coefficients) -> Polynomial:
        out = Polynomial.zero(self.dim)
        for c, dk in zip(coefficients, self.drift_basis):
            if c:
                out = out + dk.scale(float(c))
        return out


# ---------------------------------------------------------------------------
# Bound result
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundResult:
    bound: float
    degree: int
    coefficients: np.ndarray
    basis_exponents: tuple
    witness: DiscreteMeasure
    max_violation: float
    iterations: int
    point_set_size: int
    duality_gap: float
    certified: bool
    witness_moment_residual: float
    system_name: str
    phi_label: str
    gap_vs_sim: float | None = None
    seconds: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "bound": self.bound,
            "degree": self.degree,
            "coefficients": [
                {"exp": list(e), "c": float(c)}
                for e, c in zip(self.basis_exponents, self.coefficients)
            ],
            "witness": self.witness.to_json_dict(),
            "max_violation": self.max_violation,
            "iterations": self.iterations,
            "point_set_size": self.point_set_size,
            "duality_gap": self.duality_gap,
            "certified": self.certified,
            "witness_moment_residual": self.witness_moment_residual,
            "system": self.system_name,
            "phi": self.phi_label,
            "gap_vs_sim": self.gap_vs_sim,
        }


def extract_dual_measure(points: np.ndarray, solution) -> DiscreteMeasure:
    """Atomic measure from the weights of the optimally solved exchange LP.

    Weights below WEIGHT_PRUNE are dropped and the rest renormalized; at a
    simplex vertex the discarded mass is rounding noise, never structure.
    """
    if solution.status != "optimal":
        raise ValueError(f"LP status {solution.status!r}, expected optimal")
    w = np.asarray(solution.x, dtype=float)
    keep = w > WEIGHT_PRUNE
    if not np.any(keep):
        raise ValueError("no atom carries weight above the pruning threshold")
    w = w[keep]
    return DiscreteMeasure(points=np.asarray(points)[keep], weights=w / w.sum())


# ---------------------------------------------------------------------------
# Initial point set
# ---------------------------------------------------------------------------

def _initial_points(
    sys: PolySystem, traj_horizon: float, n_traj: int = 160
) -> np.ndarray:
    region = sys.region
    pieces = []
    if region.dim == 1:
        pieces.append(region.grid(33))
    elif region.dim == 2:
        pieces.append(region.grid(13))
    elif region.dim == 3:
        pieces.append(region.grid(9))
    else:
        pieces.append(region.sobol_points(256))

    # Trajectory samples concentrate cuts near the attractor.
    center = np.array(region.center)
    scale = region.scale_vector()
    u0 = region.project(center + 0.05 * scale)
    try:
        traj = simulate.integrate(
            sys, u0, traj_horizon,
            simulate.IntegrationControl(dt=min(1e-2, traj_horizon / 2000)),
        )
        states = traj.states[len(traj.states) // 4 :]
        stride = max(1, len(states) // n_traj)
        pieces.append(states[::stride])
        traj_end = traj.states[-1]
    except RuntimeError:
        traj_end = center

    # Equilibria make the measure LP feasible from the first iteration:
    # every drift vanishes there, so a Dirac at an equilibrium is always
    # an admissible column.
    guesses = [center, traj_end]
    for i in range(min(sys.dim, 3)):
        for s in (-0.75, 0.75):
            off = np.zeros(sys.dim)
            off[i] = s * scale[i]
            guesses.append(center + off)
    for guess in guesses:
        try:
            eq = simulate.find_equilibrium(sys, guess, tol=1e-12)
        except (RuntimeError, ValueError):
            continue
        if region.contains(eq, inflate=1.0 + 1e-9):
            pieces.append(eq[None, :])
    pts = np.vstack(pieces)
    return _dedupe(pts, float(np.max(scale)))


def _dedupe(pts: np.ndarray, scale: float, existing: np.ndarray | None = None):
    """Remove near-duplicate points (hash on a fine lattice)."""
    cell = 1e-12 * scale
    seen = set()
    if existing is not None:
        for p in existing:
            seen.add(tuple(np.round(p / cell).astype(np.int64)))
    keep = []
    for i, p in enumerate(pts):
        key = tuple(np.round(p / cell).astype(np.int64))
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return pts[keep]


# ---------------------------------------------------------------------------
# The exchange loop
# ---------------------------------------------------------------------------

def compute_bound(
    sys: PolySystem,
    phi: Observable | Polynomial,
    degree: int,
    tol: float = 1e-6,
    max_outer: int = 200,
    inner_cfg: InnerMaxConfig | None = None,
    sim_proxy: float | None = None,
    traj_horizon: float = 40.0,
    initial_points: np.ndarray | None = None,
) -> BoundResult:
    """Certified upper bound U_d with optimal coefficients and dual witness.

    Terminates when the worst violation of phi + drift by the current
    auxiliary function over the region falls below tol (the loop keeps
    polishing toward POLISH_TOL while it makes progress, so the witness
    average matches the bound at LP precision).  The reported bound is the
    LP value plus any remaining positive violation, hence always valid up
    to the inner search; in dimension > 3 that search is heuristic and the
    result carries certified=False.
    """
    t_start = time.perf_counter()
    if isinstance(phi, Observable):
        phi_poly, phi_label = phi.phi, phi.label
    else:
        phi_poly, phi_label = phi, "phi"
    if phi_poly.dim != sys.dim:
        raise ValueError("observable dimension does not match the system")
    cfg = inner_cfg or InnerMaxConfig()
    aux = AuxiliarySpace.build(sys, degree)
    region = sys.region
    scale = float(np.max(region.scale_vector()))
    stop_tol = min(tol, POLISH_TOL)

    if initial_points is not None and len(initial_points):
        pts = _dedupe(np.asarray(initial_points, dtype=float), scale)
    else:
        pts = _initial_points(sys, traj_horizon)

    phi_vals = phi_poly.eval_many(pts)
    drift_vals = (
        eval_polynomials(list(aux.drift_basis), pts)
        if aux.size
        else np.zeros((0, len(pts)))
    )

    # Iteration-scale scan cache: drift values are linear in the auxiliary
    # coefficients, so scan values cost one mat-vec per iteration.
    if region.dim <= 3:
        per_dim = {1: 4001, 2: 201, 3: 101}[region.dim]
        scan = region.grid(per_dim)
        if region.kind == "ball":
            n_shell = {1: 2, 2: 4096, 3: 8192}[region.dim]
            scan = np.vstack([scan, _sphere_shell(region, n_shell)])
    else:
        scan = np.vstack([region.sobol_points(cfg.n_multistarts), pts])
        if region.kind == "ball":
            scan = np.vstack(
                [scan, _sphere_shell(region, cfg.n_multistarts // 4)]
            )
    scan_phi = phi_poly.eval_many(scan)
    scan_drift = (
        eval_polynomials(list(aux.drift_basis), scan)
        if aux.size
        else np.zeros((0, len(scan)))
    )

    state = {
        "warm": None,
        "pts": pts,
        "phi_vals": phi_vals,
        "drift_vals": drift_vals,
        "solution": None,
        "u_lp": math.inf,
        "iterations": 0,
    }

    def add_points(new_pts: np.ndarray) -> int:
        new_pts = _dedupe(new_pts, scale, existing=state["pts"])
        if len(new_pts) == 0:
            return 0
        state["pts"] = np.vstack([state["pts"], new_pts])
        state["phi_vals"] = np.concatenate(
            [state["phi_vals"], phi_poly.eval_many(new_pts)]
        )
        if aux.size:
            state["drift_vals"] = np.hstack(
                [
                    state["drift_vals"],
                    eval_polynomials(list(aux.drift_basis), new_pts),
                ]
            )
        return len(new_pts)

    def solve_current():
        lp = LinearProgram(
            c=-state["phi_vals"],
            a_eq=np.vstack(
                [np.ones((1, len(state["pts"]))), state["drift_vals"]]
            ),
            b_eq=np.concatenate([[1.0], np.zeros(aux.size)]),
        )
        sol = solve_lp(lp, warm_basis=state["warm"])
        if sol.status != "optimal":
            raise RuntimeError(
                f"exchange LP unexpectedly {sol.status}; the point set must "
                "contain an equilibrium or another stationary combination"
            )
        state["warm"] = sol.basis_labels
        state["solution"] = sol
        state["u_lp"] = -sol.objective
        state["solved_n"] = len(state["pts"])
        return -sol.duals_eq[1:] if aux.size else np.zeros(0)

    def current_g(coeffs) -> Polynomial:
        return phi_poly + aux.combine_drift(coeffs)

    def exchange_pass() -> float:
        """Run the fast-scan exchange until the violation stops improving."""
        violation = math.inf
        prev_violation = math.inf
        stall = 0
        polish_left = POLISH_BUDGET
        while state["iterations"] < max_outer:
            state["iterations"] += 1
            coeffs = solve_current()
            scan_vals = scan_phi + (
                coeffs @ scan_drift if aux.size else 0.0
            )
            cands = _candidate_maxima(
                current_g(coeffs), region, cfg, scan=scan, scan_values=scan_vals
            )
            best_val = cands[0][1]
            violation = best_val - state["u_lp"]
            if violation <= stop_tol:
                return violation
            if violation <= tol:
                polish_left -= 1
                improving = violation <= prev_violation - 0.01 * max(
                    prev_violation, 1e-300
                )
                stall = 0 if improving else stall + 1
                if polish_left <= 0 or stall >= 5:
                    return violation
            prev_violation = min(prev_violation, violation)
            cut_level = best_val - max(tol, 1e-7 * (1.0 + abs(best_val)))
            cuts = [u for u, v in cands if v >= cut_level]
            # bulk cuts: every scan point near the violation level shrinks
            # the feasible coefficient set in one LP solve
            bulk_level = state["u_lp"] + max(0.25 * violation, stop_tol)
            bulk = np.where(scan_vals >= bulk_level)[0]
            if len(bulk):
                order = np.argsort(scan_vals[bulk])[::-1][:64]
                cuts.extend(scan[bulk[order]])
            added = add_points(np.array(cuts, dtype=float))
            if added == 0:
                # worst point duplicates an existing cut: LP noise floor
                return violation
        return violation

    violation = math.inf
    for _ in range(6):
        violation = exchange_pass()
        if violation > tol or state["iterations"] >= max_outer:
            break
        # Certify with the full-resolution search; feed any violation it
        # finds back into the cut set and rerun the fast pass.
        coeffs = (
            -state["solution"].duals_eq[1:] if aux.size else np.zeros(0)
        )
        cert_cands = _candidate_maxima(current_g(coeffs), region, cfg)
        cert_violation = cert_cands[0][1] - state["u_lp"]
        if cert_violation <= max(violation, stop_tol):
            violation = max(violation, cert_violation)
            break
        cut_level = cert_cands[0][1] - max(tol, 1e-7 * (1.0 + abs(cert_cands[0][1])))
        added = add_points(
            np.array(
                [u for u, v in cert_cands if v >= cut_level], dtype=float
            )
        )
        violation = cert_violation
        if added == 0:
            break

    if violation > tol:
        raise BoundIterationError(
            best_bound=state["u_lp"] + max(0.0, violation),
            violation=violation,
            iterations=state["iterations"],
        )

    if state.get("solved_n") != len(state["pts"]):
        solve_current()
    best_solution = state["solution"]
    u_lp = state["u_lp"]
    pts = state["pts"]
    drift_vals = state["drift_vals"]
    iterations = state["iterations"]
    final_violation = violation

    witness = extract_dual_measure(pts, best_solution)
    moment_residual = (
        float(np.max(np.abs(drift_vals @ best_solution.x)))
        if aux.size
        else 0.0
    )
    bound_value = u_lp + max(0.0, final_violation)
    coeffs = -best_solution.duals_eq[1:] if aux.size else np.zeros(0)
    return BoundResult(
        bound=float(bound_value),
        degree=degree,
        coefficients=np.asarray(coeffs),
        basis_exponents=aux.exponents,
        witness=witness,
        max_violation=float(final_violation),
        iterations=iterations,
        point_set_size=len(pts),
        duality_gap=float(best_solution.residuals.get("gap", 0.0)),
        certified=sys.dim <= 3,
        witness_moment_residual=moment_residual,
        system_name=sys.name,
        phi_label=phi_label,
        gap_vs_sim=(None if sim_proxy is None else float(bound_value - sim_proxy)),
        seconds=time.perf_counter() - t_start,
    )


# ---------------------------------------------------------------------------
# Consistency checks and sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakDualityReport:
    bound: float
    candidate_values: tuple[float, ...]
    candidate_slacks: tuple[float, ...]
    candidate_margins: tuple[float, ...]
    sim_proxies: tuple[float, ...]
    sim_margins: tuple[float, ...]
    trivial_bound: float
    ok: bool

    def to_json_dict(self) -> dict:
        return {
            "bound": self.bound,
            "candidate_values": list(self.candidate_values),
            "candidate_slacks": list(self.candidate_slacks),
            "candidate_margins": list(self.candidate_margins),
            "sim_proxies": list(self.sim_proxies),
            "sim_margins": list(self.sim_margins),
            "trivial_bound": self.trivial_bound,
            "ok": self.ok,
        }


def weak_duality_check(
    sys: PolySystem,
    phi: Observable | Polynomial,
    result: BoundResult,
    candidates=(),
    sim_reports=(),
    tol: float = 1e-6,
) -> WeakDualityReport:
    """Assert the bound dominates every admissible lower estimate.

    For each candidate measure mu the requirement is
    ``U >= int phi dmu - slack(mu)`` with
    ``slack(mu) = |c*|_1 * max_k |int drift_k dmu|``: the candidate's own
    stationarity defect scaled by the auxiliary coefficients.  Simulated
    superior-limit proxies must satisfy ``U >= proxy - tol``.  Violations
    raise WeakDualityError naming the offender.
    """
    phi_poly = phi.phi if isinstance(phi, Observable) else phi
    basis = monomial_basis(sys.region, result.degree) if result.degree else []
    drifts = [drift(sys, psi) for psi in basis]
    c_norm = float(np.sum(np.abs(result.coefficients)))

    cand_vals, cand_slacks, cand_margins = [], [], []
    for i, mu in enumerate(candidates):
        value = integrate_observable(mu, phi_poly)
        if drifts:
            moments = eval_polynomials(drifts, mu.points) @ mu.weights
            slack = c_norm * float(np.max(np.abs(moments)))
        else:
            slack = 0.0
        margin = result.bound + slack - value
        cand_vals.append(value)
        cand_slacks.append(slack)
        cand_margins.append(margin)
        if margin < -tol:
            raise WeakDualityError(
                f"candidate measure #{i} violates the bound: "
                f"value {value:.12g} > bound {result.bound:.12g} + "
                f"slack {slack:.3g}"
            )

    sim_proxies, sim_margins = [], []
    for i, rep in enumerate(sim_reports):
        proxy = rep.limsup_proxy
        margin = result.bound - (proxy - tol)
        sim_proxies.append(proxy)
        sim_margins.append(margin)
        if margin < 0:
            raise WeakDualityError(
                f"simulation report #{i} violates the bound: "
                f"limsup proxy {proxy:.12g} exceeds bound "
                f"{result.bound:.12g} + tol"
            )

    _, trivial = inner_max(phi_poly, sys.region)
    if result.bound > trivial + max(tol, 1e-9 * (1.0 + abs(trivial))):
        raise WeakDualityError(
            f"bound {result.bound:.12g} exceeds the trivial bound "
            f"{trivial:.12g} (zero auxiliary function)"
        )
    return WeakDualityReport(
        bound=result.bound,
        candidate_values=tuple(cand_vals),
        candidate_slacks=tuple(cand_slacks),
        candidate_margins=tuple(cand_margins),
        sim_proxies=tuple(sim_proxies),
        sim_margins=tuple(sim_margins),
        trivial_bound=float(trivial),
        ok=True,
    )


@dataclass(frozen=True)
class SweepRow:
    degree: int
    bound: float
    gap_vs_sim: float | None
    seconds: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    results: tuple[BoundResult, ...]

    def to_csv(self) -> str:
        lines = ["d,U_d,gap_vs_sim,seconds"]
        for r in self.rows:
            gap = "" if r.gap_vs_sim is None else f"{r.gap_vs_sim:.17g}"
            lines.append(f"{r.degree},{r.bound:.17g},{gap},{r.seconds:.6g}")
        return "\n".join(lines) + "\n"


def degree_sweep(
    sys: PolySystem,
    phi: Observable | Polynomial,
    degrees,
    tol: float = 1e-6,
    sim_proxy: float | None = None,
    inner_cfg: InnerMaxConfig | None = None,
) -> SweepResult:
    """Bounds across ascending degrees, reusing accumulated cut points.

    Nested auxiliary spaces make the bound nonincreasing in the degree;
    carrying the cut set forward both accelerates the higher degrees and
    keeps the monotonicity numerically tight.
    """
    degrees = list(degrees)
    if degrees != sorted(degrees):
        raise ValueError("degrees must be ascending")
    rows = []
    results = []
    carried: np.ndarray | None = None
    for d in degrees:
        t0 = time.perf_counter()
        res = compute_bound(
            sys,
            phi,
            d,
            tol=tol,
            sim_proxy=sim_proxy,
            inner_cfg=inner_cfg,
            initial_points=carried,
        )
        seconds = time.perf_counter() - t0
        rows.append(
            SweepRow(
                degree=d,
                bound=res.bound,
                gap_vs_sim=res.gap_vs_sim,
                seconds=seconds,
            )
        )
        results.append(res)
        carried = (
            res.witness.points
            if carried is None
            else np.vstack([carried, res.witness.points])
        )
    return SweepResult(rows=tuple(rows), results=tuple(results))
