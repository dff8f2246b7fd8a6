"""Trajectory integration, long-time averages, and equilibrium finding.

Fixed-step RK4 is the reproducibility baseline (its step sequence depends
only on dt); the adaptive Dormand-Prince pair cross-checks it.  The
superior limit of a time average is approximated by the maximum over
trailing windows, reported together with a convergence slope so callers
can judge whether the horizon was long enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ergobound import _kernels
from ergobound.dynamics import TRAP_EPS, Observable, PolySystem
from ergobound.measures import DiscreteMeasure
from ergobound.polyalg import Polynomial, PolynomialVector

N_WINDOWS = 8
DEFAULT_RECORD_CAP = 100_000
RK45_DT_MIN = 1e-12


class RegionViolationError(RuntimeError):
    """Trajectory left the inflated trapping region: the region is wrong,
    not the solver."""

    def __init__(self, sys_name: str, excess: float, t: float):
        self.excess = excess
        self.t = t
        gross = excess > 1.1
        super().__init__(
            f"region violation in system {sys_name!r} at t={t:.6g}: "
            f"containment excess {excess:.6g}"
            + (" (more than 10% beyond the inflated region)" if gross else "")
        )


class StepUnderflowError(RuntimeError):
    pass


class NewtonError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegrationControl:
    """Method selection plus step/tolerance record."""

    method: str = "rk4_fixed"  # or "rk45_adaptive"
    dt: float = 1e-3
    tol: float = 1e-8
    record_stride: int | None = None
    max_records: int = 500_000

    def __post_init__(self):
        if self.method not in ("rk4_fixed", "rk45_adaptive"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "rk4_fixed" and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.method == "rk45_adaptive" and not (0 < self.tol <= 1e-2):
            raise ValueError(f"tol must lie in (0, 1e-2], got {self.tol}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: str
    dt: float | None
    tol: float | None
    seed: int | None = None
    max_region_excess: float = 0.0

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path):
        header = "t," + ",".join(f"x{i}" for i in range(self.dim))
        data = np.column_stack([self.times, self.states])
        np.savetxt(path, data, delimiter=",", header=header, comments="",
                   fmt="%.17g")


@dataclass(frozen=True)
class TimeAverageReport:
    T_total: float
    burn_in: float
    avg: float
    window_maxima: tuple[float, ...]
    limsup_proxy: float
    convergence_slope: float
    label: str = "phi"

    def to_json_dict(self) -> dict:
        return {
            "T_total": self.T_total,
            "burn_in": self.burn_in,
            "avg": self.avg,
            "window_maxima": list(self.window_maxima),
            "limsup_proxy": self.limsup_proxy,
            "convergence_slope": self.convergence_slope,
            "label": self.label,
        }


@lru_cache(maxsize=64)
def _compile_field(pv: PolynomialVector):
    """CSR-pack a polynomial vector for the numba kernels."""
    n = len(pv)
    coefs, rows, ptr = [], [], [0]
    for comp in pv.components:
        for exps, c in sorted(comp.terms.items()):
            coefs.append(c)
            rows.append(exps)
        ptr.append(len(coefs))
    if rows:
        exps_arr = np.array(rows, dtype=np.int64)
    else:
        exps_arr = np.zeros((0, n), dtype=np.int64)
    return (
        np.array(coefs, dtype=float),
        exps_arr,
        np.array(ptr, dtype=np.int64),
    )


def _region_args(sys: PolySystem):
    r = sys.region
    if r.kind == "ball":
        return (
            _kernels.REGION_BALL,
            np.array(r.center),
            np.array([r.radius]),
        )
    return _kernels.REGION_BOX, np.array(r.center), np.array(r.half_widths)


def integrate(
    sys: PolySystem,
    u0,
    T: float,
    control: IntegrationControl | None = None,
    seed: int | None = None,
) -> Trajectory:
    """Integrate du/dt = F(u) over [0, T] with runtime containment assertion.

    Raises RegionViolationError the moment the state leaves the trapping
    region inflated by the relative tolerance TRAP_EPS; this signals a bad
    region declaration rather than a solver failure.
    """
    control = control or IntegrationControl()
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (sys.dim,):
        raise ValueError(f"initial state has shape {u0.shape}, expected ({sys.dim},)")
    if not np.all(np.isfinite(u0)):
        raise ValueError("non-finite initial state")
    if not T > 0:
        raise ValueError(f"horizon T must be positive, got {T}")

    coefs, exps, ptr = _compile_field(sys.field)
    kind, center, scale = _region_args(sys)
    excess_limit = 1.0 + TRAP_EPS

    if control.method == "rk4_fixed":
        dt = control.dt
        n_full = int(math.floor(T / dt + 1e-12))
        last_dt = T - n_full * dt
        if last_dt < dt * 1e-9:
            last_dt = 0.0
        n_steps = n_full + (1 if last_dt else 0)
        stride = control.record_stride or max(1, -(-n_steps // DEFAULT_RECORD_CAP))
        times, states, nrec, status, max_excess, t_reached = _kernels.rk4_run(
            coefs, exps, ptr, u0, dt, n_full, last_dt, stride,
            kind, center, scale, excess_limit,
        )
        method_dt, method_tol = dt, None
    else:
        times, states, nrec, status, max_excess, t_reached = _kernels.rk45_run(
            coefs, exps, ptr, u0, float(T), control.tol,
            min(1e-3, T / 10), RK45_DT_MIN, control.max_records,
            kind, center, scale, excess_limit,
            _kernels._DP_A, _kernels._DP_B5, _kernels._DP_B4,
        )
        method_dt, method_tol = None, control.tol

    times = times[:nrec].copy()
    states = states[:nrec].copy()
    if status == 1:
        raise RegionViolationError(sys.name, max_excess, t_reached)
    if status == 2:
        raise RuntimeError(
            f"non-finite state in system {sys.name!r} at t={t_reached:.6g}"
        )
    if status == 3:
        raise StepUnderflowError(
            f"adaptive step fell below {RK45_DT_MIN:g} at t={t_reached:.6g}"
        )
    if status == 4:
        raise RuntimeError(
            "record buffer overflow; raise max_records or shorten the horizon"
        )
    return Trajectory(
        times=times,
        states=states,
        method=control.method,
        dt=method_dt,
        tol=method_tol,
        seed=seed,
        max_region_excess=float(max_excess),
    )


def _as_polynomial(phi) -> tuple[Polynomial, str]:
    if isinstance(phi, Observable):
        return phi.phi, phi.label
    return phi, "phi"


def time_average(traj: Trajectory, phi, burn_in: float) -> TimeAverageReport:
    """Trapezoidal time average of phi over [burn_in, T] plus window maxima.

    The final half of the post-burn-in interval is split into N_WINDOWS
    equal windows; the maximum of their averages is the finite-horizon
    surrogate for the superior limit.  The convergence slope is the
    difference between the full average and the half-horizon average.
    """
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    poly, label = _as_polynomial(phi)
    T = traj.final_time
    if burn_in >= T:
        raise ValueError(f"burn_in {burn_in} is not below the final time {T}")
    values = poly.eval_many(traj.states)
    t = traj.times
    # cumulative trapezoid: I[k] = integral of phi from t[0] to t[k]
    seg = 0.5 * (values[1:] + values[:-1]) * np.diff(t)
    cum = np.concatenate([[0.0], np.cumsum(seg)])

    def integral_at(x: float) -> float:
        return float(np.interp(x, t, cum))

    def avg_over(a: float, b: float) -> float:
        if b <= a:
            raise ValueError("empty averaging window")
        return (integral_at(b) - integral_at(a)) / (b - a)

    if np.searchsorted(t, burn_in) >= len(t) - 1:
        raise ValueError("empty post-burn-in segment")

    avg = avg_over(burn_in, T)
    mid = burn_in + 0.5 * (T - burn_in)
    width = (T - mid) / N_WINDOWS
    windows = tuple(
        avg_over(mid + i * width, mid + (i + 1) * width) for i in range(N_WINDOWS)
    )
    slope = abs(avg - avg_over(burn_in, mid))
    return TimeAverageReport(
        T_total=T,
        burn_in=float(burn_in),
        avg=avg,
        window_maxima=windows,
        limsup_proxy=max(windows),
        convergence_slope=slope,
        label=label,
    )


def empirical_measure(
    traj: Trajectory, burn_in: float, stride: int = 1
) -> DiscreteMeasure:
    """Uniformly weighted atoms on strided post-burn-in samples."""
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    start = int(np.searchsorted(traj.times, burn_in))
    pts = traj.states[start::stride]
    if len(pts) < 100:
        raise ValueError(
            f"only {len(pts)} post-burn-in samples; at least 100 required"
        )
    w = np.full(len(pts), 1.0 / len(pts))
    return DiscreteMeasure(points=pts.copy(), weights=w)


@lru_cache(maxsize=64)
def _jacobian_polys(pv: PolynomialVector):
    return pv.jacobian()


def find_equilibrium(
    sys: PolySystem, guess, tol: float = 1e-12, max_iter: int = 100
) -> np.ndarray:
    """Newton iteration on F with the analytic Jacobian.

    Returns u* with max-norm residual below tol; raises NewtonError on a
    numerically singular Jacobian (condition estimate above 1e14) or
    non-convergence.
    """
    u = np.asarray(guess, dtype=float).copy()
    if u.shape != (sys.dim,):
        raise ValueError(f"guess has shape {u.shape}, expected ({sys.dim},)")
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite guess")
    jac_rows = _jacobian_polys(sys.field)
    for _ in range(max_iter):
        f = sys.field.eval(u)
        if np.max(np.abs(f)) <= tol:
            return u
        jac = np.array([row.eval(u) for row in jac_rows])
        if np.linalg.cond(jac) > 1e14:
            raise NewtonError("Jacobian numerically singular at the iterate")
        u = u + np.linalg.solve(jac, -f)
        if not np.all(np.isfinite(u)):
            raise NewtonError("Newton iterate diverged to non-finite values")
    raise NewtonError(f"no convergence within {max_iter} iterations")


@dataclass(frozen=True)
class SpreadReport:
    """Tail averages of one observable across several starts."""

    averages: tuple[float, ...]
    proxies: tuple[float, ...]
    max_pairwise_diff: float
    mean: float
    relative_spread: float
    label: str = "phi"

    def to_json_dict(self) -> dict:
        return {
            "averages": list(self.averages),
            "limsup_proxies": list(self.proxies),
            "max_pairwise_diff": self.max_pairwise_diff,
            "mean": self.mean,
            "relative_spread": self.relative_spread,
            "label": self.label,
        }


def tail_average_spread(
    sys: PolySystem,
    phi,
    starts,
    T: float,
    burn_in: float | None = None,
    control: IntegrationControl | None = None,
) -> SpreadReport:
    """Agreement of tail averages across starts (an ergodicity diagnostic)."""
    starts = [np.asarray(s, dtype=float) for s in starts]
    if len(starts) < 2:
        raise ValueError("at least 2 starts required")
    burn = 0.1 * T if burn_in is None else burn_in
    reports = [
        time_average(integrate(sys, s, T, control), phi, burn) for s in starts
    ]
    avgs = tuple(r.avg for r in reports)
    proxies = tuple(r.limsup_proxy for r in reports)
    diffs = [abs(a - b) for i, a in enumerate(avgs) for b in avgs[i + 1 :]]
    max_diff = max(diffs)
    mean = sum(avgs) / len(avgs)
    rel = max_diff / abs(mean) if mean != 0 else math.inf
    label = phi.label if isinstance(phi, Observable) else "phi"
    return SpreadReport(
        averages=avgs,
        proxies=proxies,
        max_pairwise_diff=max_diff,
        mean=mean,
        relative_spread=rel,
        label=label,
    )


def sample_starts(sys: PolySystem, n: int, seed: int) -> list[np.ndarray]:
    """Deterministic initial conditions inside the trapping region.

    Points are drawn uniformly from the region shrunk by 10% so that
    integration never begins on the assertion boundary.
    """
    rng = np.random.default_rng(seed)
    r = sys.region
    center = np.array(r.center)
    out = []
    for _ in range(n):
        if r.kind == "ball":
            z = rng.normal(size=sys.dim)
            z /= np.linalg.norm(z)
            rad = 0.9 * r.radius * rng.uniform() ** (1.0 / sys.dim)
            out.append(center + rad * z)
        else:
            hw = np.array(r.half_widths)
            out.append(center + rng.uniform(-0.9, 0.9, size=sys.dim) * hw)
    return out
