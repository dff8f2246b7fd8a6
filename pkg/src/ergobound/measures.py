"""Discrete probability measures and their certificate diagnostics.

A candidate stationary measure is vetted through the drift moments of a
scaled monomial test basis: a measure invariant under the flow makes
every such moment vanish, so the worst normalized moment is a
dimensionless stationarity residual.  NSE measures additionally get the
mean energy balance, and auxiliary functions carry a C1-type sup norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ergobound.dynamics import CompactRegion, PolySystem, drift, monomial_basis
from ergobound.polyalg import Polynomial, eval_polynomials, grad

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point set: weights nonnegative, summing to one."""

    points: np.ndarray  # (N, dim)
    weights: np.ndarray  # (N,)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        if pts.ndim != 2 or len(pts) != len(w):
            raise ValueError("points and weights sizes disagree")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite atom location")
        if np.any(w < -1e-14):
            raise ValueError("negative weight")
        s = float(np.sum(w))
        if abs(s - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {s!r}, expected 1")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_atoms(self) -> int:
        return len(self.weights)

    @classmethod
    def dirac(cls, point) -> "DiscreteMeasure":
        return cls(points=np.atleast_2d(np.asarray(point, dtype=float)),
                   weights=np.array([1.0]))

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(pts)
        return cls(points=pts, weights=np.full(n, 1.0 / n))

    def merged(self) -> "DiscreteMeasure":
        """Combine duplicate atoms, summing their weights."""
        seen: dict[tuple, float] = {}
        for p, w in zip(self.points, self.weights):
            key = tuple(p)
            seen[key] = seen.get(key, 0.0) + w
        pts = np.array(list(seen.keys()))
        return DiscreteMeasure(points=pts, weights=np.array(list(seen.values())))

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [
                {"u": list(map(float, p)), "w": float(w)}
                for p, w in zip(self.points, self.weights)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteMeasure":
        pts = np.array([a["u"] for a in data["atoms"]], dtype=float)
        w = np.array([a["w"] for a in data["atoms"]], dtype=float)
        return cls(points=pts, weights=w)


def integrate_observable(mu: DiscreteMeasure, phi: Polynomial) -> float:
    """Expectation sum_i w_i phi(u_i)."""
    if phi.dim != mu.dim:
        raise ValueError(f"observable dim {phi.dim} != measure dim {mu.dim}")
    vals = phi.eval_many(mu.points)
    return float(np.dot(mu.weights, vals))


def drift_moments(
    mu: DiscreteMeasure, sys: PolySystem, degree: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-basis drift moments and the per-basis sup of |drift| on the atoms.

    The test basis is the scaled monomial basis of the system's region.
    Returns (moments, sups), aligned with dynamics.monomial_basis order.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if mu.dim != sys.dim:
        raise ValueError(f"measure dim {mu.dim} != system dim {sys.dim}")
    basis = monomial_basis(sys.region, degree)
    drifts = [drift(sys, psi) for psi in basis]
    vals = eval_polynomials(drifts, mu.points)  # (n_basis, n_atoms)
    moments = vals @ mu.weights
    sups = np.max(np.abs(vals), axis=1)
    return moments, sups


def stationarity_residual(mu: DiscreteMeasure, sys: PolySystem, degree: int) -> float:
    """Worst normalized drift moment over the degree-1..degree test basis.

    Each moment |sum_i w_i drift_k(u_i)| is divided by the sup of the
    drift over the atoms plus one, making the residual dimensionless and
    comparable across systems.  Zero for measures supported on equilibria
    and decaying like 1/T for empirical measures of trapped trajectories.
    """
    moments, sups = drift_moments(mu, sys, degree)
    return float(np.max(np.abs(moments) / (sups + 1.0)))


def stationarity_residual_detail(
    mu: DiscreteMeasure, sys: PolySystem, degree: int
) -> dict:
    """Normalized and raw residuals together, for reports."""
    moments, sups = drift_moments(mu, sys, degree)
    normalized = np.abs(moments) / (sups + 1.0)
    return {
        "residual": float(np.max(normalized)),
        "raw_max": float(np.max(np.abs(moments))),
        "degree": degree,
        "n_basis": len(moments),
    }


def energy_inequality_residual(mu: DiscreteMeasure, model) -> float:
    """Mean energy balance int (nu * enstrophy(u) - <f, u>) dmu.

    Nonpositive (within tolerance) for stationary measures of the forced
    dissipative system; exactly zero at equilibria by energy orthogonality
    of the advection tensor.
    """
    from ergobound.nse_galerkin import NSEModel

    if not isinstance(model, NSEModel):
        raise ValueError("expected an NSEModel")
    if mu.dim != model.basis.dim:
        raise ValueError(
            f"measure dim {mu.dim} != model dim {model.basis.dim}"
        )
    lam = np.array(model.basis.eigvals)
    ens = np.einsum("ij,j,ij->i", mu.points, lam, mu.points)
    forcing = mu.points @ model.tensors.f
    return float(np.dot(mu.weights, model.tensors.nu * ens - forcing))


def mean_enstrophy(mu: DiscreteMeasure, model) -> float:
    lam = np.array(model.basis.eigvals)
    ens = np.einsum("ij,j,ij->i", mu.points, lam, mu.points)
    return float(np.dot(mu.weights, ens))


def c1_norm(
    psi: Polynomial,
    region: CompactRegion,
    n_samples: int = 4096,
    n_refine: int = 10,
    max_ascent: int = 200,
) -> float:
    """Sampled sup over the region of |psi(u)| + |grad psi(u)|_2.

    Quasi-random samples seed projected-gradient ascent from the best
    n_refine candidates.  The result is a lower bound on the true sup and
    is reported as such.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    if psi.dim != region.dim:
        raise ValueError("polynomial dimension does not match the region")
    if psi.is_zero():
        return 0.0
    g = grad(psi)
    hess_rows = [grad(c) for c in g.components]

    def value(u: np.ndarray) -> float:
        gv = g.eval(u)
        return abs(psi.eval(u)) + float(np.linalg.norm(gv))

    def ascent_direction(u: np.ndarray) -> np.ndarray:
        gv = g.eval(u)
        gn = np.linalg.norm(gv)
        d = np.sign(psi.eval(u)) * gv
        if gn > 1e-14:
            hess = np.array([row.eval(u) for row in hess_rows])
            d = d + hess.T @ gv / gn
        return d

    pts = region.sobol_points(n_samples)
    vals = np.abs(psi.eval_many(pts)) + np.linalg.norm(
        g.eval_many(pts), axis=0
    )
    order = np.argsort(vals)[::-1][:n_refine]
    best = float(np.max(vals))
    scale = float(np.max(region.scale_vector()))
    for idx in order:
        u = pts[idx].copy()
        fu = value(u)
        step = 0.1 * scale
        for _ in range(max_ascent):
            d = ascent_direction(u)
            dn = np.linalg.norm(d)
            if dn < 1e-14:
                break
            moved = False
            while step > 1e-14 * scale:
                cand = region.project(u + step * d / dn)
                fc = value(cand)
                if fc > fu + 1e-15 * (1 + abs(fu)):
                    u, fu = cand, fc
                    moved = True
                    step *= 1.3
                    break
                step *= 0.5
            if not moved:
                break
        best = max(best, fu)
    return best
