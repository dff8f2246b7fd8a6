"""Polynomial dynamical systems, trapping regions, and the drift calculus.

The drift of an auxiliary polynomial Psi along a vector field F is
``sum_i F_i * dPsi/dx_i``, the chain-rule time derivative of Psi along
solutions.  Adding a drift to an observable never changes long-time or
stationary averages, which is what the bound engine exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ergobound.polyalg import Polynomial, PolynomialVector, grad

# Relative inflation used by the runtime containment assertion.
TRAP_EPS = 1e-6


@dataclass(frozen=True)
class CompactRegion:
    """Ball or axis-aligned box; membership is exact arithmetic on the inequalities."""

    kind: str  # "ball" | "box"
    center: tuple[float, ...]
    radius: float | None = None
    half_widths: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("ball", "box"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        c = tuple(float(x) for x in self.center)
        object.__setattr__(self, "center", c)
        if not all(math.isfinite(x) for x in c):
            raise ValueError("non-finite region center")
        if self.kind == "ball":
            r = float(self.radius)
            if not (r > 0 and math.isfinite(r)):
                raise ValueError(f"ball radius must be positive and finite, got {r}")
            object.__setattr__(self, "radius", r)
            object.__setattr__(self, "half_widths", None)
        else:
            hw = tuple(float(h) for h in self.half_widths)
            if len(hw) != len(c):
                raise ValueError("half_widths length differs from center length")
            if not all(h > 0 and math.isfinite(h) for h in hw):
                raise ValueError("box half-widths must be positive and finite")
            object.__setattr__(self, "half_widths", hw)
            object.__setattr__(self, "radius", None)

    @classmethod
    def ball(cls, center, radius: float) -> "CompactRegion":
        return cls("ball", tuple(center), radius=float(radius))

    @classmethod
    def box(cls, center, half_widths) -> "CompactRegion":
        return cls("box", tuple(center), half_widths=tuple(half_widths))

    @classmethod
    def box_from_bounds(cls, lo, hi) -> "CompactRegion":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return cls.box((lo + hi) / 2, (hi - lo) / 2)

    @property
    def dim(self) -> int:
        return len(self.center)

    def scale_vector(self) -> np.ndarray:
        """Per-axis scale mapping the region into the unit ball/box."""
        if self.kind == "ball":
            return np.full(self.dim, self.radius)
        return np.array(self.half_widths)

    def excess(self, u) -> float:
        """Containment measure: <= 1 inside, grows linearly outside."""
        u = np.asarray(u, dtype=float)
        d = u - np.array(self.center)
        if self.kind == "ball":
            return float(np.linalg.norm(d) / self.radius)
        return float(np.max(np.abs(d) / np.array(self.half_widths)))

    def contains(self, u, inflate: float = 1.0) -> bool:
        return self.excess(u) <= inflate

    def project(self, u) -> np.ndarray:
        """Nearest point of the region (Euclidean for ball, per-axis for box)."""
        u = np.asarray(u, dtype=float)
        c = np.array(self.center)
        if self.kind == "ball":
            d = u - c
            n = np.linalg.norm(d)
            if n <= self.radius:
                return u.copy()
            return c + d * (self.radius / n)
        hw = np.array(self.half_widths)
        return np.clip(u, c - hw, c + hw)

    def inflated(self, factor: float) -> "CompactRegion":
        if self.kind == "ball":
            return CompactRegion.ball(self.center, self.radius * factor)
        return CompactRegion.box(
            self.center, tuple(h * factor for h in self.half_widths)
        )

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.array(self.center)
        hw = self.scale_vector()
        return c - hw, c + hw

    def grid(self, per_dim: int) -> np.ndarray:
        """Regular grid over the bounding box, filtered to the region."""
        lo, hi = self.bounding_box()
        axes = [np.linspace(lo[i], hi[i], per_dim) for i in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        if self.kind == "ball":
            d = pts - np.array(self.center)
            pts = pts[np.einsum("ij,ij->i", d, d) <= self.radius**2]
        return pts

    def sobol_points(self, n: int, skip: int = 0) -> np.ndarray:
        """Low-discrepancy points inside the region (deterministic)."""
        from scipy.special import ndtri
        from scipy.stats import qmc

        if self.kind == "box":
            eng = qmc.Sobol(d=self.dim, scramble=False)
            eng.fast_forward(1 + skip)  # drop the all-zeros point
            raw = eng.random(n)
            lo, hi = self.bounding_box()
            return lo + raw * (hi - lo)
        # Ball: direction from inverse-normal-mapped Sobol, radius from the
        # volume-uniform power law.
        eng = qmc.Sobol(d=self.dim + 1, scramble=False)
        eng.fast_forward(1 + skip)
        raw = np.clip(eng.random(n), 1e-12, 1 - 1e-12)
        z = ndtri(raw[:, : self.dim])
        norms = np.linalg.norm(z, axis=1)
        norms[norms == 0] = 1.0
        r = self.radius * raw[:, self.dim] ** (1.0 / self.dim)
        return np.array(self.center) + z / norms[:, None] * r[:, None]

    def to_json_dict(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball", "center": list(self.center), "radius": self.radius}
        return {
            "kind": "box",
            "center": list(self.center),
            "half_widths": list(self.half_widths),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CompactRegion":
        if data["kind"] == "ball":
            return cls.ball(data["center"], data["radius"])
        return cls.box(data["center"], data["half_widths"])


@dataclass(frozen=True)
class PolySystem:
    """Polynomial vector field with a compact trapping region.

    The region is asserted at runtime by the integrator: trajectories
    started inside must stay within the region inflated by ``TRAP_EPS``.
    """

    name: str
    dim: int
    field: PolynomialVector
    region: CompactRegion
    params: dict = field(default_factory=dict)
    metadata: str = ""

    def __post_init__(self):
        if len(self.field) != self.dim:
            raise ValueError(
                f"field has {len(self.field)} components, system dim is {self.dim}"
            )
        if self.field.dim != self.dim:
            raise ValueError("field variables do not match system dimension")
        if self.region.dim != self.dim:
            raise ValueError("region dimension does not match system dimension")

    def eval_field(self, u) -> np.ndarray:
        return self.field.eval(u)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "params": dict(self.params),
            "region": self.region.to_json_dict(),
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class Observable:
    """Polynomial quantity whose long-time average is being bounded."""

    phi: Polynomial
    label: str = "phi"

    def bound_check(self, sys: PolySystem):
        if self.phi.dim != sys.dim:
            raise ValueError(
                f"observable dim {self.phi.dim} does not match system dim {sys.dim}"
            )


def drift(sys: PolySystem, psi: Polynomial) -> Polynomial:
    """Time derivative of psi along the flow: sum_i F_i * dpsi/dx_i."""
    if psi.dim != sys.dim:
        raise ValueError(f"auxiliary dim {psi.dim} does not match system dim {sys.dim}")
    g = grad(psi)
    total = Polynomial.zero(sys.dim)
    for fi, gi in zip(sys.field, g):
        if not gi.is_zero():
            total = total + fi * gi
    return total


def augmented_observable(
    sys: PolySystem, phi: Observable, psi: Polynomial
) -> Polynomial:
    """phi + drift(psi): same averages as phi, different pointwise maximum."""
    phi.bound_check(sys)
    return phi.phi + drift(sys, psi)


def monomial_basis(region: CompactRegion, degree: int) -> list[Polynomial]:
    """Monomials of total degree 1..degree in region-scaled coordinates.

    Coordinates are affinely mapped to the unit ball/box before the
    monomials are formed, which keeps the basis well conditioned on the
    region; the returned polynomials are expanded back in the original
    coordinates.  Constants are excluded (their drift vanishes).
    """
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    n = region.dim
    scale = region.scale_vector()
    center = np.array(region.center)
    # xi_i = (x_i - c_i) / r_i as degree-1 polynomials
    xi = []
    for i in range(n):
        p = (Polynomial.variable(n, i) - Polynomial.constant(n, center[i])).scale(
            1.0 / scale[i]
        )
        xi.append(p)

    def exponents_of_degree(total: int):
        if n == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in _compositions(total - first, n - 1):
                yield (first, *rest)

    basis = []
    for d in range(1, degree + 1):
        for exps in exponents_of_degree(d):
            m = Polynomial.constant(n, 1.0)
            for i, e in enumerate(exps):
                if e:
                    m = m * xi[i] ** e
            basis.append(m)
    return basis


def _compositions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, slots - 1):
            yield (first, *rest)


def basis_exponents(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples in the order produced by monomial_basis."""
    out = []
    for d in range(1, degree + 1):
        out.extend(_compositions(d, dim))
    return out


# ---------------------------------------------------------------------------
# Built-in systems
# ---------------------------------------------------------------------------

_LORENZ_DEFAULTS = {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0}
_VDP_DEFAULTS = {"mu": 1.0}
_NSE_DEFAULTS = {"kmax": 2, "nu": 0.5, "force": [{"mode_index": 0, "value": 1.0}]}

# Trapping regions grow by this factor so trajectories grazing the critical
# boundary stay strictly inside.
REGION_INFLATION = 1.05


def _check_params(name: str, params: dict, allowed: dict) -> dict:
    for key in params:
        if key not in allowed:
            raise ValueError(f"unknown parameter {key!r} for system {name!r}")
    merged = dict(allowed)
    merged.update(params)
    for key, value in merged.items():
        if key == "force":
            continue
        if not isinstance(value, (int, float)) or not math.isfinite(float(value)):
            raise ValueError(f"invalid value for parameter {key!r}: {value!r}")
    return merged


def lorenz_trap_radius(sigma: float, rho: float, beta: float) -> float:
    """Critical radius of the invariant ball centered at (0, 0, rho + sigma).

    Along V = x^2 + y^2 + (z - rho - sigma)^2 the derivative is negative
    outside the sphere of this radius (tangent on it), so any larger ball
    is forward invariant.
    """
    if beta <= 1:
        raise ValueError("trap radius formula requires beta > 1")
    return beta * (rho + sigma) / (2.0 * math.sqrt(beta - 1.0))


def builtin_system(name: str, params: dict | None = None) -> PolySystem:
    """Construct a named desk-scale system with its default trapping region.

    Supported names: ``cubic1d``, ``lorenz``, ``vanderpol``, ``nse2d``.
    Omitted parameters take recorded defaults (see each system's metadata).
    """
    params = dict(params or {})

    if name == "cubic1d":
        if params:
            raise ValueError(
                f"unknown parameter {next(iter(params))!r} for system 'cubic1d'"
            )
        x = Polynomial.variable(1, 0)
        f = x - x**3
        region = CompactRegion.box_from_bounds([-2.0], [2.0])
        return PolySystem(
            name="cubic1d",
            dim=1,
            field=PolynomialVector([f]),
            region=region,
            params={},
            metadata="pitchfork normal form; box [-2, 2] strictly trapping",
        )

    if name == "lorenz":
        p = _check_params("lorenz", params, _LORENZ_DEFAULTS)
        sigma, rho, beta = p["sigma"], p["rho"], p["beta"]
        x = Polynomial.variable(3, 0)
        y = Polynomial.variable(3, 1)
        z = Polynomial.variable(3, 2)
        f = PolynomialVector(
            [
                (y - x).scale(sigma),
                x.scale(rho) - x * z - y,
                x * y - z.scale(beta),
            ]
        )
        radius = REGION_INFLATION * lorenz_trap_radius(sigma, rho, beta)
        region = CompactRegion.ball((0.0, 0.0, rho + sigma), radius)
        return PolySystem(
            name="lorenz",
            dim=3,
            field=f,
            region=region,
            params={"sigma": sigma, "rho": rho, "beta": beta},
            metadata=(
                f"sigma={sigma:g} rho={rho:g} beta={beta:g}; "
                f"trap ball center (0,0,{rho + sigma:g}) radius {radius:.6g} "
                f"(critical estimate inflated {REGION_INFLATION:g}x)"
            ),
        )

    if name == "vanderpol":
        p = _check_params("vanderpol", params, _VDP_DEFAULTS)
        mu = p["mu"]
        x = Polynomial.variable(2, 0)
        y = Polynomial.variable(2, 1)
        f = PolynomialVector([y, (y - x * x * y).scale(mu) - x])
        region = CompactRegion.box_from_bounds([-4.0, -4.0], [4.0, 4.0])
        return PolySystem(
            name="vanderpol",
            dim=2,
            field=f,
            region=region,
            params={"mu": mu},
            metadata=(
                f"mu={mu:g}; box [-4,4]^2 covers the limit cycle for mu <= 2 "
                "(containment asserted at runtime; corners are not invariant)"
            ),
        )

    if name == "nse2d":
        from ergobound import nse_galerkin

        p = dict(_NSE_DEFAULTS)
        for key in params:
            if key not in p:
                raise ValueError(f"unknown parameter {key!r} for system 'nse2d'")
        p.update(params)
        model = nse_galerkin.build_model(
            kmax=int(p["kmax"]), nu=float(p["nu"]), force=p["force"]
        )
        return model.system

    raise ValueError(
        f"unknown system {name!r}; available: cubic1d, lorenz, vanderpol, nse2d"
    )


def observable_from_spec(spec, sys: PolySystem) -> Observable:
    """Build an observable from a config value.

    Accepts a polynomial JSON dict, or a name: ``energy`` (sum of squared
    coordinates), ``enstrophy`` (eigenvalue-weighted energy, NSE systems
    only), ``coordinate`` / ``coordinate-square`` with an optional index.
    """
    if isinstance(spec, dict) and "polynomial" in spec:
        p = Polynomial.from_json_dict(spec["polynomial"])
        if p.dim != sys.dim:
            raise ValueError(
                f"observable dim {p.dim} does not match system dim {sys.dim}"
            )
        return Observable(p, spec.get("label", "custom"))

    if isinstance(spec, str):
        spec = {"named": spec}
    if not (isinstance(spec, dict) and "named" in spec):
        raise ValueError(f"unrecognized observable spec: {spec!r}")
    name = spec["named"]
    index = int(spec.get("index", 0))
    n = sys.dim
    if name == "energy":
        terms = {}
        for i in range(n):
            e = [0] * n
            e[i] = 2
            terms[tuple(e)] = 1.0
        return Observable(Polynomial(n, terms), "energy")
    if name == "enstrophy":
        from ergobound import nse_galerkin

        model = nse_galerkin.model_for_system(sys)
        terms = {}
        for i, lam in enumerate(model.basis.eigvals):
            e = [0] * n
            e[i] = 2
            terms[tuple(e)] = lam
        return Observable(Polynomial(n, terms), "enstrophy")
    if name in ("coordinate", "coordinate-square"):
        if not 0 <= index < n:
            raise ValueError(f"coordinate index {index} out of range for dim {n}")
        p = Polynomial.variable(n, index)
        if name == "coordinate-square":
            return Observable(p * p, f"x{index}^2")
        return Observable(p, f"x{index}")
    raise ValueError(f"unknown named observable {name!r}")
