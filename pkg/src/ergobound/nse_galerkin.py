"""Galerkin truncation of 2-D incompressible Navier-Stokes on the periodic torus.

State coordinates are coefficients against real, divergence-free,
L2-orthonormal Stokes eigenmodes

    w_{k,cos}(x) = cos(k.x) sigma(k) / (sqrt(2) pi),
    w_{k,sin}(x) = sin(k.x) sigma(k) / (sqrt(2) pi),

with sigma(k) = (-k2, k1)/|k| and one representative per +-k pair.  The
advection tensor B[j,p,q] = <(w_p.grad) w_q, w_j> is assembled from exact
product-to-sum trigonometric integrals and antisymmetrized in (j <-> q),
which enforces the energy orthogonality <B(u,u), u> = 0 at machine
precision.  The resulting vector field

    F_j(u) = f_j - nu lam_j u_j - sum_{p,q} B[j,p,q] u_p u_q

is a degree-2 polynomial system suitable for the bound engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ergobound.dynamics import CompactRegion, PolySystem
from ergobound.polyalg import Polynomial, PolynomialVector

_NORM = 1.0 / (math.sqrt(2.0) * math.pi)  # L2 normalization on [0, 2pi]^2
_COS, _SIN = 0, 1

# Degenerate trapping-ball radius used when the force vanishes.
ZERO_FORCE_RADIUS = 1e-3

_TWO_PI_SQ = (2.0 * math.pi) ** 2


# ---------------------------------------------------------------------------
# Exact trigonometric sums on the torus
# ---------------------------------------------------------------------------

def _canon(k: tuple[int, int], parity: int, coef: float):
    """Canonical wavevector sign: cos(-k.x) = cos(k.x), sin(-k.x) = -sin(k.x)."""
    k1, k2 = k
    if k1 < 0 or (k1 == 0 and k2 < 0):
        k1, k2 = -k1, -k2
        if parity == _SIN:
            coef = -coef
    return (k1, k2, parity), coef


def _trig_mul(a: dict, b: dict) -> dict:
    """Product of two trig sums {(k1, k2, parity): coef} via product-to-sum."""
    out: dict = {}

    def add(k, parity, coef):
        if parity == _SIN and k == (0, 0):
            return  # sin(0) = 0
        key, c = _canon(k, parity, coef)
        out[key] = out.get(key, 0.0) + c

    for (a1, a2, pa), ca in a.items():
        for (b1, b2, pb), cb in b.items():
            c = 0.5 * ca * cb
            ks = (a1 + b1, a2 + b2)
            kd = (a1 - b1, a2 - b2)
            if pa == _COS and pb == _COS:
                add(kd, _COS, c)
                add(ks, _COS, c)
            elif pa == _SIN and pb == _SIN:
                add(kd, _COS, c)
                add(ks, _COS, -c)
            elif pa == _SIN and pb == _COS:
                add(ks, _SIN, c)
                add(kd, _SIN, c)
            else:  # cos * sin
                add(ks, _SIN, c)
                add(kd, _SIN, -c)
    return out


def _torus_integral(trig: dict) -> float:
    """Integral over [0, 2pi]^2: only the constant cos(0) term survives."""
    return _TWO_PI_SQ * trig.get((0, 0, _COS), 0.0)


def _triple_integral(t1, t2, t3) -> float:
    return _torus_integral(_trig_mul(_trig_mul(t1, t2), t3))


def _trig_term(k: tuple[int, int], parity: int, coef: float = 1.0) -> dict:
    key, c = _canon(k, parity, coef)
    if parity == _SIN and k == (0, 0):
        return {}
    return {key: c}


# ---------------------------------------------------------------------------
# Basis and tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mode:
    k: tuple[int, int]
    parity: int  # _COS or _SIN

    @property
    def eigval(self) -> float:
        return float(self.k[0] ** 2 + self.k[1] ** 2)

    def direction(self) -> np.ndarray:
        """Unit velocity direction, perpendicular to k."""
        k1, k2 = self.k
        norm = math.hypot(k1, k2)
        return np.array([-k2 / norm, k1 / norm])

    def velocity(self, pts: np.ndarray) -> np.ndarray:
        """(N, 2) velocity samples at (N, 2) physical points."""
        pts = np.asarray(pts, dtype=float)
        phase = pts @ np.array(self.k, dtype=float)
        wave = np.cos(phase) if self.parity == _COS else np.sin(phase)
        return _NORM * wave[:, None] * self.direction()[None, :]

    def label(self) -> str:
        tag = "c" if self.parity == _COS else "s"
        return f"k({self.k[0]},{self.k[1]}){tag}"


@dataclass(frozen=True)
class GalerkinBasis:
    """Ordered real divergence-free modes with eigenvalues sorted nondecreasing."""

    modes: tuple[Mode, ...]
    eigvals: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.modes)

    def gram_matrix(self) -> np.ndarray:
        """Analytic L2 inner products; identity for a correct basis."""
        m = self.dim
        g = np.empty((m, m))
        for a in range(m):
            for b in range(m):
                ma, mb = self.modes[a], self.modes[b]
                dot = float(ma.direction() @ mb.direction())
                integral = _torus_integral(
                    _trig_mul(
                        _trig_term(ma.k, ma.parity), _trig_term(mb.k, mb.parity)
                    )
                )
                g[a, b] = _NORM**2 * dot * integral
        return g

    def velocity(self, u, pts: np.ndarray) -> np.ndarray:
        """Physical velocity field of the state u at the given points."""
        u = np.asarray(u, dtype=float)
        out = np.zeros((len(pts), 2))
        for coef, mode in zip(u, self.modes):
            if coef:
                out += coef * mode.velocity(pts)
        return out


def build_basis(kmax: int) -> GalerkinBasis:
    """All real divergence-free modes with 0 < |k|^2 <= kmax^2, one per +-k pair."""
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    reps = []
    for k1 in range(0, kmax + 1):
        lo = 1 if k1 == 0 else -kmax
        for k2 in range(lo, kmax + 1):
            if k1 == 0 and k2 <= 0:
                continue
            if 0 < k1 * k1 + k2 * k2 <= kmax * kmax:
                reps.append((k1, k2))
    modes = [Mode(k, parity) for k in reps for parity in (_COS, _SIN)]
    modes.sort(key=lambda m: (m.eigval, m.k, m.parity))
    return GalerkinBasis(tuple(modes), tuple(m.eigval for m in modes))


@dataclass(frozen=True)
class NSETensors:
    """Viscosity, force, Stokes eigenvalues, and the sparse advection tensor."""

    nu: float
    f: np.ndarray
    lam: np.ndarray
    b_idx: np.ndarray  # (nnz, 3) int rows (j, p, q)
    b_val: np.ndarray  # (nnz,)

    @property
    def dim(self) -> int:
        return len(self.lam)

    def to_json_list(self) -> list[dict]:
        return [
            {"j": int(j), "p": int(p), "q": int(q), "B": float(v)}
            for (j, p, q), v in zip(self.b_idx, self.b_val)
        ]


def _raw_advection(modes, j: int, p: int, q: int) -> float:
    """<(w_p . grad) w_q, w_j> from the exact triad integral."""
    mp, mq, mj = modes[p], modes[q], modes[j]
    advect = float(mp.direction() @ np.array(mq.k, dtype=float))
    if advect == 0.0:
        return 0.0
    align = float(mq.direction() @ mj.direction())
    if align == 0.0:
        return 0.0
    # d/dtheta of the carrier wave: cos -> -sin, sin -> cos
    if mq.parity == _COS:
        dq = _trig_term(mq.k, _SIN, -1.0)
    else:
        dq = _trig_term(mq.k, _COS, 1.0)
    integral = _triple_integral(
        _trig_term(mp.k, mp.parity), dq, _trig_term(mj.k, mj.parity)
    )
    return _NORM**3 * advect * align * integral


def assemble_tensors(basis: GalerkinBasis, nu: float, f) -> NSETensors:
    """Assemble (nu, f, lam, B) with B antisymmetrized in (j <-> q).

    The antisymmetrization halves the raw triad integrals against their
    (j, q)-swapped counterparts; the two agree analytically (integration by
    parts on a divergence-free advecting field), so this only removes
    floating-point asymmetry and makes <B(u,u), u> = 0 exact.
    """
    f = np.asarray(f, dtype=float)
    m = basis.dim
    if f.shape != (m,):
        raise ValueError(f"force has shape {f.shape}, expected ({m},)")
    modes = basis.modes
    # Triads obey the convolution selection rule: the integral vanishes
    # unless k_j = +-k_p +- k_q, so only scan candidate (p, q) pairs.
    raw: dict[tuple[int, int, int], float] = {}
    keys_by_k: dict[tuple[int, int], list[int]] = {}
    for i, mode in enumerate(modes):
        keys_by_k.setdefault(mode.k, []).append(i)

    def candidates(kp, kq):
        out = set()
        for sp in (1, -1):
            for sq in (1, -1):
                k = (sp * kp[0] + sq * kq[0], sp * kp[1] + sq * kq[1])
                kc, _ = _canon(k, _COS, 1.0)
                out.update(keys_by_k.get(kc[:2], ()))
        return out

    for p in range(m):
        for q in range(m):
            for j in candidates(modes[p].k, modes[q].k):
                v = _raw_advection(modes, j, p, q)
                if v != 0.0:
                    raw[(j, p, q)] = v

    sym: dict[tuple[int, int, int], float] = {}
    for (j, p, q), v in raw.items():
        s = 0.5 * (v - raw.get((q, p, j), 0.0))
        if abs(s) > 1e-14:
            sym[(j, p, q)] = s
    idx = np.array(sorted(sym), dtype=np.int64).reshape(-1, 3)
    val = np.array([sym[tuple(i)] for i in idx])
    return NSETensors(
        nu=float(nu), f=f, lam=np.array(basis.eigvals), b_idx=idx, b_val=val
    )


def energy_residual(tensors: NSETensors, u) -> float:
    """Cubic contraction sum_jpq B[j,p,q] u_j u_p u_q; zero for a correct tensor."""
    u = np.asarray(u, dtype=float)
    if u.shape != (tensors.dim,):
        raise ValueError(f"state has shape {u.shape}, expected ({tensors.dim},)")
    if len(tensors.b_val) == 0:
        return 0.0
    j, p, q = tensors.b_idx.T
    return float(np.sum(tensors.b_val * u[j] * u[p] * u[q]))


def enstrophy(basis: GalerkinBasis, u) -> float:
    """Eigenvalue-weighted energy sum lam_j u_j^2 (squared velocity gradient)."""
    u = np.asarray(u, dtype=float)
    if u.shape != (basis.dim,):
        raise ValueError(f"state has shape {u.shape}, expected ({basis.dim},)")
    return float(np.sum(np.array(basis.eigvals) * u * u))


def absorbing_radius(tensors: NSETensors) -> float:
    """Radius of the forward-trapping energy ball, 1.05 * |f| / (nu * lam_1).

    Along trajectories d|u|^2/dt = 2<f,u> - 2 nu * enstrophy
    <= 2|f||u| - 2 nu lam_1 |u|^2, which is negative outside the critical
    ball.  A vanishing force degenerates to a small ball around the origin.
    """
    if tensors.nu <= 0:
        raise ValueError("absorbing radius requires nu > 0")
    fnorm = float(np.linalg.norm(tensors.f))
    if fnorm == 0.0:
        return ZERO_FORCE_RADIUS
    return 1.05 * fnorm / (tensors.nu * tensors.lam[0])


def vector_field_from_tensors(tensors: NSETensors) -> PolynomialVector:
    """Degree-<=2 polynomial components f_j - nu lam_j u_j - (B u u)_j.

    No positivity guard on nu: the inviscid configuration is a legitimate
    test fixture for energy conservation.
    """
    m = tensors.dim
    comps = []
    quad: list[dict] = [dict() for _ in range(m)]
    for (j, p, q), v in zip(tensors.b_idx, tensors.b_val):
        e = [0] * m
        e[p] += 1
        e[q] += 1
        key = tuple(e)
        quad[j][key] = quad[j].get(key, 0.0) - v
    for j in range(m):
        terms = dict(quad[j])
        lin = [0] * m
        lin[j] = 1
        terms[tuple(lin)] = terms.get(tuple(lin), 0.0) - tensors.nu * tensors.lam[j]
        if tensors.f[j]:
            terms[(0,) * m] = float(tensors.f[j])
        comps.append(Polynomial(m, terms))
    return PolynomialVector(comps)


def build_system(basis: GalerkinBasis, nu: float, f) -> PolySystem:
    """Forced-dissipative Galerkin system with its absorbing-ball region."""
    if nu <= 0:
        raise ValueError(f"viscosity must be positive, got {nu}")
    tensors = assemble_tensors(basis, nu, f)
    radius = absorbing_radius(tensors)
    region = CompactRegion.ball((0.0,) * basis.dim, radius)
    force_spec = [
        {"mode_index": int(i), "value": float(v)}
        for i, v in enumerate(tensors.f)
        if v != 0.0
    ]
    kmax = int(round(math.sqrt(max(basis.eigvals))))
    return PolySystem(
        name="nse2d",
        dim=basis.dim,
        field=vector_field_from_tensors(tensors),
        region=region,
        params={"kmax": kmax, "nu": float(nu), "force": force_spec},
        metadata=(
            f"2-D NSE Galerkin truncation, kmax={kmax}, {basis.dim} modes, "
            f"nu={nu:g}, trap ball radius {radius:g}"
        ),
    )


@dataclass(frozen=True)
class NSEModel:
    """Basis, tensors, and the assembled polynomial system, kept together."""

    basis: GalerkinBasis
    tensors: NSETensors
    system: PolySystem


def build_model(kmax: int, nu: float, force) -> NSEModel:
    """Build from config values; force is [{"mode_index": i, "value": v}, ...]."""
    basis = build_basis(int(kmax))
    f = np.zeros(basis.dim)
    for entry in force:
        i = int(entry["mode_index"])
        if not 0 <= i < basis.dim:
            raise ValueError(
                f"force mode_index {i} out of range for {basis.dim} modes"
            )
        f[i] = float(entry["value"])
    system = build_system(basis, float(nu), f)
    tensors = assemble_tensors(basis, float(nu), f)
    return NSEModel(basis=basis, tensors=tensors, system=system)


def model_for_system(sys: PolySystem) -> NSEModel:
    """Reconstruct the model backing an nse2d PolySystem from its parameters."""
    if sys.name != "nse2d":
        raise ValueError(f"system {sys.name!r} is not an NSE Galerkin system")
    return build_model(sys.params["kmax"], sys.params["nu"], sys.params["force"])
