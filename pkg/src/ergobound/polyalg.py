"""Sparse multivariate polynomial algebra.

A polynomial is a dict mapping exponent tuples to float coefficients:

    x0^2*x1 + 3.0  in 2 variables  ->  {(2, 1): 1.0, (0, 0): 3.0}

The zero polynomial has an empty term map and degree -1.  Coefficients
whose magnitude falls below ``PRUNE_TOL`` (a denormal guard, not an
epsilon cut on physical coefficients) are dropped at construction, so
every stored polynomial is in canonical form.  Polynomials are immutable
after construction and safe to share across workers.
"""

from __future__ import annotations

import numpy as np

# Pure denormal guard: keeps small physical coefficients intact.
PRUNE_TOL = 1e-300

MultiIndex = tuple[int, ...]


def _validated_terms(dim: int, terms) -> dict[MultiIndex, float]:
    out: dict[MultiIndex, float] = {}
    for exps, coef in terms.items():
        exps = tuple(int(e) for e in exps)
        if len(exps) != dim:
            raise ValueError(
                f"exponent tuple {exps} has length {len(exps)}, expected {dim}"
            )
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        c = float(coef)
        if not np.isfinite(c):
            raise ValueError(f"non-finite coefficient {coef!r} for {exps}")
        if abs(c) >= PRUNE_TOL:
            out[exps] = out.get(exps, 0.0) + c
    # A cancellation during merging can drop a term back below the guard.
    return {e: c for e, c in out.items() if abs(c) >= PRUNE_TOL}


class Polynomial:
    """Immutable sparse polynomial over the reals in ``dim`` variables."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict | None = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "terms", _validated_terms(dim, terms or {}))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, value: float) -> "Polynomial":
        return cls(dim, {(0,) * dim: float(value)})

    @classmethod
    def variable(cls, dim: int, index: int) -> "Polynomial":
        """The polynomial x_index."""
        if not 0 <= index < dim:
            raise ValueError(f"variable index {index} out of range for dim {dim}")
        exps = [0] * dim
        exps[index] = 1
        return cls(dim, {tuple(exps): 1.0})

    @classmethod
    def monomial(cls, dim: int, exps, coef: float = 1.0) -> "Polynomial":
        return cls(dim, {tuple(exps): float(coef)})

    # -- queries -------------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps) -> float:
        return self.terms.get(tuple(exps), 0.0)

    # -- evaluation ----------------------------------------------------

    def eval(self, u) -> float:
        """Evaluate at a point; errors on dimension mismatch or non-finite input."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise ValueError(f"point has shape {u.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(u)):
            raise ValueError("non-finite coordinate in evaluation point")
        total = 0.0
        for exps, coef in self.terms.items():
            term = coef
            for x, e in zip(u, exps):
                if e:
                    term *= x**e
            total += term
        return total

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an (N, dim) array of points."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points have shape {pts.shape}, expected (N, {self.dim})")
        return eval_polynomials([self], pts)[0]

    # -- arithmetic ----------------------------------------------------

    def _require_same_dim(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.dim, other)
        self._require_same_dim(other)
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, 0.0) + c
        return Polynomial(self.dim, merged)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.dim, other)
        return self.__add__(other.scale(-1.0))

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        self._require_same_dim(other)
        out: dict[MultiIndex, float] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(a + b for a, b in zip(ea, eb))
                out[key] = out.get(key, 0.0) + ca * cb
        return Polynomial(self.dim, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial(self.dim, {e: c * factor for e, c in self.terms.items()})

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative powers not supported")
        result = Polynomial.constant(self.dim, 1.0)
        base = self
        n = int(exponent)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / serialization -------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"Polynomial({self.dim}, 0)"
        parts = [
            f"{c:g}*x^{list(e)}" for e, c in sorted(self.terms.items())
        ]
        return f"Polynomial({self.dim}, {' + '.join(parts)})"

    def to_json_dict(self) -> dict:
        """Canonical JSON form: exponent lists sorted lexicographically."""
        return {
            "dim": self.dim,
            "terms": [
                {"exp": list(e), "c": c} for e, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Polynomial":
        dim = int(data["dim"])
        terms = {tuple(t["exp"]): float(t["c"]) for t in data["terms"]}
        return cls(dim, terms)


def grad(p: Polynomial) -> "PolynomialVector":
    """Gradient by the exact exponent-shift rule, one component per variable."""
    comps = []
    for i in range(p.dim):
        terms: dict[MultiIndex, float] = {}
        for exps, coef in p.terms.items():
            e = exps[i]
            if e == 0:
                continue
            shifted = list(exps)
            shifted[i] = e - 1
            key = tuple(shifted)
            terms[key] = terms.get(key, 0.0) + coef * e
        comps.append(Polynomial(p.dim, terms))
    return PolynomialVector(comps)


class PolynomialVector:
    """Tuple of polynomials over a common variable space (vector field, gradient)."""

    __slots__ = ("dim", "components")

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("empty polynomial vector")
        dim = components[0].dim
        for c in components:
            if c.dim != dim:
                raise ValueError("components live in different variable spaces")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):
        raise AttributeError("PolynomialVector is immutable")

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i) -> Polynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        return (
            isinstance(other, PolynomialVector)
            and self.components == other.components
        )

    def __hash__(self):
        return hash(self.components)

    def eval(self, u) -> np.ndarray:
        return np.array([c.eval(u) for c in self.components])

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        """(len(self), N) array of component values at N points."""
        return eval_polynomials(list(self.components), pts)

    def jacobian(self) -> list["PolynomialVector"]:
        """Row i is grad(components[i])."""
        return [grad(c) for c in self.components]

    def to_json_dict(self) -> dict:
        return {"components": [c.to_json_dict() for c in self.components]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "PolynomialVector":
        return cls([Polynomial.from_json_dict(c) for c in data["components"]])


def eval_polynomials(
    polys: list[Polynomial], pts: np.ndarray, chunk: int = 200_000
) -> np.ndarray:
    """Evaluate several polynomials on the same point set.

    Shares the monomial values across polynomials: the distinct monomials are
    computed once per chunk from cached per-axis power tables, then combined
    with the coefficient matrix.  Returns an array of shape (len(polys), N).

    All polynomials must share the ambient dimension of ``pts``.
    """
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2:
        raise ValueError("pts must be a 2-D array of points")
    n_pts, dim = pts.shape
    for p in polys:
        if p.dim != dim:
            raise ValueError(f"polynomial dim {p.dim} != point dim {dim}")
    if not polys:
        return np.zeros((0, n_pts))

    monomials = sorted({e for p in polys for e in p.terms})
    if not monomials:
        return np.zeros((len(polys), n_pts))
    mono_index = {e: k for k, e in enumerate(monomials)}
    coef = np.zeros((len(polys), len(monomials)))
    for i, p in enumerate(polys):
        for e, c in p.terms.items():
            coef[i, mono_index[e]] = c

    max_pow = [max(e[i] for e in monomials) for i in range(dim)]
    out = np.empty((len(polys), n_pts))
    for start in range(0, n_pts, chunk):
        block = pts[start : start + chunk]
        n = block.shape[0]
        # powers[i][e] = x_i^e on the block
        powers = []
        for i in range(dim):
            col = block[:, i]
            ps = [np.ones(n), col]
            for _ in range(2, max_pow[i] + 1):
                ps.append(ps[-1] * col)
            powers.append(ps)
        mono_vals = np.empty((len(monomials), n))
        for k, exps in enumerate(monomials):
            v = None
            for i, e in enumerate(exps):
                if e:
                    v = powers[i][e] if v is None else v * powers[i][e]
            mono_vals[k] = 1.0 if v is None else v
        out[:, start : start + n] = coef @ mono_vals
    return out
