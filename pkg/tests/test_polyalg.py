import numpy as np
import pytest

from ergobound.polyalg import Polynomial, PolynomialVector, eval_polynomials, grad


def random_poly(rng, dim, degree, n_terms):
    terms = {}
    for _ in range(n_terms):
        exps = tuple(int(e) for e in rng.integers(0, degree + 1, size=dim))
        if sum(exps) > degree:
            continue
        terms[exps] = rng.normal()
    return Polynomial(dim, terms)


def naive_eval(p, u):
    """Independent term-by-term oracle using plain Python floats."""
    total = 0.0
    for exps, coef in p.terms.items():
        term = coef
        for x, e in zip(u, exps):
            term *= float(x) ** e
        total += term
    return total


class TestEval:
    def test_constant(self):
        p = Polynomial.constant(2, 1.0)
        assert p.eval([3.7, -2.0]) == 1.0

    def test_sum_of_squares(self):
        p = Polynomial(2, {(2, 0): 1.0, (0, 2): 1.0})
        assert p.eval([1.0, 2.0]) == 5.0

    def test_matches_naive_summation(self):
        rng = np.random.default_rng(7)
        p = random_poly(rng, 3, 6, 40)
        for _ in range(100):
            u = rng.uniform(-2, 2, size=3)
            expected = naive_eval(p, u)
            got = p.eval(u)
            assert got == pytest.approx(expected, rel=1e-12, abs=1e-13)

    def test_dimension_mismatch(self):
        p = Polynomial.variable(2, 0)
        with pytest.raises(ValueError):
            p.eval([1.0])

    def test_nonfinite_input(self):
        p = Polynomial.variable(1, 0)
        with pytest.raises(ValueError):
            p.eval([np.nan])

    def test_eval_many_matches_eval(self):
        rng = np.random.default_rng(11)
        p = random_poly(rng, 3, 5, 25)
        pts = rng.uniform(-1.5, 1.5, size=(64, 3))
        vals = p.eval_many(pts)
        for i in range(64):
            assert vals[i] == pytest.approx(p.eval(pts[i]), rel=1e-12, abs=1e-13)


class TestArithmetic:
    def test_monomial_product(self):
        x = Polynomial.variable(1, 0)
        assert (x * x).terms == {(2,): 1.0}

    def test_additive_inverse_is_zero(self):
        rng = np.random.default_rng(3)
        p = random_poly(rng, 2, 4, 10)
        assert (p + p.scale(-1.0)).is_zero()

    def test_mul_evaluation_homomorphism(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            p = random_poly(rng, 2, 3, 6)
            q = random_poly(rng, 2, 3, 6)
            u = rng.uniform(-2, 2, size=2)
            lhs = (p * q).eval(u)
            rhs = p.eval(u) * q.eval(u)
            assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)

    def test_add_evaluation_homomorphism(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            p = random_poly(rng, 3, 4, 8)
            q = random_poly(rng, 3, 4, 8)
            u = rng.uniform(-1, 1, size=3)
            assert (p + q).eval(u) == pytest.approx(
                p.eval(u) + q.eval(u), rel=1e-12, abs=1e-13
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            Polynomial.variable(2, 0) + Polynomial.variable(3, 0)

    def test_scalar_ops(self):
        x = Polynomial.variable(1, 0)
        assert (2 * x + 1).eval([3.0]) == 7.0
        assert (x**3).terms == {(3,): 1.0}


class TestGrad:
    def test_power_rule(self):
        p = Polynomial(2, {(2, 0): 1.0})
        g = grad(p)
        assert g[0].terms == {(1, 0): 2.0}
        assert g[1].is_zero()

    def test_constant_gradient_is_zero(self):
        g = grad(Polynomial.constant(3, 5.0))
        assert all(c.is_zero() for c in g)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(17)
        p = random_poly(rng, 3, 5, 20)
        g = grad(p)
        h = 1e-5
        for _ in range(20):
            u = rng.uniform(-1, 1, size=3)
            for i in range(3):
                up, um = u.copy(), u.copy()
                up[i] += h
                um[i] -= h
                fd = (p.eval(up) - p.eval(um)) / (2 * h)
                exact = g[i].eval(u)
                assert exact == pytest.approx(fd, rel=1e-6, abs=1e-6)

    def test_linearity_exact_on_representable_inputs(self):
        # Integer coefficients and dyadic scalars incur no rounding at all,
        # so the identity holds coefficient-wise exactly.
        rng = np.random.default_rng(23)
        p = Polynomial(
            2, {tuple(map(int, e)): float(c) for e, c in
                zip(rng.integers(0, 4, size=(8, 2)), rng.integers(-9, 10, size=8)) if c}
        )
        q = Polynomial(
            2, {tuple(map(int, e)): float(c) for e, c in
                zip(rng.integers(0, 4, size=(8, 2)), rng.integers(-9, 10, size=8)) if c}
        )
        a, b = 2.0, -0.5
        combined = grad(p.scale(a) + q.scale(b))
        for i in range(2):
            manual = grad(p)[i].scale(a) + grad(q)[i].scale(b)
            assert combined[i] == manual

    def test_linearity_float_inputs(self):
        rng = np.random.default_rng(29)
        p = random_poly(rng, 2, 4, 8)
        q = random_poly(rng, 2, 4, 8)
        a, b = 2.5, -1.25
        combined = grad(p.scale(a) + q.scale(b))
        for i in range(2):
            manual = grad(p)[i].scale(a) + grad(q)[i].scale(b)
            for e in set(combined[i].terms) | set(manual.terms):
                assert combined[i].coefficient(e) == pytest.approx(
                    manual.coefficient(e), rel=1e-14, abs=1e-300
                )


class TestNormalization:
    def test_zero_coefficients_pruned(self):
        p = Polynomial(1, {(1,): 0.0, (2,): 1.0})
        assert (1,) not in p.terms

    def test_denormal_guard(self):
        p = Polynomial(1, {(1,): 1e-310})
        assert p.is_zero()

    def test_small_physical_coefficients_kept(self):
        p = Polynomial(1, {(1,): 1e-200})
        assert p.terms == {(1,): 1e-200}

    def test_idempotent(self):
        rng = np.random.default_rng(4)
        p = random_poly(rng, 2, 3, 10)
        q = Polynomial(p.dim, p.terms)
        assert q.terms == p.terms

    def test_zero_degree_convention(self):
        assert Polynomial.zero(2).degree == -1
        assert Polynomial.constant(2, 1.0).degree == 0

    def test_invalid_exponents(self):
        with pytest.raises(ValueError):
            Polynomial(2, {(-1, 0): 1.0})
        with pytest.raises(ValueError):
            Polynomial(2, {(1,): 1.0})


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(31)
        p = random_poly(rng, 3, 4, 12)
        assert Polynomial.from_json_dict(p.to_json_dict()) == p

    def test_canonical_order(self):
        p = Polynomial(2, {(1, 0): 2.0, (0, 1): 3.0, (0, 0): 1.0})
        exps = [t["exp"] for t in p.to_json_dict()["terms"]]
        assert exps == sorted(exps)


class TestBatchEvaluation:
    def test_many_polys_shared_points(self):
        rng = np.random.default_rng(41)
        polys = [random_poly(rng, 3, 4, 10) for _ in range(5)]
        pts = rng.uniform(-1, 1, size=(200, 3))
        vals = eval_polynomials(polys, pts)
        assert vals.shape == (5, 200)
        for i, p in enumerate(polys):
            for j in (0, 57, 199):
                assert vals[i, j] == pytest.approx(p.eval(pts[j]), rel=1e-12, abs=1e-13)

    def test_chunking_consistent(self):
        rng = np.random.default_rng(43)
        p = random_poly(rng, 2, 3, 6)
        pts = rng.uniform(-1, 1, size=(500, 2))
        a = eval_polynomials([p], pts, chunk=100)
        b = eval_polynomials([p], pts, chunk=10_000)
        np.testing.assert_array_equal(a, b)


class TestPolynomialVector:
    def test_mixed_dims_rejected(self):
        with pytest.raises(ValueError):
            PolynomialVector([Polynomial.variable(1, 0), Polynomial.variable(2, 0)])

    def test_eval(self):
        v = PolynomialVector([Polynomial.variable(2, 0), Polynomial.variable(2, 1)])
        np.testing.assert_allclose(v.eval([3.0, 4.0]), [3.0, 4.0])
