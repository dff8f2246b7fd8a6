import itertools
import math

import numpy as np
import pytest

from ergobound.lp import (
    DEFAULT_TOL,
    LinearProgram,
    LPError,
    duality_report,
    solve_lp,
    write_mps,
)


def random_bounded_lp(seed):
    """Feasible LP with box bounds, so vertex enumeration is exhaustive."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    m = int(rng.integers(1, 9))
    a = rng.normal(size=(m, n))
    x0 = rng.uniform(-1, 1, size=n)
    b = a @ x0 + rng.uniform(0.1, 1.0, size=m)
    c = rng.normal(size=n)
    bound = 3.0
    lp = LinearProgram(
        c=c, a_ub=a, b_ub=b, bounds=[(-bound, bound)] * n
    )
    return lp


def enumerate_vertices_min(lp):
    """Brute-force oracle: best objective over all basic feasible vertices.

    Candidate vertices come from every choice of n active constraints among
    the inequality rows and the bound faces.
    """
    n = lp.n_vars
    rows = [(lp.a_ub[i], lp.b_ub[i]) for i in range(len(lp.b_ub))]
    for j, (lo, hi) in enumerate(lp.bounds):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append((e, hi))
        rows.append((-e, -lo))
    best = math.inf
    lo_v = np.array([b[0] for b in lp.bounds])
    hi_v = np.array([b[1] for b in lp.bounds])
    for combo in itertools.combinations(range(len(rows)), n):
        a = np.array([rows[i][0] for i in combo])
        b = np.array([rows[i][1] for i in combo])
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        if np.abs(np.linalg.det(a)) < 1e-10:
            continue
        feasible = (
            np.all(lp.a_ub @ x <= lp.b_ub + 1e-9)
            and np.all(x >= lo_v - 1e-9)
            and np.all(x <= hi_v + 1e-9)
        )
        if feasible:
            best = min(best, float(lp.c @ x))
    return best


class TestBasics:
    def test_maximize_with_unit_dual(self):
        lp = LinearProgram(c=[-1.0], a_ub=[[1.0]], b_ub=[1.0], bounds=[(0, None)])
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        assert sol.x[0] == pytest.approx(1.0, abs=1e-10)
        assert sol.duals_ineq[0] == pytest.approx(1.0, abs=1e-10)

    def test_infeasible(self):
        lp = LinearProgram(
            c=[1.0], a_ub=[[1.0], [-1.0]], b_ub=[1.0, -2.0], bounds=[(None, None)]
        )
        assert solve_lp(lp).status == "infeasible"

    def test_unbounded(self):
        lp = LinearProgram(c=[-1.0], a_ub=[[-1.0]], b_ub=[0.0], bounds=[(None, None)])
        assert solve_lp(lp).status == "unbounded"

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            LinearProgram(c=[1.0, 2.0], a_ub=[[1.0]], b_ub=[1.0])

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            LinearProgram(c=[np.nan])

    def test_equality_with_free_vars(self):
        # min x + y  s.t.  x + y = 2
        lp = LinearProgram(
            c=[1.0, 1.0], a_eq=[[1.0, 1.0]], b_eq=[2.0],
            bounds=[(None, None)] * 2,
        )
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(2.0, abs=1e-10)
        assert sol.duals_eq[0] == pytest.approx(-1.0, abs=1e-10)

    def test_fixed_variable_via_bounds(self):
        lp = LinearProgram(
            c=[1.0, -1.0],
            a_ub=[[1.0, 1.0]],
            b_ub=[4.0],
            bounds=[(2.0, 2.0), (0.0, None)],
        )
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        np.testing.assert_allclose(sol.x, [2.0, 2.0], atol=1e-9)


class TestRandomInstances:
    def test_matches_vertex_enumeration(self):
        for seed in range(200):
            lp = random_bounded_lp(seed)
            sol = solve_lp(lp)
            assert sol.status == "optimal", f"seed {seed}"
            oracle = enumerate_vertices_min(lp)
            assert sol.objective == pytest.approx(oracle, abs=1e-9, rel=1e-9), (
                f"seed {seed}"
            )

    def test_duality_report_clean_on_random(self):
        for seed in range(60):
            lp = random_bounded_lp(seed)
            sol = solve_lp(lp)
            rep = duality_report(lp, sol)
            assert rep.duality_gap <= 1e-8 * (1 + abs(sol.objective))
            assert rep.max_slackness_violation <= 1e-8 * (1 + abs(sol.objective))
            assert rep.primal_infeasibility <= 1e-8
            assert rep.dual_infeasibility <= 1e-8


class TestDualityReport:
    def test_requires_optimal(self):
        lp = LinearProgram(c=[-1.0], a_ub=[[-1.0]], b_ub=[0.0], bounds=[(None, None)])
        sol = solve_lp(lp)
        with pytest.raises(LPError):
            duality_report(lp, sol)

    def test_perturbation_detected(self):
        lp = random_bounded_lp(7)
        sol = solve_lp(lp)
        # nonbasic coordinate: one sitting on a bound face
        j = int(np.argmax(np.abs(np.abs(sol.x) - 3.0) < 1e-7))
        x = sol.x.copy()
        x[j] += 1e-3
        from dataclasses import replace

        perturbed = replace(sol, x=x)
        rep = duality_report(lp, perturbed)
        worst = max(
            rep.max_slackness_violation,
            rep.primal_infeasibility,
            rep.duality_gap,
        )
        assert worst > 1e-4

    def test_weak_duality_on_suboptimal_pair(self):
        # min c'x, Ax <= b, x >= 0 against a hand-built feasible dual
        rng = np.random.default_rng(3)
        n, m = 4, 5
        a = rng.uniform(0.5, 2.0, size=(m, n))
        b = rng.uniform(1.0, 3.0, size=m)
        c = rng.uniform(0.5, 1.5, size=n)
        lp = LinearProgram(c=c, a_ub=a, b_ub=b, bounds=[(0, None)] * n)
        x_feas = np.full(n, float(np.min(b / np.sum(a, axis=1))) * 0.5)
        assert np.all(a @ x_feas <= b)
        # dual of min{c'x : Ax <= b, x >= 0}: max{-l'b : c + A'l >= 0, l >= 0};
        # l = 0 is feasible with dual objective 0
        primal_value = float(c @ x_feas)
        dual_value = 0.0
        assert primal_value >= dual_value - 1e-12


class TestScalingAndDeterminism:
    def test_row_scaling_robustness(self):
        lp = random_bounded_lp(11)
        sol = solve_lp(lp)
        a2 = lp.a_ub.copy()
        b2 = lp.b_ub.copy()
        a2[0] *= 1e3
        b2[0] *= 1e3
        lp2 = LinearProgram(c=lp.c, a_ub=a2, b_ub=b2, bounds=lp.bounds)
        sol2 = solve_lp(lp2)
        assert sol2.objective == pytest.approx(
            sol.objective, rel=1e-7, abs=1e-9
        )

    def test_bit_identical_repeat(self):
        lp = random_bounded_lp(23)
        s1 = solve_lp(lp)
        s2 = solve_lp(lp)
        assert s1.iterations == s2.iterations
        np.testing.assert_array_equal(s1.x, s2.x)
        np.testing.assert_array_equal(s1.duals_ineq, s2.duals_ineq)

    def test_dual_of_dual_round_trip(self):
        # primal: min c'x, Ax <= b, x >= 0 has dual
        # min b'l  s.t. -A'l <= c, l >= 0, with value -primal
        for seed in (2, 5, 13):
            rng = np.random.default_rng(seed)
            n, m = 3, 4
            a = rng.normal(size=(m, n))
            x0 = np.abs(rng.normal(size=n))
            b = a @ x0 + rng.uniform(0.2, 1.0, size=m)
            c = np.abs(rng.normal(size=n)) + 0.1
            primal = LinearProgram(c=c, a_ub=a, b_ub=b, bounds=[(0, None)] * n)
            ps = solve_lp(primal)
            assert ps.status == "optimal"
            dual = LinearProgram(
                c=b, a_ub=-a.T, b_ub=c, bounds=[(0, None)] * m
            )
            ds = solve_lp(dual)
            assert ds.status == "optimal"
            assert ds.objective == pytest.approx(-ps.objective, abs=1e-8)


class TestWarmStart:
    def test_warm_start_after_column_append(self):
        rng = np.random.default_rng(31)
        m_rows = 4
        n0 = 10
        d = rng.normal(size=(m_rows, n0))
        phi = rng.normal(size=n0)
        a_eq = np.vstack([np.ones(n0), d])
        b_eq = np.concatenate([[1.0], np.zeros(m_rows)])
        # guarantee feasibility: one column with zero drift entries
        a_eq[1:, 0] = 0.0
        lp1 = LinearProgram(c=-phi, a_eq=a_eq, b_eq=b_eq)
        s1 = solve_lp(lp1)
        assert s1.status == "optimal"

        extra = rng.normal(size=(m_rows, 3))
        phi2 = np.concatenate([phi, rng.normal(size=3)])
        a2 = np.hstack([a_eq, np.vstack([np.ones(3), extra])])
        lp2 = LinearProgram(c=-phi2, a_eq=a2, b_eq=b_eq)
        warm = solve_lp(lp2, warm_basis=s1.basis_labels)
        cold = solve_lp(lp2)
        assert warm.status == cold.status == "optimal"
        assert warm.objective == pytest.approx(cold.objective, abs=1e-9)
        assert warm.iterations <= cold.iterations

    def test_unusable_warm_basis_falls_back(self):
        lp = random_bounded_lp(2)
        sol = solve_lp(lp, warm_basis=(("var+", 999),))
        assert sol.status == "optimal"


class TestMPS:
    def test_write_mps_sections(self):
        lp = LinearProgram(
            c=[1.0, -2.0],
            a_ub=[[1.0, 1.0]],
            b_ub=[3.0],
            a_eq=[[1.0, 0.0]],
            b_eq=[1.0],
            bounds=[(0, None), (None, None)],
        )
        text = write_mps(lp)
        for section in ("NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"):
            assert section in text
        assert " FR BND  X1" in text
