import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fabadapt.lp import LpProblem, LpStatus, solve_lp
from fabadapt.rng import Stream
from oracles import lp_brute_force_vertices

TOL = 1e-8


def random_feasible_lp(seed, n_max=10, m_max=10):
    """Feasible by construction (rows built around an interior x0) and bounded by finite bounds."""
    s = Stream(seed, "lp")
    n = 1 + int(s.raw(1)[0] % n_max)
    m = int(s.raw(1)[0] % (m_max + 1))
    lower = s.uniform(n, -3.0, 0.0)
    upper = lower + s.uniform(n, 0.5, 4.0)
    x0 = lower + (upper - lower) * s.uniform(n, 0.1, 0.9)
    A = s.normal((m, n))
    kinds = s.uniform(m)
    senses = np.where(kinds < 0.5, "<=", np.where(kinds < 0.8, ">=", "="))
    slack = s.uniform(m, 0.0, 1.0)
    b = A @ x0 + np.where(senses == "<=", slack, np.where(senses == ">=", -slack, 0.0))
    c = s.normal(n)
    return LpProblem(c, A, list(senses), b, lower, upper, maximize=bool(s.uniform() < 0.5))


def check_optimality(p, sol, tol=TOL):
    """Primal feasibility, dual signs, complementary slackness and strong duality."""
    assert sol.status is LpStatus.OPTIMAL
    x, y, rc = sol.x, sol.duals, sol.reduced_costs
    scale = 1.0 + np.max(np.abs(p.b), initial=0.0)
    Ax = p.A @ x
    sg = 1.0 if p.maximize else -1.0
    for i, s in enumerate(p.senses):
        if s == "<=":
            assert Ax[i] <= p.b[i] + tol * scale
            assert sg * y[i] >= -tol
        elif s == ">=":
            assert Ax[i] >= p.b[i] - tol * scale
            assert sg * y[i] <= tol
        else:
            assert abs(Ax[i] - p.b[i]) <= tol * scale
        if s != "=":
            assert abs(y[i] * (p.b[i] - Ax[i])) <= tol * scale
    assert np.all(x >= p.lower - tol) and np.all(x <= p.upper + tol)
    np.testing.assert_allclose(p.c - p.A.T @ y - rc, 0.0, atol=tol * (1 + np.abs(p.c).max()))
    at_lo = np.abs(x - p.lower) <= 1e-9
    at_hi = np.abs(x - p.upper) <= 1e-9
    free = ~at_lo & ~at_hi
    assert np.all(np.abs(rc[free]) <= tol)
    # max: moving off the lower bound must not help (rc <= 0), off the upper (rc >= 0)
    assert np.all(sg * rc[at_lo & ~at_hi] <= tol)
    assert np.all(sg * rc[at_hi & ~at_lo] >= -tol)
    bound_term = np.where(at_lo, p.lower, np.where(at_hi, p.upper, 0.0))
    dual_obj = p.b @ y + rc @ np.where(free, 0.0, bound_term)
    assert abs(dual_obj - sol.objective) <= tol * max(1.0, abs(sol.objective))


def test_separable_max():
    p = LpProblem([1.0, 1.0], np.eye(2), "<=", [1.0, 1.0], maximize=True)
    sol = solve_lp(p)
    assert sol.optimal and sol.objective == pytest.approx(2.0)
    np.testing.assert_allclose(sol.duals, [1.0, 1.0])
    check_optimality(p, sol)


def test_contradictory_bounds_infeasible():
    p = LpProblem([1.0], [[1.0]], "<=", [-1.0])
    assert solve_lp(p).status is LpStatus.INFEASIBLE


def test_free_ray_unbounded():
    p = LpProblem([1.0], np.zeros((0, 1)), [], [], maximize=True)
    assert solve_lp(p).status is LpStatus.UNBOUNDED


def test_infeasible_system():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    p = LpProblem([1.0, 0.0], A, ["<=", ">="], [1.0, 2.0])
    assert solve_lp(p).status is LpStatus.INFEASIBLE


def test_infeasible_equalities():
    A = np.array([[1.0, -1.0], [1.0, -1.0]])
    p = LpProblem([0.0, 0.0], A, "=", [0.0, 1.0], lower=-np.inf)
    assert solve_lp(p).status is LpStatus.INFEASIBLE


def test_unbounded_direction_with_constraints():
    A = np.array([[1.0, -1.0]])
    p = LpProblem([1.0, 1.0], A, "<=", [1.0], maximize=True)
    assert solve_lp(p).status is LpStatus.UNBOUNDED


def test_empty_bound_interval_infeasible():
    p = LpProblem([1.0], np.zeros((0, 1)), [], [], lower=2.0, upper=1.0)
    assert solve_lp(p).status is LpStatus.INFEASIBLE


def test_degenerate_problem_terminates():
    # many redundant constraints through the optimal vertex
    k = 12
    t = np.linspace(0, np.pi / 2, k)
    A = np.column_stack([np.cos(t), np.sin(t)])
    b = A @ np.array([1.0, 1.0])
    p = LpProblem([1.0, 1.0], np.vstack([A, A]), "<=", np.concatenate([b, b]), maximize=True)
    sol = solve_lp(p)
    check_optimality(p, sol)
    assert sol.objective == pytest.approx(2.0)
    assert sol.primal_degenerate


@pytest.mark.parametrize("seed", range(40))
def test_random_lp_duality(seed, backend):
    p = random_feasible_lp(seed)
    check_optimality(p, solve_lp(p, backend=backend))


@pytest.mark.parametrize("seed", range(20))
def test_matches_vertex_enumeration(seed):
    s = Stream(seed, "lp2d")
    A = np.vstack([s.normal((6, 2)), np.eye(2), -np.eye(2)])
    b = np.concatenate([s.uniform(6, 0.5, 2.0), np.full(4, 3.0)])
    c = s.normal(2)
    sol = solve_lp(LpProblem(c, A, "<=", b, lower=-np.inf, maximize=True))
    assert sol.objective == pytest.approx(lp_brute_force_vertices(c, A, b), abs=1e-9)


def test_deterministic():
    p = random_feasible_lp(7)
    a, b = solve_lp(p), solve_lp(p)
    assert a.x.tobytes() == b.x.tobytes() and a.duals.tobytes() == b.duals.tobytes()


def test_sense_aliases_and_broadcast():
    p = LpProblem([1.0, 2.0], [[1.0, 1.0]], "le", [4.0], maximize=True)
    assert solve_lp(p).objective == pytest.approx(8.0)


def test_ill_scaled_rows():
    # rows spanning eight orders of magnitude, as produced by eigenvector cuts
    s = Stream(3, "scaled")
    A = s.normal((30, 6)) * np.logspace(-6, 2, 30)[:, None]
    x0 = s.uniform(6)
    b = A @ x0 + np.abs(A).sum(axis=1) * 0.1
    p = LpProblem(s.normal(6), A, "<=", b, lower=0.0, upper=2.0, maximize=True)
    check_optimality(p, solve_lp(p))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_random_lp_property(seed):
    p = random_feasible_lp(seed, n_max=6, m_max=6)
    check_optimality(p, solve_lp(p))
