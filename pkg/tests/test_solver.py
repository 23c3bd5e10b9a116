import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freshroute.domain import mtz_violations, route_violations
from freshroute.errors import DomainError
from freshroute.solver import (
    RouteAdditiveProblem,
    SideConstraint,
    SolveStatus,
    brute_force_oracle,
    solve_exact,
)


def enumerate_tours(cost, constraints=()):
    """Plain itertools reference, written independently of the library oracle."""
    n = len(cost)
    best = None
    for perm in itertools.permutations(range(1, n)):
        order = (0, *perm, 0)
        arcs = list(zip(order, order[1:]))
        if any(sum(w[i][j] for i, j in arcs) > b + 1e-9 for w, b in constraints):
            continue
        total = sum(cost[i][j] for i, j in arcs)
        if best is None or total < best[0] - 1e-12:
            best = (total, order)
    return best


def test_two_nodes():
    res = solve_exact(RouteAdditiveProblem([[0, 3], [4, 0]]))
    assert res.route.order == (0, 1, 0)
    assert res.objective == 7.0


def test_dimension_guards():
    with pytest.raises(DomainError):
        solve_exact(RouteAdditiveProblem([[0.0]]))
    with pytest.raises(DomainError):
        brute_force_oracle(RouteAdditiveProblem(np.zeros((11, 11))))
    with pytest.raises(DomainError):
        RouteAdditiveProblem(np.zeros((3, 4)))
    with pytest.raises(DomainError):
        RouteAdditiveProblem(np.zeros((3, 3)), [SideConstraint(np.zeros((3, 3)), math.inf)])


def test_four_node_asymmetric_matches_enumeration():
    cost = [[0, 2, 9, 10], [1, 0, 6, 4], [15, 7, 0, 8], [6, 3, 12, 0]]
    res = solve_exact(RouteAdditiveProblem(cost))
    total, order = enumerate_tours(cost)
    assert res.objective == pytest.approx(total)
    assert res.route.order == order


def test_side_constraint_excludes_unconstrained_optimum():
    cost = np.array([[0, 2, 9, 10], [1, 0, 6, 4], [15, 7, 0, 8], [6, 3, 12, 0]], dtype=float)
    free = solve_exact(RouteAdditiveProblem(cost))
    weight = np.zeros((4, 4))
    i, j = free.route.arcs[0]
    weight[i, j] = 1.0
    prob = RouteAdditiveProblem(cost, [SideConstraint(weight, 0.5, "ban")])
    res = solve_exact(prob)
    assert res.route.order != free.route.order
    total, order = enumerate_tours(cost, [(weight, 0.5)])
    assert res.route.order == order and res.objective == pytest.approx(total)


def test_infeasible():
    prob = RouteAdditiveProblem(np.ones((4, 4)), [SideConstraint(np.ones((4, 4)), 3.5)])
    assert solve_exact(prob).status is SolveStatus.INFEASIBLE
    assert brute_force_oracle(prob).status is SolveStatus.INFEASIBLE
    assert solve_exact(prob).objective == math.inf


def test_all_equal_costs_pick_lexicographic_first():
    prob = RouteAdditiveProblem(np.ones((5, 5)))
    assert solve_exact(prob).route.order == (0, 1, 2, 3, 4, 0)
    assert brute_force_oracle(prob).route.order == (0, 1, 2, 3, 4, 0)


def test_random_seven_node_cross_check():
    rng = np.random.default_rng(7)
    prob = RouteAdditiveProblem(rng.uniform(0, 10, (7, 7)))
    assert solve_exact(prob).objective == pytest.approx(brute_force_oracle(prob).objective, abs=1e-9)


def test_oracle_agrees_with_itertools_reference():
    rng = np.random.default_rng(3)
    for _ in range(20):
        cost = rng.uniform(0, 5, (6, 6))
        w = rng.uniform(0, 5, (6, 6))
        bound = float(np.median(w) * 6)
        ref = enumerate_tours(cost.tolist(), [(w.tolist(), bound)])
        res = brute_force_oracle(RouteAdditiveProblem(cost, [SideConstraint(w, bound)]))
        if ref is None:
            assert res.status is SolveStatus.INFEASIBLE
        else:
            assert res.route.order == ref[1]


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(3, 7),
    seed=st.integers(0, 2**32 - 1),
    constrained=st.booleans(),
    integral=st.booleans(),
)
def test_solver_matches_oracle(n, seed, constrained, integral):
    rng = np.random.default_rng(seed)
    cost = rng.integers(0, 4, (n, n)).astype(float) if integral else rng.uniform(0, 10, (n, n))
    cons = []
    if constrained:
        w = rng.uniform(0, 5, (n, n))
        cons.append(SideConstraint(w, float(rng.uniform(0.5, 1.2) * w.mean() * n)))
    prob = RouteAdditiveProblem(cost, cons)
    a, b = solve_exact(prob), brute_force_oracle(prob)
    assert a.status is b.status
    if a.is_optimal:
        assert a.route.order == b.route.order
        assert abs(a.objective - b.objective) <= 1e-9
        assert route_violations(a.route, n) == []
        assert mtz_violations(a.route, n) == []
        for c in cons:
            assert sum(c.weight[i, j] for i, j in a.route.arcs) <= c.bound + 1e-9


def test_negative_side_weights_are_handled():
    rng = np.random.default_rng(1)
    cost = rng.uniform(0, 10, (6, 6))
    w = rng.uniform(-3, 3, (6, 6))
    prob = RouteAdditiveProblem(cost, [SideConstraint(w, -1.0)])
    a, b = solve_exact(prob), brute_force_oracle(prob)
    assert a.status is b.status
    if a.is_optimal:
        assert a.route.order == b.route.order
