"""Exact routing over Hamiltonian tours rooted at the warehouse.

Every static formulation reduces to the same problem: pick a tour
``0 -> ... -> 0`` minimizing a sum of arc costs, subject to a handful of
route-additive budget constraints (one per product). Tours are enumerated
structurally, so subtours never arise and the MTZ sequencing constraints are
only checked after the fact (see :func:`freshroute.domain.mtz_violations`).

Tie-break: among tours with equal objective the lexicographically smallest
order wins. Both the branch-and-bound and the brute-force oracle accumulate
arc values left to right so equal routes produce identical floats.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from freshroute.domain import Route
from freshroute.errors import DomainError

FEAS_TOL = 1e-9
BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True)
class SideConstraint:
    weight: np.ndarray
    bound: float
    name: str = ""

    def __post_init__(self):
        w = np.array(self.weight, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bound", float(self.bound))


@dataclass(frozen=True)
class RouteAdditiveProblem:
    arc_cost: np.ndarray
    side_constraints: tuple[SideConstraint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        c = np.array(self.arc_cost, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DomainError(f"arc_cost must be square, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "arc_cost", c)
        cons = tuple(
            s if isinstance(s, SideConstraint) else SideConstraint(*s) for s in self.side_constraints
        )
        for s in cons:
            if s.weight.shape != c.shape:
                raise DomainError(f"side constraint {s.name!r} has shape {s.weight.shape}, expected {c.shape}")
            if not math.isfinite(s.bound):
                raise DomainError(f"side constraint {s.name!r} has a non-finite bound")
        object.__setattr__(self, "side_constraints", cons)

    @property
    def dimension(self) -> int:
        return self.arc_cost.shape[0]


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    route: Route | None
    objective: float
    nodes_explored: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def _finish(problem: RouteAdditiveProblem, order, nodes: int) -> SolveResult:
    if order is None:
        return SolveResult(SolveStatus.INFEASIBLE, None, math.inf, nodes)
    route = Route.from_order(order, problem.arc_cost)
    return SolveResult(SolveStatus.OPTIMAL, route, route.total_time, nodes)


def solve_exact(problem: RouteAdditiveProblem) -> SolveResult:
    """Depth-first branch and bound; returns the global optimum or INFEASIBLE."""
    n = problem.dimension
    if n < 2:
        raise DomainError("need the warehouse and at least one stop")
    cost = problem.arc_cost.tolist()
    weights = [s.weight.tolist() for s in problem.side_constraints]
    caps = [s.bound + FEAS_TOL for s in problem.side_constraints]
    partial_check = all(bool(np.all(s.weight >= 0)) for s in problem.side_constraints)

    # every node departs exactly once; its cheapest outgoing arc is an admissible bound
    min_out = [min(cost[i][j] for j in range(n) if j != i) for i in range(n)]

    best_cost = math.inf
    best_order = None
    nodes = 0
    path = [0]
    unvisited = set(range(1, n))
    # (visited mask, current node) -> prefixes reaching that state; completions
    # from a state do not depend on how it was reached
    seen: dict[tuple[int, int], list[tuple[float, list[float], list[int]]]] = {}

    def dominated(mask: int, current: int, g: float, sums: list[float]) -> bool:
        entries = seen.setdefault((mask, current), [])
        for g_old, sums_old, prefix in entries:
            if all(a <= b for a, b in zip(sums_old, sums)):
                # a clear cost gap survives rounding; exact ties fall back to the tie-break
                if g_old < g - 1e-9 * (1.0 + abs(g)) or (g_old <= g and prefix < path):
                    return True
        entries.append((g, sums, list(path)))
        return False

    def dfs(current: int, mask: int, g: float, sums: list[float], rem_bound: float) -> None:
        nonlocal best_cost, best_order, nodes
        nodes += 1
        if not unvisited:
            total = g + cost[current][0]
            if total > best_cost:
                return
            new_sums = [s + w[current][0] for s, w in zip(sums, weights)]
            if not all(s <= cap for s, cap in zip(new_sums, caps)):
                return
            order = path + [0]
            # children are explored cheapest first, so equal costs need the explicit tie-break
            if total < best_cost or order < best_order:
                best_cost = total
                best_order = order
            return
        if dominated(mask, current, g, sums):
            return
        for j in sorted(unvisited, key=lambda k: (cost[current][k], k)):
            g_next = g + cost[current][j]
            rem_next = rem_bound - min_out[j]
            lb = g_next + min_out[j] + rem_next
            if lb > best_cost + 1e-9 * (1.0 + abs(best_cost)):
                continue
            new_sums = [s + w[current][j] for s, w in zip(sums, weights)]
            if partial_check and any(s > cap for s, cap in zip(new_sums, caps)):
                continue
            unvisited.remove(j)
            path.append(j)
            dfs(j, mask | (1 << j), g_next, new_sums, rem_next)
            path.pop()
            unvisited.add(j)

    dfs(0, 1, 0.0, [0.0] * len(weights), sum(min_out[1:]))
    return _finish(problem, best_order, nodes)


def _sequential_sum(matrix: np.ndarray, tours: np.ndarray) -> np.ndarray:
    acc = np.zeros(tours.shape[0])
    for m in range(tours.shape[1] - 1):
        acc = acc + matrix[tours[:, m], tours[:, m + 1]]
    return acc


def brute_force_oracle(problem: RouteAdditiveProblem) -> SolveResult:
    """Enumerate all (n-1)! tours; refuses problems above 10 nodes."""
    n = problem.dimension
    if n < 2:
        raise DomainError("need the warehouse and at least one stop")
    if n > BRUTE_FORCE_LIMIT:
        raise DomainError(f"brute force refused for {n} nodes (limit {BRUTE_FORCE_LIMIT})")
    perms = np.array(list(itertools.permutations(range(1, n))), dtype=np.intp).reshape(-1, n - 1)
    zeros = np.zeros((perms.shape[0], 1), dtype=np.intp)
    tours = np.hstack([zeros, perms, zeros])
    objective = _sequential_sum(problem.arc_cost, tours)
    feasible = np.ones(tours.shape[0], dtype=bool)
    for s in problem.side_constraints:
        feasible &= _sequential_sum(s.weight, tours) <= s.bound + FEAS_TOL
    if not feasible.any():
        return SolveResult(SolveStatus.INFEASIBLE, None, math.inf, tours.shape[0])
    masked = np.where(feasible, objective, np.inf)
    # permutations() yields lexicographic order, argmin keeps the first minimum
    best = int(np.argmin(masked))
    return _finish(problem, tours[best].tolist(), tours.shape[0])
