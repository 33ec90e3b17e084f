"""
Brute-force vertex enumeration used to cross-check the simplex solver
"""
import logging
from itertools import combinations
from typing import List, Optional, Tuple

from .exceptions import OracleRefused, SingularMatrix
from .models import GeneralLP, Sign, SolveOutcome, Verdict
from .numerics import RatMatrix, RatVector, null_space, solve_linear

logger = logging.getLogger(__name__)

DEFAULT_MAX_VARS = 6


def _constraint_rows(p: GeneralLP) -> Tuple[List[tuple], List[tuple]]:
    """(coefficients, rhs) pairs for equalities and for homogeneous ≥ 0 rows"""
    n = p.n
    equalities = [(p.Aeq.row(i), p.beq[i]) for i in range(p.k)]
    inequalities = [(p.Gineq.row(i), 0) for i in range(p.p)]
    inequalities += [
        (RatVector.unit(n, j).entries, 0) for j, s in enumerate(p.sign) if s is Sign.NONNEGATIVE
    ]
    return equalities, inequalities


def enumerate_optimum(p: GeneralLP, max_vars: int = DEFAULT_MAX_VARS) -> SolveOutcome:
    """Minimum over every basic solution, plus a search of extreme rays for unboundedness

    The lineality space of the constraints is cut away with extra equalities, so a
    feasible instance always has a vertex.
    """
    n = p.n
    if n > max_vars:
        raise OracleRefused(f"vertex enumeration refused for n={n} > {max_vars}")

    equalities, inequalities = _constraint_rows(p)
    lineality = null_space([row for row, _ in equalities + inequalities], n)
    pointing = [(l.entries, 0) for l in lineality]
    constraints = equalities + inequalities + pointing

    def on_pointed_set(x: RatVector) -> bool:
        return all(l.dot(x) == 0 for l in lineality)

    best: Optional[RatVector] = None
    best_value = None
    for subset in combinations(constraints, n):
        lhs = RatMatrix.from_rows([row for row, _ in subset])
        try:
            x = solve_linear(lhs, RatVector(tuple(rhs for _, rhs in subset)))
        except SingularMatrix:
            continue
        if not (p.is_feasible(x) and on_pointed_set(x)):
            continue
        value = p.c.dot(x)
        if best is None or value < best_value:
            best, best_value = x, value

    if best is None:
        return SolveOutcome(Verdict.INFEASIBLE)

    for l in lineality:
        slope = p.c.dot(l)
        if slope != 0:
            return SolveOutcome(Verdict.UNBOUNDED, ray=l if slope < 0 else -l)

    ray = _improving_extreme_ray(p, constraints, lineality)
    if ray is not None:
        return SolveOutcome(Verdict.UNBOUNDED, ray=ray)

    logger.debug(f"Oracle optimum {best_value} at {tuple(best)}")
    return SolveOutcome(Verdict.OPTIMAL, x_opt=best, value=best_value)


def _improving_extreme_ray(p: GeneralLP, constraints: List[tuple],
                           lineality: List[RatVector]) -> Optional[RatVector]:
    n = p.n
    for subset in combinations(constraints, n - 1):
        basis = null_space([row for row, _ in subset], n)
        if len(basis) != 1:
            continue
        for d in (basis[0], -basis[0]):
            if p.c.dot(d) < 0 and p.is_recession_direction(d) and all(l.dot(d) == 0 for l in lineality):
                return d
    return None
