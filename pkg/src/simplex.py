"""
Exact two-phase tableau simplex with Bland's rule

solve_nonneg works on GeneralLPs whose variables are all nonnegative;
solve_general splits free variables into differences of nonnegative ones.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from .exceptions import CertificateUnverified, InvariantViolation, SignPreconditionError
from .models import GeneralLP, Sign, SolveOutcome, Verdict
from .numerics import RatMatrix, RatVector
from .oracle import enumerate_optimum

logger = logging.getLogger(__name__)


class Phase(Enum):
    ONE = 1
    TWO = 2


@dataclass
class Tableau:
    """Dictionary form B⁻¹A | B⁻¹b of the current basis"""
    rows: List[List[Fraction]]
    rhs: List[Fraction]
    basis: List[int]
    costs: List[Fraction]
    phase: Phase
    pivots: int = 0

    @property
    def width(self) -> int:
        return len(self.costs)

    def reduced_costs(self) -> List[Fraction]:
        basic_costs = [self.costs[b] for b in self.basis]
        return [
            self.costs[j] - sum((cb * row[j] for cb, row in zip(basic_costs, self.rows)), Fraction(0))
            for j in range(self.width)
        ]

    def objective_value(self) -> Fraction:
        return sum((self.costs[b] * v for b, v in zip(self.basis, self.rhs)), Fraction(0))

    def entering_column(self, allowed: int) -> Optional[int]:
        """Lowest-index column below `allowed` with negative reduced cost"""
        reduced = self.reduced_costs()
        for j in range(allowed):
            if reduced[j] < 0:
                return j
        return None

    def leaving_row(self, col: int) -> Optional[int]:
        """Minimum ratio test; ties go to the lowest basic variable index"""
        best = None
        for i, row in enumerate(self.rows):
            a = row[col]
            if a <= 0:
                continue
            key = (self.rhs[i] / a, self.basis[i])
            if best is None or key < best[0]:
                best = (key, i)
        return None if best is None else best[1]

    def pivot(self, row: int, col: int):
        logger.debug(f"Phase {self.phase.value} pivot: x{col} enters, x{self.basis[row]} leaves")
        p = self.rows[row][col]
        self.rows[row] = [v / p for v in self.rows[row]]
        self.rhs[row] = self.rhs[row] / p
        for i in range(len(self.rows)):
            if i == row:
                continue
            f = self.rows[i][col]
            if f:
                self.rows[i] = [a - f * b for a, b in zip(self.rows[i], self.rows[row])]
                self.rhs[i] = self.rhs[i] - f * self.rhs[row]
        self.basis[row] = col
        self.pivots += 1

    def drop_row(self, row: int):
        del self.rows[row]
        del self.rhs[row]
        del self.basis[row]

    def truncate_columns(self, width: int):
        self.rows = [r[:width] for r in self.rows]
        self.costs = self.costs[:width]

    def basic_solution(self) -> List[Fraction]:
        x = [Fraction(0)] * self.width
        for b, v in zip(self.basis, self.rhs):
            x[b] = v
        return x

    def run(self, allowed: int) -> Optional[int]:
        """Pivot to optimality; returns the entering column of an unbounded ray, else None"""
        while True:
            col = self.entering_column(allowed)
            if col is None:
                return None
            row = self.leaving_row(col)
            if row is None:
                return col
            self.pivot(row, col)
            if any(v < 0 for v in self.rhs):
                raise InvariantViolation("basic solution lost feasibility after a pivot")


def _initial_tableau(p: GeneralLP) -> Tuple[Tableau, int]:
    """Rows: equalities with artificials, then −G·x + s = 0 with surplus s basic"""
    n, k, ps = p.n, p.k, p.p
    zero, one = Fraction(0), Fraction(1)
    rows, rhs, basis = [], [], []
    for i in range(k):
        a = list(p.Aeq.row(i))
        b = p.beq[i]
        if b < 0:
            a = [-v for v in a]
            b = -b
        rows.append(a + [zero] * ps + [one if j == i else zero for j in range(k)])
        rhs.append(b)
        basis.append(n + ps + i)
    for i in range(ps):
        rows.append([-v for v in p.Gineq.row(i)] + [one if j == i else zero for j in range(ps)] + [zero] * k)
        rhs.append(zero)
        basis.append(n + i)
    costs = [zero] * (n + ps) + [one] * k
    return Tableau(rows=rows, rhs=rhs, basis=basis, costs=costs, phase=Phase.ONE), n + ps


def solve_nonneg(p: GeneralLP) -> SolveOutcome:
    """Two-phase simplex for a GeneralLP whose variables are all nonnegative"""
    if not p.all_nonneg():
        free = [j for j, s in enumerate(p.sign) if s is Sign.FREE]
        raise SignPreconditionError(
            f"solve_nonneg requires every variable to be nonnegative; free variables {free}, use solve_general"
        )
    n = p.n
    tableau, structural = _initial_tableau(p)

    if p.k:
        tableau.run(allowed=structural)
        if tableau.objective_value() > 0:
            logger.debug(f"Phase one optimum {tableau.objective_value()} > 0: infeasible")
            return SolveOutcome(Verdict.INFEASIBLE, pivots_used=tableau.pivots)
        _drive_out_artificials(tableau, structural)
        tableau.truncate_columns(structural)

    tableau.phase = Phase.TWO
    tableau.costs = list(p.c.entries) + [Fraction(0)] * (structural - n)
    ray_col = tableau.run(allowed=structural)

    if ray_col is not None:
        d = [Fraction(0)] * tableau.width
        d[ray_col] = Fraction(1)
        for i, b in enumerate(tableau.basis):
            d[b] = -tableau.rows[i][ray_col]
        return SolveOutcome(Verdict.UNBOUNDED, ray=RatVector(tuple(d[:n])), pivots_used=tableau.pivots)

    x = RatVector(tuple(tableau.basic_solution()[:n]))
    return SolveOutcome(Verdict.OPTIMAL, x_opt=x, value=p.c.dot(x), pivots_used=tableau.pivots)


def _drive_out_artificials(tableau: Tableau, structural: int):
    """Pivot zero-level artificials out of the basis; drop rows that are redundant"""
    i = 0
    while i < len(tableau.basis):
        if tableau.basis[i] < structural:
            i += 1
            continue
        col = next((j for j in range(structural) if tableau.rows[i][j] != 0), None)
        if col is None:
            logger.debug(f"Dropping redundant row {i}")
            tableau.drop_row(i)
            continue
        tableau.pivot(i, col)
        i += 1


def solve_general(p: GeneralLP) -> SolveOutcome:
    """Solve with free variables split as x = x⁺ − x⁻; results refer to the original variables"""
    free = [j for j, s in enumerate(p.sign) if s is Sign.FREE]
    if not free:
        return solve_nonneg(p)

    def extend(m: Optional[RatMatrix]) -> Optional[RatMatrix]:
        if m is None:
            return None
        return RatMatrix.from_rows([list(m.row(i)) + [-m[i, j] for j in free] for i in range(m.rows)])

    split = GeneralLP(
        c=RatVector(p.c.entries + tuple(-p.c[j] for j in free)),
        Aeq=extend(p.Aeq),
        beq=p.beq,
        Gineq=extend(p.Gineq),
        sign=(Sign.NONNEGATIVE,) * (p.n + len(free)),
    )
    outcome = solve_nonneg(split)

    def fold(v: RatVector) -> RatVector:
        entries = list(v.entries[:p.n])
        for offset, j in enumerate(free):
            entries[j] -= v[p.n + offset]
        return RatVector(tuple(entries))

    if outcome.verdict is Verdict.OPTIMAL:
        x = fold(outcome.x_opt)
        return SolveOutcome(Verdict.OPTIMAL, x_opt=x, value=p.c.dot(x), pivots_used=outcome.pivots_used)
    if outcome.verdict is Verdict.UNBOUNDED:
        return SolveOutcome(Verdict.UNBOUNDED, ray=fold(outcome.ray), pivots_used=outcome.pivots_used)
    return outcome


def check_certificate(p: GeneralLP, out: SolveOutcome, oracle_max_vars: int = 6) -> bool:
    """Independently confirm a verdict

    Raises CertificateUnverified when an infeasibility verdict is too large for the oracle.
    """
    if out.verdict is Verdict.OPTIMAL:
        return p.is_feasible(out.x_opt) and p.c.dot(out.x_opt) == out.value
    if out.verdict is Verdict.UNBOUNDED:
        return p.is_recession_direction(out.ray) and p.c.dot(out.ray) < 0
    if p.n > oracle_max_vars:
        raise CertificateUnverified(f"infeasibility of a {p.n}-variable instance is beyond the oracle limit")
    return enumerate_optimum(p, max_vars=oracle_max_vars).verdict is Verdict.INFEASIBLE
