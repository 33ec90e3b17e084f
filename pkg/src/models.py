"""
Data models: LP problem forms, solver outcomes, masking keys and audit records

Also hosts the conversions between the problem forms.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .exceptions import DimensionMismatch, InvalidProblem, NonSquareMatrix
from .numerics import RatMatrix, RatVector, determinant


class Sign(Enum):
    """Per-variable sign restriction"""
    NONNEGATIVE = "nonnegative"
    FREE = "free"


class Sense(Enum):
    MINIMIZE = "minimize"


class Verdict(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class BMode(Enum):
    """How generate_instance builds the functional inequality matrix B"""
    IDENTITY = "identity"
    RANDOM = "random"


class TrialTag(Enum):
    FAITHFUL = "FAITHFUL"
    SUBOPTIMAL = "SUBOPTIMAL"
    INFEASIBLE_RECOVERY = "INFEASIBLE_RECOVERY"
    MASKED_INFEASIBLE = "MASKED_INFEASIBLE"
    MASKED_UNBOUNDED = "MASKED_UNBOUNDED"
    TRUE_INFEASIBLE = "TRUE_INFEASIBLE"
    TRUE_UNBOUNDED = "TRUE_UNBOUNDED"

    @property
    def is_failure(self) -> bool:
        return self in FAILURE_TAGS


FAILURE_TAGS = frozenset({
    TrialTag.SUBOPTIMAL,
    TrialTag.INFEASIBLE_RECOVERY,
    TrialTag.MASKED_INFEASIBLE,
    TrialTag.MASKED_UNBOUNDED,
})


@dataclass
class AuditConfig:
    """Sampling ranges and caps for key generation, instances and probes"""
    # Key material
    KEY_ENTRY_BOUND: int = 10
    GAMMA_MAX: int = 8
    KEYGEN_MAX_ATTEMPTS: int = 64
    RANDOM_P_COMPONENT: bool = True

    # Instance generator
    INSTANCE_ENTRY_BOUND: int = 5
    X0_MAX: int = 5
    GENERATOR_MAX_ATTEMPTS: int = 256
    MAX_DIMENSION: int = 12

    # Oracle and probes
    ORACLE_MAX_VARS: int = 6
    PROBE_SAMPLES: int = 100
    PROBE_ENTRY_BOUND: int = 10


def _require(condition: bool, message: str):
    if not condition:
        raise InvalidProblem(message)


@dataclass(frozen=True)
class PeculiarProblem:
    """minimize cᵀx subject to Ax = b, Bx ≥ 0 with B nonsingular and x unrestricted"""
    A: RatMatrix
    b: RatVector
    B: RatMatrix
    c: RatVector

    def __post_init__(self):
        _check_peculiar_shapes(self.A, self.b, self.B, self.c)
        _require(determinant(self.B) != 0, "B must be nonsingular")

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols


@dataclass(frozen=True)
class MaskedProblem:
    """The transformed problem handed to the server: A′, B′, b′, c′"""
    Ap: RatMatrix
    Bp: RatMatrix
    bp: RatVector
    cp: RatVector

    def __post_init__(self):
        _check_peculiar_shapes(self.Ap, self.bp, self.Bp, self.cp)
        _require(determinant(self.Bp) != 0, "B' must be nonsingular")
        _require(not self.bp.is_zero(), "b' must be nonzero")

    @property
    def m(self) -> int:
        return self.Ap.rows

    @property
    def n(self) -> int:
        return self.Ap.cols


def _check_peculiar_shapes(A: RatMatrix, b: RatVector, B: RatMatrix, c: RatVector):
    m, n = A.shape
    if len(b) != m:
        raise DimensionMismatch("problem A/b", A.shape, (len(b),))
    if B.shape != (n, n):
        raise DimensionMismatch("problem A/B", A.shape, B.shape)
    if len(c) != n:
        raise DimensionMismatch("problem A/c", A.shape, (len(c),))


@dataclass(frozen=True)
class StandardMaxProblem:
    """maximize cᵀx subject to Ax ≤ b, x ≥ 0"""
    A: RatMatrix
    b: RatVector
    c: RatVector

    def __post_init__(self):
        if len(self.b) != self.A.rows:
            raise DimensionMismatch("standard A/b", self.A.shape, (len(self.b),))
        if len(self.c) != self.A.cols:
            raise DimensionMismatch("standard A/c", self.A.shape, (len(self.c),))

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols


@dataclass(frozen=True)
class AugmentedProblem:
    """maximize c_extᵀz subject to [A, I]·z = b, z ≥ 0; slacks start at slack_offset"""
    Aaug: RatMatrix
    b: RatVector
    c_ext: RatVector
    slack_offset: int

    def __post_init__(self):
        m = self.Aaug.rows
        n = self.slack_offset
        _require(self.Aaug.cols == n + m, "augmented matrix must have n + m columns")
        _require(len(self.b) == m and len(self.c_ext) == n + m, "augmented vector lengths")
        for i in range(m):
            for j in range(m):
                _require(self.Aaug[i, n + j] == (1 if i == j else 0),
                         "slack columns must form the identity")
        _require(all(v == 0 for v in self.c_ext.entries[n:]), "slack costs must be zero")


@dataclass(frozen=True)
class GeneralLP:
    """minimize cᵀx subject to Aeq·x = beq, Gineq·x ≥ 0 and per-variable sign restrictions

    Either constraint block may be absent (None).
    """
    c: RatVector
    Aeq: Optional[RatMatrix]
    beq: Optional[RatVector]
    Gineq: Optional[RatMatrix]
    sign: Tuple[Sign, ...]
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self):
        n = len(self.c)
        object.__setattr__(self, 'sign', tuple(self.sign))
        if (self.Aeq is None) != (self.beq is None):
            raise InvalidProblem("Aeq and beq must be given together")
        if self.Aeq is not None:
            if self.Aeq.cols != n:
                raise DimensionMismatch("GeneralLP Aeq/c", self.Aeq.shape, (n,))
            if len(self.beq) != self.Aeq.rows:
                raise DimensionMismatch("GeneralLP Aeq/beq", self.Aeq.shape, (len(self.beq),))
        if self.Gineq is not None and self.Gineq.cols != n:
            raise DimensionMismatch("GeneralLP Gineq/c", self.Gineq.shape, (n,))
        if len(self.sign) != n:
            raise DimensionMismatch("GeneralLP sign/c", (len(self.sign),), (n,))

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def k(self) -> int:
        return 0 if self.Aeq is None else self.Aeq.rows

    @property
    def p(self) -> int:
        return 0 if self.Gineq is None else self.Gineq.rows

    def all_nonneg(self) -> bool:
        return all(s is Sign.NONNEGATIVE for s in self.sign)

    def is_feasible(self, x: RatVector) -> bool:
        """Exact feasibility of x for every constraint"""
        if len(x) != self.n:
            raise DimensionMismatch("GeneralLP feasibility", (self.n,), (len(x),))
        if self.Aeq is not None and self.Aeq @ x != self.beq:
            return False
        if self.Gineq is not None and not (self.Gineq @ x).is_nonneg():
            return False
        return all(v >= 0 for v, s in zip(x, self.sign) if s is Sign.NONNEGATIVE)

    def is_recession_direction(self, d: RatVector) -> bool:
        """d satisfies the homogeneous version of every constraint"""
        if len(d) != self.n:
            raise DimensionMismatch("GeneralLP direction", (self.n,), (len(d),))
        if self.Aeq is not None and not (self.Aeq @ d).is_zero():
            return False
        if self.Gineq is not None and not (self.Gineq @ d).is_nonneg():
            return False
        return all(v >= 0 for v, s in zip(d, self.sign) if s is Sign.NONNEGATIVE)


@dataclass(frozen=True)
class SolveOutcome:
    """Solver verdict with its point, value or improving ray"""
    verdict: Verdict
    x_opt: Optional[RatVector] = None
    value: Optional[Fraction] = None
    ray: Optional[RatVector] = None
    pivots_used: int = 0

    def __post_init__(self):
        optimal = self.verdict is Verdict.OPTIMAL
        if optimal != (self.x_opt is not None) or optimal != (self.value is not None):
            raise InvalidProblem("x_opt and value are present iff the verdict is optimal")
        if (self.verdict is Verdict.UNBOUNDED) != (self.ray is not None):
            raise InvalidProblem("ray is present iff the verdict is unbounded")

    @property
    def is_optimal(self) -> bool:
        return self.verdict is Verdict.OPTIMAL


@dataclass(frozen=True)
class MaskingKey:
    """Client secret (Q, M, P, r, γ) turning a peculiar problem into a masked one"""
    Q: RatMatrix
    M: RatMatrix
    P: RatMatrix
    r: RatVector
    gamma: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'gamma', Fraction(self.gamma))
        n = len(self.r)
        if not self.Q.is_square():
            raise NonSquareMatrix("key Q", self.Q.shape)
        if self.M.shape != (n, n):
            raise DimensionMismatch("key M/r", self.M.shape, (n,))
        if self.P.shape != (n, self.Q.rows):
            raise DimensionMismatch("key P", self.P.shape, (n, self.Q.rows))

    @property
    def m(self) -> int:
        return self.Q.rows

    @property
    def n(self) -> int:
        return len(self.r)


@dataclass(frozen=True)
class AuditTrial:
    """One run of the outsourcing pipeline with both solver outcomes and its tag"""
    seed: int
    problem: PeculiarProblem
    key: MaskingKey
    server_outcome: SolveOutcome
    recovered_x: Optional[RatVector]
    true_outcome: SolveOutcome
    classification: TrialTag
    index: Optional[int] = None


@dataclass
class AuditReport:
    master_seed: int
    m: int
    n: int
    b_mode: BMode
    trials_requested: int
    counts: Dict[TrialTag, int]
    errors: int
    first_counterexamples: Dict[TrialTag, AuditTrial] = field(default_factory=dict)
    fingerprint: str = ""

    @property
    def failures(self) -> int:
        return sum(self.counts[t] for t in FAILURE_TAGS)


def to_augmented(p: StandardMaxProblem) -> AugmentedProblem:
    """Append one slack per row: [A, I]·(x; x_s) = b with zero slack costs"""
    m, n = p.m, p.n
    rows = [list(p.A.row(i)) + [1 if i == j else 0 for j in range(m)] for i in range(m)]
    c_ext = RatVector(p.c.entries + (0,) * m)
    return AugmentedProblem(Aaug=RatMatrix.from_rows(rows), b=p.b, c_ext=c_ext, slack_offset=n)


def standard_as_general(p: StandardMaxProblem) -> GeneralLP:
    """Inequality form as a GeneralLP, homogenized by an extra variable t fixed to 1

    Variables are (x, t); t = 1 and b·t − A·x ≥ 0 encode Ax ≤ b. The objective is
    −c so the max problem's optimum is the negated GeneralLP value.
    """
    m, n = p.m, p.n
    Aeq = RatMatrix.from_rows([[0] * n + [1]])
    G = RatMatrix.from_rows([[-a for a in p.A.row(i)] + [p.b[i]] for i in range(m)])
    c = RatVector(tuple(-v for v in p.c) + (0,))
    return GeneralLP(c=c, Aeq=Aeq, beq=RatVector.of(1), Gineq=G, sign=(Sign.NONNEGATIVE,) * (n + 1))


def augmented_as_general(p: AugmentedProblem) -> GeneralLP:
    return GeneralLP(c=-p.c_ext, Aeq=p.Aaug, beq=p.b, Gineq=None,
                     sign=(Sign.NONNEGATIVE,) * p.Aaug.cols)


def peculiar_as_general(p: PeculiarProblem, add_nonneg: bool) -> GeneralLP:
    """The client's free-sign problem, or its true problem with x ≥ 0 when add_nonneg is set"""
    sign = Sign.NONNEGATIVE if add_nonneg else Sign.FREE
    return GeneralLP(c=p.c, Aeq=p.A, beq=p.b, Gineq=p.B, sign=(sign,) * p.n)


def masked_as_general(p: MaskedProblem, add_nonneg: bool) -> GeneralLP:
    """The masked free-sign problem, or the server's problem with y ≥ 0 when add_nonneg is set"""
    sign = Sign.NONNEGATIVE if add_nonneg else Sign.FREE
    return GeneralLP(c=p.cp, Aeq=p.Ap, beq=p.bp, Gineq=p.Bp, sign=(sign,) * p.n)


def is_positive_diagonal(m: RatMatrix) -> bool:
    """True iff m is diagonal with strictly positive diagonal entries"""
    if not m.is_square():
        raise NonSquareMatrix("is_positive_diagonal", m.shape)
    for i in range(m.rows):
        for j in range(m.cols):
            v = m[i, j]
            if i == j and v <= 0:
                return False
            if i != j and v != 0:
                return False
    return True
