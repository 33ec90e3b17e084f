"""
Audit harness: solve the masked problem the way the server must (with y ≥ 0),
map the answer back, and compare it against the client's true nonnegative problem
"""
import hashlib
import json
import logging
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

import tenacity

from .exceptions import InvalidProblem, InvariantViolation, ResamplingExhausted
from .masking import (
    decrypt_solution,
    encrypt,
    keygen,
    mask_point,
    random_int_matrix,
    random_int_vector,
)
from .models import (
    FAILURE_TAGS,
    AuditConfig,
    AuditReport,
    AuditTrial,
    BMode,
    MaskingKey,
    PeculiarProblem,
    SolveOutcome,
    TrialTag,
    Verdict,
    is_positive_diagonal,
    masked_as_general,
    peculiar_as_general,
)
from .numerics import RatMatrix, RatVector, determinant, mat_vec
from .oracle import enumerate_optimum
from .seeding import INSTANCE_STREAM, KEY_STREAM, make_rng, split_seed
from .simplex import solve_general, solve_nonneg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NonnegCounterexample:
    """x ≥ 0 whose masked image y = M⁻¹(x + r) has a negative entry"""
    x: RatVector
    y: RatVector
    bad_index: int


class _SingularDraw(Exception):
    pass


def _random_functional_matrix(rng: random.Random, x0: RatVector, config: AuditConfig) -> RatMatrix:
    """Random nonsingular integer B with B·x0 ≥ 0; rows with negative product are negated"""
    n = len(x0)
    bound = config.INSTANCE_ENTRY_BOUND

    def draw() -> RatMatrix:
        B = random_int_matrix(rng, n, n, -bound, bound)
        rows = [list(row) if sum(a * v for a, v in zip(row, x0)) >= 0 else [-a for a in row]
                for row in B.to_rows()]
        B = RatMatrix.from_rows(rows)
        if determinant(B) == 0:
            raise _SingularDraw()
        return B

    retrying = tenacity.Retrying(
        stop=tenacity.stop_after_attempt(config.GENERATOR_MAX_ATTEMPTS),
        retry=tenacity.retry_if_exception_type(_SingularDraw),
    )
    try:
        return retrying(draw)
    except tenacity.RetryError as e:
        raise ResamplingExhausted(
            f"no nonsingular B after {config.GENERATOR_MAX_ATTEMPTS} attempts"
        ) from e


def generate_instance(m: int, n: int, seed: int, b_mode: BMode,
                      config: Optional[AuditConfig] = None) -> PeculiarProblem:
    """Random peculiar problem whose nonnegative variant is feasible at a sampled x0"""
    config = config or AuditConfig()
    if not 1 <= m < n <= config.MAX_DIMENSION:
        raise InvalidProblem(
            f"generate_instance requires 1 <= m < n <= {config.MAX_DIMENSION}, got m={m}, n={n}"
        )
    rng = make_rng(seed)
    bound = config.INSTANCE_ENTRY_BOUND
    A = random_int_matrix(rng, m, n, -bound, bound)
    x0 = random_int_vector(rng, n, 0, config.X0_MAX)
    if b_mode is BMode.IDENTITY:
        B = RatMatrix.identity(n)
    else:
        B = _random_functional_matrix(rng, x0, config)
    c = random_int_vector(rng, n, -bound, bound)
    return PeculiarProblem(A=A, b=mat_vec(A, x0), B=B, c=c)


def classify(problem: PeculiarProblem, server_outcome: SolveOutcome,
             recovered_x: Optional[RatVector], true_outcome: SolveOutcome) -> TrialTag:
    """Tag a trial; true-problem verdicts first, then server verdicts, then the recovered point"""
    if true_outcome.verdict is Verdict.INFEASIBLE:
        return TrialTag.TRUE_INFEASIBLE
    if true_outcome.verdict is Verdict.UNBOUNDED:
        return TrialTag.TRUE_UNBOUNDED
    if server_outcome.verdict is Verdict.INFEASIBLE:
        return TrialTag.MASKED_INFEASIBLE
    if server_outcome.verdict is Verdict.UNBOUNDED:
        return TrialTag.MASKED_UNBOUNDED
    if recovered_x is None:
        raise InvariantViolation("server returned an optimum but no recovered point was recorded")

    # A·x̂ = b and B·x̂ ≥ 0 hold for every valid key; only x̂ ≥ 0 may fail
    if mat_vec(problem.A, recovered_x) != problem.b or not mat_vec(problem.B, recovered_x).is_nonneg():
        raise InvariantViolation(f"recovered point {tuple(recovered_x)} violates Ax = b or Bx >= 0")
    if not recovered_x.is_nonneg():
        return TrialTag.INFEASIBLE_RECOVERY

    value = problem.c.dot(recovered_x)
    if value < true_outcome.value:
        raise InvariantViolation(
            f"recovered value {value} beats the true optimum {true_outcome.value}"
        )
    return TrialTag.SUBOPTIMAL if value > true_outcome.value else TrialTag.FAITHFUL


def evaluate_trial(p: PeculiarProblem, key: MaskingKey, seed: int,
                   index: Optional[int] = None) -> AuditTrial:
    """encrypt → server solves with y ≥ 0 → decrypt → solve the true problem → classify"""
    masked = encrypt(p, key)
    server = solve_nonneg(masked_as_general(masked, add_nonneg=True))
    recovered = None
    if server.verdict is Verdict.OPTIMAL:
        recovered, _ = decrypt_solution(server.x_opt, p, key)
    true = solve_nonneg(peculiar_as_general(p, add_nonneg=True))
    tag = classify(p, server, recovered, true)
    logger.debug(f"Trial {index if index is not None else '-'} (seed {seed}): {tag.value}")
    return AuditTrial(
        seed=seed,
        problem=p,
        key=key,
        server_outcome=server,
        recovered_x=recovered,
        true_outcome=true,
        classification=tag,
        index=index,
    )


def generator_description(config: AuditConfig) -> Dict[str, Any]:
    """Sampling configuration and the named algorithms a report depends on"""
    return {
        "config": asdict(config),
        "rng": "MT19937 (random.Random)",
        "seed_split": "splitmix64",
        "pivot_rule": "bland",
        # rows with B·x0 < 0 are negated, not redrawn
        "random_b": "negate rows with B.x0 < 0, resample singular draws",
    }


def generator_fingerprint(config: AuditConfig) -> str:
    """SHA-256 over generator_description"""
    payload = generator_description(config)
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


def summarize(trials: Iterable[AuditTrial], errors: int, master_seed: int, m: int, n: int,
              b_mode: BMode, trials_requested: int,
              config: Optional[AuditConfig] = None) -> AuditReport:
    """Aggregate trials; the first counterexample per failure tag is the lowest-index one"""
    config = config or AuditConfig()
    ordered = sorted(trials, key=lambda t: -1 if t.index is None else t.index)
    counts = {tag: 0 for tag in TrialTag}
    first = {}
    for trial in ordered:
        tag = trial.classification
        counts[tag] += 1
        if tag in FAILURE_TAGS and tag not in first:
            first[tag] = trial
    return AuditReport(
        master_seed=master_seed,
        m=m,
        n=n,
        b_mode=b_mode,
        trials_requested=trials_requested,
        counts=counts,
        errors=errors,
        first_counterexamples={tag: first[tag] for tag in TrialTag if tag in first},
        fingerprint=generator_fingerprint(config),
    )


class AuditHarness:
    """Runs seeded trials of the outsourcing pipeline and aggregates them"""

    def __init__(self, config: Optional[AuditConfig] = None):
        self.config = config or AuditConfig()

    def run_trial(self, p: PeculiarProblem, key_seed: int, index: Optional[int] = None) -> AuditTrial:
        key = keygen(p, key_seed, self.config)
        return evaluate_trial(p, key, key_seed, index=index)

    def run_audit(self, m: int, n: int, trials: int, master_seed: int, b_mode: BMode) -> AuditReport:
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        logger.info(f"Auditing {trials} trials, m={m}, n={n}, seed={master_seed}, B={b_mode.value}")

        results: List[AuditTrial] = []
        errors = 0
        for i in range(trials):
            instance_seed = split_seed(master_seed, i, INSTANCE_STREAM)
            key_seed = split_seed(master_seed, i, KEY_STREAM)
            try:
                p = generate_instance(m, n, instance_seed, b_mode, self.config)
                results.append(self.run_trial(p, key_seed, index=i))
            except ResamplingExhausted as e:
                logger.warning(f"Trial {i} skipped: {e}")
                errors += 1

        report = summarize(results, errors, master_seed, m, n, b_mode, trials, self.config)
        if b_mode is BMode.IDENTITY and report.counts[TrialTag.INFEASIBLE_RECOVERY]:
            raise InvariantViolation("INFEASIBLE_RECOVERY with B = I")
        logger.info(
            f"Audit complete: {report.failures} failing trials, {errors} errors out of {trials}"
        )
        return report


def probe_vectors(n: int, n_samples: int, seed: int, low: int, high: int) -> List[RatVector]:
    """Zero, the unit vectors, then n_samples random integer vectors in [low, high]"""
    rng = make_rng(seed)
    probes = [RatVector.zeros(n)] + [RatVector.unit(n, i) for i in range(n)]
    probes += [random_int_vector(rng, n, low, high) for _ in range(n_samples)]
    return probes


def check_nonneg_preservation(k: MaskingKey, n_samples: int, seed: int,
                              config: Optional[AuditConfig] = None) -> Optional[NonnegCounterexample]:
    """First x ≥ 0 whose image M⁻¹(x + r) is not nonnegative, or None"""
    config = config or AuditConfig()
    for x in probe_vectors(k.n, n_samples, seed, 0, config.PROBE_ENTRY_BOUND):
        y = mask_point(k, x)
        bad = y.first_negative()
        if bad >= 0:
            return NonnegCounterexample(x=x, y=y, bad_index=bad)
    return None


def sign_equivalent(Bp: RatMatrix, y: RatVector) -> bool:
    """B′y ≥ 0 ⟺ y ≥ 0 on this one vector"""
    return mat_vec(Bp, y).is_nonneg() == y.is_nonneg()


def positive_diagonal_probe(p: PeculiarProblem, k: MaskingKey, n_samples: int, seed: int,
                            config: Optional[AuditConfig] = None) -> bool:
    """True when B′ is positive diagonal, after checking B′y ≥ 0 ⟺ y ≥ 0 on mixed-sign probes"""
    config = config or AuditConfig()
    Bp = encrypt(p, k).Bp
    if not is_positive_diagonal(Bp):
        return False
    bound = config.PROBE_ENTRY_BOUND
    probes = probe_vectors(p.n, n_samples, seed, -bound, bound)
    probes += [-RatVector.unit(p.n, i) for i in range(p.n)]
    for y in probes:
        if not sign_equivalent(Bp, y):
            raise InvariantViolation(f"positive diagonal B' breaks sign equivalence at {tuple(y)}")
    return True


def builtin_problem() -> PeculiarProblem:
    """minimize x₁ subject to x₁ + x₂ = 2, I·x ≥ 0"""
    return PeculiarProblem(
        A=RatMatrix.from_rows([[1, 1]]),
        b=RatVector.of(2),
        B=RatMatrix.identity(2),
        c=RatVector.of(1, 0),
    )


def builtin_key() -> MaskingKey:
    return MaskingKey(
        Q=RatMatrix.from_rows([[1]]),
        M=RatMatrix.identity(2),
        P=RatMatrix.from_rows([[-1], [0]]),
        r=RatVector.of(-1, 0),
        gamma=Fraction(1),
    )


def _expect(condition: bool, message: str):
    if not condition:
        raise InvariantViolation(f"builtin counterexample: {message}")


def builtin_counterexample() -> AuditTrial:
    """The fixed SUBOPTIMAL trial, with every number re-derived on construction"""
    p, k = builtin_problem(), builtin_key()
    masked = encrypt(p, k)
    _expect(masked.Ap == RatMatrix.from_rows([[1, 1]]), "A' != [[1, 1]]")
    _expect(masked.bp == RatVector.of(1), "b' != (1)")
    _expect(masked.Bp == RatMatrix.from_rows([[2, 1], [0, 1]]), "B' != [[2, 1], [0, 1]]")
    _expect(masked.cp == RatVector.of(1, 0), "c' != (1, 0)")

    trial = evaluate_trial(p, k, seed=0, index=0)
    server, true = trial.server_outcome, trial.true_outcome
    _expect(server.is_optimal and server.x_opt == RatVector.of(0, 1) and server.value == 0,
            "server optimum is not 0 at (0, 1)")
    _expect(trial.recovered_x == RatVector.of(1, 1), "recovered point is not (1, 1)")
    _expect(p.c.dot(trial.recovered_x) == 1, "recovered value is not 1")
    _expect(true.is_optimal and true.x_opt == RatVector.of(0, 2) and true.value == 0,
            "true optimum is not 0 at (0, 2)")
    _expect(trial.classification is TrialTag.SUBOPTIMAL, "classification is not SUBOPTIMAL")

    for general, outcome in ((masked_as_general(masked, True), server),
                             (peculiar_as_general(p, True), true)):
        _expect(enumerate_optimum(general).value == outcome.value, "oracle disagrees with simplex")
    return trial


def explain_counterexample(trial: AuditTrial) -> List[str]:
    """Human-readable trace of why the recovered answer misses the true optimum"""
    p, k = trial.problem, trial.key
    masked = encrypt(p, k)
    fmt = _format_vector
    lines = [
        f"True problem: minimize c'x, Ax = b, Bx >= 0, x >= 0 with "
        f"A={_format_matrix(p.A)}, b={fmt(p.b)}, B={_format_matrix(p.B)}, c={fmt(p.c)}",
        f"Key: Q={_format_matrix(k.Q)}, M={_format_matrix(k.M)}, P={_format_matrix(k.P)}, "
        f"r={fmt(k.r)}, gamma={k.gamma}",
        f"Masked problem: A'={_format_matrix(masked.Ap)}, b'={fmt(masked.bp)}, "
        f"B'={_format_matrix(masked.Bp)}, c'={fmt(masked.cp)}",
    ]
    server, true = trial.server_outcome, trial.true_outcome
    if server.is_optimal:
        lines.append(f"Server adds y >= 0 : optimum {server.value} at y={fmt(server.x_opt)}")
        lines.append(
            f"Client recovers x = My - r = {fmt(trial.recovered_x)} "
            f"with value {p.c.dot(trial.recovered_x)}"
        )
    else:
        lines.append(f"Server adds y >= 0 : {server.verdict.value}")
    if true.is_optimal:
        lines.append(f"True optimum: {true.value} at x={fmt(true.x_opt)}")
        y_star = mask_point(k, true.x_opt)
        lines.append(
            f"Its masked image y* = M^-1(x* + r) = {fmt(y_star)} has masked value "
            f"{masked.cp.dot(y_star)}; y >= 0 {'keeps' if y_star.is_nonneg() else 'cuts off'} this point"
        )
        free_true = solve_general(peculiar_as_general(p, add_nonneg=False))
        free_masked = solve_general(masked_as_general(masked, add_nonneg=False))
        if free_true.is_optimal and free_masked.is_optimal:
            lines.append(
                f"Without sign constraints: client optimum {free_true.value}, masked optimum "
                f"{free_masked.value} = gamma*({free_true.value} + c'r)"
            )
    lines.append(f"Classification: {trial.classification.value}")
    return lines


def _format_vector(v: RatVector) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


def _format_matrix(m: RatMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(a) for a in row) + "]" for row in m.to_rows()) + "]"
