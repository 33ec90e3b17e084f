"""
Validation classes for masking keys, audit trials and audit reports
"""
import hashlib
import logging
from typing import Optional, Tuple

from .audit import classify
from .exceptions import CertificateUnverified, LPMaskError
from .masking import decrypt_solution, encrypt, masked_B, masked_b
from .models import (
    AuditConfig,
    AuditReport,
    AuditTrial,
    MaskingKey,
    PeculiarProblem,
    TrialTag,
    Verdict,
    masked_as_general,
    peculiar_as_general,
)
from .numerics import determinant, mat_vec
from .serialization import dump_problem
from .simplex import check_certificate, solve_nonneg

logger = logging.getLogger(__name__)


def problem_fingerprint(problem: PeculiarProblem) -> str:
    """SHA-256 of the canonical problem file, used to bind keys to problems"""
    return hashlib.sha256(dump_problem(problem).encode("utf-8")).hexdigest()


class KeyValidator:
    """Checks a masking key's side conditions against a problem"""

    def __init__(self, config: Optional[AuditConfig] = None):
        self.config = config or AuditConfig()

    def validate(self, problem: PeculiarProblem, key: MaskingKey) -> Tuple[bool, Optional[str]]:
        """Every MaskingKey invariant, in the order they are stated"""
        if (key.m, key.n) != (problem.m, problem.n):
            return False, f"Key is {key.m}x{key.n} but problem is {problem.m}x{problem.n}"

        if determinant(key.Q) == 0:
            return False, "Q is singular"

        if determinant(key.M) == 0:
            return False, "M is singular"

        if key.gamma <= 0:
            return False, f"gamma must be positive, got {key.gamma}"

        if (problem.b + mat_vec(problem.A, key.r)).is_zero():
            return False, "b + A r is zero"

        bp = masked_b(problem, key.Q, key.r)
        if mat_vec(key.P, bp) != mat_vec(problem.B, key.r):
            return False, "P b' != B r"

        if determinant(masked_B(problem, key.Q, key.M, key.P)) == 0:
            return False, "B' is singular"

        return True, None

    def validate_fingerprint(self, problem: PeculiarProblem, expected: str) -> Tuple[bool, Optional[str]]:
        actual = problem_fingerprint(problem)
        if actual != expected:
            return False, f"Key was generated for problem {expected[:12]}..., not {actual[:12]}..."
        return True, None


class TrialValidator:
    """Re-derives an embedded trial from its problem and key"""

    def __init__(self, config: Optional[AuditConfig] = None):
        self.config = config or AuditConfig()
        self.key_validator = KeyValidator(self.config)

    def _check_outcome(self, general, outcome, label: str) -> Optional[str]:
        try:
            if not check_certificate(general, outcome, self.config.ORACLE_MAX_VARS):
                return f"{label} outcome fails its certificate"
        except CertificateUnverified as e:
            logger.debug(f"{label} certificate skipped: {e}")
        if solve_nonneg(general) != outcome:
            return f"{label} outcome does not replay"
        return None

    def validate(self, trial: AuditTrial) -> Tuple[bool, Optional[str]]:
        is_valid, error = self.key_validator.validate(trial.problem, trial.key)
        if not is_valid:
            return False, f"Invalid key: {error}"

        try:
            masked = encrypt(trial.problem, trial.key)
            error = self._check_outcome(masked_as_general(masked, True), trial.server_outcome, "Server")
            if error:
                return False, error

            error = self._check_outcome(peculiar_as_general(trial.problem, True), trial.true_outcome, "True")
            if error:
                return False, error

            expected_x = None
            if trial.server_outcome.verdict is Verdict.OPTIMAL:
                expected_x, _ = decrypt_solution(trial.server_outcome.x_opt, trial.problem, trial.key)
            if trial.recovered_x != expected_x:
                return False, "Recovered point is not M y - r"

            tag = classify(trial.problem, trial.server_outcome, trial.recovered_x, trial.true_outcome)
        except LPMaskError as e:
            return False, f"Trial does not re-derive: {e}"

        if tag is not trial.classification:
            return False, f"Stored tag {trial.classification.value} but data gives {tag.value}"

        return True, None


class ReportValidator:
    """Accounting and embedded-trial checks for an audit report"""

    def __init__(self, config: Optional[AuditConfig] = None):
        self.config = config or AuditConfig()
        self.trial_validator = TrialValidator(self.config)

    def validate(self, report: AuditReport) -> Tuple[bool, Optional[str]]:
        if set(report.counts) != set(TrialTag):
            return False, "Counts must list every classification tag"

        total = sum(report.counts.values()) + report.errors
        if total != report.trials_requested:
            return False, f"Counts sum to {total}, expected {report.trials_requested}"

        for tag, trial in report.first_counterexamples.items():
            if trial.classification is not tag:
                return False, f"Counterexample filed under {tag.value} is tagged {trial.classification.value}"
            if report.counts[tag] == 0:
                return False, f"Counterexample for {tag.value} but its count is zero"
            is_valid, error = self.trial_validator.validate(trial)
            if not is_valid:
                return False, f"{tag.value} counterexample: {error}"

        return True, None
