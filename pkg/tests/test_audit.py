"""
Tests for the audit harness: instance generation, trial classification and reports
"""
from fractions import Fraction

import pytest

from src.audit import (
    AuditHarness,
    builtin_counterexample,
    check_nonneg_preservation,
    classify,
    evaluate_trial,
    explain_counterexample,
    generate_instance,
    generator_description,
    generator_fingerprint,
    positive_diagonal_probe,
    sign_equivalent,
    summarize,
)
from src.exceptions import InvalidProblem, InvariantViolation, ResamplingExhausted
from src.masking import encrypt, mask_point, trivial_key
from src.models import (
    AuditConfig,
    BMode,
    MaskingKey,
    PeculiarProblem,
    SolveOutcome,
    TrialTag,
    Verdict,
    peculiar_as_general,
)
from src.numerics import RatMatrix, RatVector, mat_vec
from src.serialization import dump_report
from src.simplex import solve_nonneg
from src.validators import ReportValidator


def optimal(x, value):
    return SolveOutcome(Verdict.OPTIMAL, x_opt=RatVector.of(*x), value=Fraction(value))


def nonzero_counts(report):
    return {tag: count for tag, count in report.counts.items() if count}


class TestGenerateInstance:
    """Tests for generate_instance"""

    def test_deterministic(self):
        assert generate_instance(1, 2, 5, BMode.IDENTITY) == generate_instance(1, 2, 5, BMode.IDENTITY)

    def test_identity_mode(self):
        p = generate_instance(1, 2, 7, BMode.IDENTITY)
        assert p.B == RatMatrix.identity(2)

    def test_entry_ranges(self):
        p = generate_instance(3, 5, 11, BMode.RANDOM)
        assert all(-5 <= a <= 5 for a in p.A.entries)
        assert all(-5 <= a <= 5 for a in p.c)

    @pytest.mark.parametrize("m,n", [(2, 2), (4, 2), (0, 3), (3, 13)])
    def test_rejects_bad_dimensions(self, m, n):
        with pytest.raises(InvalidProblem):
            generate_instance(m, n, 0, BMode.IDENTITY)

    @pytest.mark.parametrize("mode", list(BMode))
    def test_true_problem_is_feasible(self, mode):
        for seed in range(10):
            p = generate_instance(2, 4, seed, mode)
            assert solve_nonneg(peculiar_as_general(p, True)).verdict is not Verdict.INFEASIBLE

    def test_random_B_exhaustion(self, mocker):
        mocker.patch('src.audit.determinant', return_value=Fraction(0))
        with pytest.raises(ResamplingExhausted):
            generate_instance(1, 2, 0, BMode.RANDOM, AuditConfig(GENERATOR_MAX_ATTEMPTS=3))

    def test_random_B_rule_is_part_of_the_fingerprint(self):
        config = AuditConfig()
        assert "negate rows" in generator_description(config)["random_b"]
        assert generator_fingerprint(config) == generator_fingerprint(AuditConfig())
        assert generator_fingerprint(config) != generator_fingerprint(AuditConfig(X0_MAX=4))


class TestClassify:
    """Tests for classify"""

    @pytest.fixture
    def skewed_problem(self):
        """B = [[1, 1], [0, 1]] admits points with Bx >= 0 but x < 0"""
        return PeculiarProblem(
            A=RatMatrix.from_rows([[1, 1]]),
            b=RatVector.of(2),
            B=RatMatrix.from_rows([[1, 1], [0, 1]]),
            c=RatVector.of(1, 0),
        )

    def test_true_verdicts_first(self, counter_problem):
        infeasible = SolveOutcome(Verdict.INFEASIBLE)
        unbounded = SolveOutcome(Verdict.UNBOUNDED, ray=RatVector.of(1, 0))
        assert classify(counter_problem, infeasible, None, infeasible) is TrialTag.TRUE_INFEASIBLE
        assert classify(counter_problem, infeasible, None, unbounded) is TrialTag.TRUE_UNBOUNDED

    def test_masked_verdicts(self, counter_problem):
        true = optimal((0, 2), 0)
        assert classify(counter_problem, SolveOutcome(Verdict.INFEASIBLE), None, true) is TrialTag.MASKED_INFEASIBLE
        server = SolveOutcome(Verdict.UNBOUNDED, ray=RatVector.of(1, 1))
        assert classify(counter_problem, server, None, true) is TrialTag.MASKED_UNBOUNDED

    def test_faithful_and_suboptimal(self, counter_problem):
        true = optimal((0, 2), 0)
        server = optimal((0, 1), 0)
        assert classify(counter_problem, server, RatVector.of(0, 2), true) is TrialTag.FAITHFUL
        assert classify(counter_problem, server, RatVector.of(1, 1), true) is TrialTag.SUBOPTIMAL

    def test_infeasible_recovery(self, skewed_problem):
        true = optimal((0, 2), 0)
        tag = classify(skewed_problem, optimal((0, 1), 0), RatVector.of(-1, 3), true)
        assert tag is TrialTag.INFEASIBLE_RECOVERY

    def test_value_below_optimum_is_a_violation(self, counter_problem):
        with pytest.raises(InvariantViolation):
            classify(counter_problem, optimal((0, 1), 0), RatVector.of(0, 2), optimal((0, 2), 1))

    def test_partial_feasibility_is_checked(self, counter_problem):
        with pytest.raises(InvariantViolation):
            classify(counter_problem, optimal((0, 1), 0), RatVector.of(1, 0), optimal((0, 2), 0))


class TestTrials:
    """Tests for evaluate_trial and run_trial"""

    def test_trivial_key_is_faithful(self, counter_problem):
        trial = evaluate_trial(counter_problem, trivial_key(counter_problem), seed=0)
        assert trial.classification is TrialTag.FAITHFUL
        assert counter_problem.c.dot(trial.recovered_x) == trial.true_outcome.value

    def test_run_trial_uses_key_seed(self, counter_problem):
        harness = AuditHarness()
        assert harness.run_trial(counter_problem, 9) == harness.run_trial(counter_problem, 9)
        assert harness.run_trial(counter_problem, 9).seed == 9


class TestBuiltinCounterexample:
    """Tests for the built-in SUBOPTIMAL trial"""

    def test_numbers(self):
        trial = builtin_counterexample()
        masked = encrypt(trial.problem, trial.key)
        assert masked.Bp == RatMatrix.from_rows([[2, 1], [0, 1]])
        assert trial.server_outcome.x_opt == RatVector.of(0, 1)
        assert trial.server_outcome.value == 0
        assert trial.recovered_x == RatVector.of(1, 1)
        assert trial.problem.c.dot(trial.recovered_x) == 1
        assert trial.true_outcome.x_opt == RatVector.of(0, 2)
        assert trial.true_outcome.value == 0
        assert trial.classification is TrialTag.SUBOPTIMAL

    def test_true_optimum_is_cut_off(self):
        trial = builtin_counterexample()
        y_star = mask_point(trial.key, trial.true_outcome.x_opt)
        assert y_star == RatVector.of(-1, 2)
        assert encrypt(trial.problem, trial.key).cp.dot(y_star) == -1

    def test_single_trial_report(self, config):
        trial = builtin_counterexample()
        report = summarize([trial], 0, 0, 1, 2, BMode.IDENTITY, 1, config)
        assert report.counts[TrialTag.SUBOPTIMAL] == 1
        assert report.first_counterexamples[TrialTag.SUBOPTIMAL] == trial
        assert ReportValidator(config).validate(report) == (True, None)

    def test_explanation(self):
        lines = explain_counterexample(builtin_counterexample())
        text = "\n".join(lines)
        assert "(-1, 2)" in text
        assert "masked value -1" in text
        assert "cuts off" in text
        assert lines[-1] == "Classification: SUBOPTIMAL"


class TestProbes:
    """Tests for nonnegativity and positive-diagonal probes"""

    def test_counterexample_key_breaks_nonnegativity(self, counter_key):
        witness = check_nonneg_preservation(counter_key, 100, seed=0)
        assert witness.x == RatVector.of(0, 0)
        assert witness.y == RatVector.of(-1, 0)
        assert witness.bad_index == 0

    def test_trivial_key_preserves_nonnegativity(self, counter_problem):
        assert check_nonneg_preservation(trivial_key(counter_problem), 100, seed=0) is None

    def test_positive_shift_preserves_nonnegativity(self):
        key = MaskingKey(Q=RatMatrix.identity(1), M=RatMatrix.identity(2), P=RatMatrix.zeros(2, 1),
                         r=RatVector.of(1, 1), gamma=Fraction(1))
        assert check_nonneg_preservation(key, 100, seed=3) is None

    def test_positive_diagonal(self):
        p = PeculiarProblem(A=RatMatrix.from_rows([[1, 1]]), b=RatVector.of(2),
                            B=RatMatrix.diagonal([1, 2]), c=RatVector.of(1, 0))
        assert positive_diagonal_probe(p, trivial_key(p), 100, seed=0) is True

    def test_counterexample_B_is_not_diagonal(self, counter_problem, counter_key):
        assert positive_diagonal_probe(counter_problem, counter_key, 100, seed=0) is False

    def test_sign_equivalence_on_mixed_vector(self):
        Bp = RatMatrix.diagonal([2, 1])
        y = RatVector.of(-1, 3)
        assert mat_vec(Bp, y) == RatVector.of(-2, 3)
        assert sign_equivalent(Bp, y)


class TestRunAudit:
    """Tests for AuditHarness.run_audit"""

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            AuditHarness().run_audit(2, 4, 0, 1, BMode.IDENTITY)

    def test_keygen_errors_are_counted(self, mocker):
        mocker.patch('src.audit.keygen', side_effect=ResamplingExhausted("no key"))
        report = AuditHarness().run_audit(1, 2, 3, 0, BMode.IDENTITY)
        assert report.errors == 3
        assert sum(report.counts.values()) == 0
        assert ReportValidator().validate(report) == (True, None)

    def test_summary_is_order_independent(self, config):
        harness = AuditHarness(config)
        trials = [harness.run_trial(generate_instance(1, 3, s, BMode.IDENTITY), s, index=s) for s in range(6)]
        forward = summarize(trials, 0, 0, 1, 3, BMode.IDENTITY, 6, config)
        backward = summarize(list(reversed(trials)), 0, 0, 1, 3, BMode.IDENTITY, 6, config)
        assert dump_report(forward) == dump_report(backward)

    @pytest.mark.slow
    def test_identity_audit(self, config):
        report = AuditHarness(config).run_audit(2, 4, 200, 1, BMode.IDENTITY)
        assert report.errors == 0
        assert nonzero_counts(report) == {
            TrialTag.FAITHFUL: 6,
            TrialTag.SUBOPTIMAL: 24,
            TrialTag.MASKED_INFEASIBLE: 113,
            TrialTag.TRUE_UNBOUNDED: 57,
        }
        assert ReportValidator(config).validate(report) == (True, None)

    @pytest.mark.slow
    def test_random_B_audit(self, config):
        report = AuditHarness(config).run_audit(2, 4, 200, 1, BMode.RANDOM)
        assert report.errors == 0
        assert nonzero_counts(report) == {
            TrialTag.FAITHFUL: 2,
            TrialTag.SUBOPTIMAL: 8,
            TrialTag.INFEASIBLE_RECOVERY: 27,
            TrialTag.MASKED_INFEASIBLE: 124,
            TrialTag.MASKED_UNBOUNDED: 5,
            TrialTag.TRUE_UNBOUNDED: 34,
        }
        assert ReportValidator(config).validate(report) == (True, None)

    @pytest.mark.slow
    def test_deterministic(self, config):
        first = AuditHarness(config).run_audit(2, 4, 25, 3, BMode.RANDOM)
        second = AuditHarness(config).run_audit(2, 4, 25, 3, BMode.RANDOM)
        assert dump_report(first) == dump_report(second)
