"""
Unit tests for problem models and conversions
"""
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from src.exceptions import DimensionMismatch, InvalidProblem, NonSquareMatrix
from src.masking import encrypt, trivial_key
from src.models import (
    FAILURE_TAGS,
    AugmentedProblem,
    MaskedProblem,
    MaskingKey,
    PeculiarProblem,
    Sign,
    SolveOutcome,
    StandardMaxProblem,
    TrialTag,
    Verdict,
    augmented_as_general,
    is_positive_diagonal,
    masked_as_general,
    peculiar_as_general,
    standard_as_general,
    to_augmented,
)
from src.numerics import RatMatrix, RatVector
from src.simplex import solve_nonneg


class TestPeculiarProblem:
    """Tests for PeculiarProblem invariants"""

    def test_valid(self, counter_problem):
        assert (counter_problem.m, counter_problem.n) == (1, 2)

    def test_singular_B(self):
        with pytest.raises(InvalidProblem):
            PeculiarProblem(
                A=RatMatrix.from_rows([[1, 1]]),
                b=RatVector.of(2),
                B=RatMatrix.from_rows([[1, 2], [2, 4]]),
                c=RatVector.of(1, 0),
            )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            PeculiarProblem(
                A=RatMatrix.from_rows([[1, 1]]),
                b=RatVector.of(2, 3),
                B=RatMatrix.identity(2),
                c=RatVector.of(1, 0),
            )

    def test_masked_needs_nonzero_b(self):
        with pytest.raises(InvalidProblem):
            MaskedProblem(
                Ap=RatMatrix.from_rows([[1, 1]]),
                Bp=RatMatrix.identity(2),
                bp=RatVector.of(0),
                cp=RatVector.of(1, 0),
            )


class TestAugmented:
    """Tests for to_augmented"""

    def test_single_slack(self):
        p = StandardMaxProblem(A=RatMatrix.from_rows([[1]]), b=RatVector.of(5), c=RatVector.of(1))
        aug = to_augmented(p)
        assert aug.Aaug == RatMatrix.from_rows([[1, 1]])
        assert aug.b == RatVector.of(5)
        assert aug.c_ext == RatVector.of(1, 0)
        assert aug.slack_offset == 1

    def test_identity_block(self, wyndor):
        aug = to_augmented(wyndor)
        assert aug.Aaug.shape == (3, 5)
        for i in range(3):
            assert aug.Aaug.row(i)[2:] == RatMatrix.identity(3).row(i)

    def test_zero_row_preserved(self):
        p = StandardMaxProblem(A=RatMatrix.from_rows([[0, 0]]), b=RatVector.of(0), c=RatVector.of(1, 1))
        assert to_augmented(p).Aaug == RatMatrix.from_rows([[0, 0, 1]])

    def test_rejects_broken_identity_block(self):
        with pytest.raises(InvalidProblem):
            AugmentedProblem(
                Aaug=RatMatrix.from_rows([[1, 2]]),
                b=RatVector.of(5),
                c_ext=RatVector.of(1, 0),
                slack_offset=1,
            )

    def test_rejects_slack_cost(self):
        with pytest.raises(InvalidProblem):
            AugmentedProblem(
                Aaug=RatMatrix.from_rows([[1, 1]]),
                b=RatVector.of(5),
                c_ext=RatVector.of(1, 1),
                slack_offset=1,
            )

    def test_wyndor_values_agree(self, wyndor):
        inequality = solve_nonneg(standard_as_general(wyndor))
        equality = solve_nonneg(augmented_as_general(to_augmented(wyndor)))
        assert inequality.value == equality.value == -36
        assert equality.x_opt == RatVector.of(2, 6, 2, 0, 0)

    @given(
        A=st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=2), min_size=1, max_size=3),
        b=st.lists(st.integers(0, 10), min_size=3, max_size=3),
        c=st.lists(st.integers(-5, 5), min_size=2, max_size=2),
    )
    @settings(max_examples=50, deadline=None)
    def test_optimal_values_agree(self, A, b, c):
        # Nonnegative A rows plus a bounding row keep the max finite
        rows = A + [[1, 1]]
        p = StandardMaxProblem(A=RatMatrix.from_rows(rows),
                               b=RatVector.of(*(b[:len(A)] + [10])),
                               c=RatVector.of(*c))
        inequality = solve_nonneg(standard_as_general(p))
        equality = solve_nonneg(augmented_as_general(to_augmented(p)))
        assert inequality.verdict is equality.verdict is Verdict.OPTIMAL
        assert inequality.value == equality.value


class TestGeneralForms:
    """Tests for peculiar_as_general and masked_as_general"""

    def test_free_variant(self, counter_problem):
        general = peculiar_as_general(counter_problem, add_nonneg=False)
        assert general.sign == (Sign.FREE, Sign.FREE)
        assert general.Gineq == RatMatrix.identity(2)
        assert (general.Aeq, general.beq, general.c) == (counter_problem.A, counter_problem.b, counter_problem.c)

    def test_nonneg_variant(self, counter_problem):
        general = peculiar_as_general(counter_problem, add_nonneg=True)
        assert general.sign == (Sign.NONNEGATIVE, Sign.NONNEGATIVE)
        assert general.all_nonneg()

    def test_B_carried_verbatim(self):
        B = RatMatrix.from_rows([[2, 1], [0, 1]])
        p = PeculiarProblem(A=RatMatrix.from_rows([[1, 1]]), b=RatVector.of(2), B=B, c=RatVector.of(1, 0))
        assert peculiar_as_general(p, True).Gineq == B

    def test_identity_masked_matches_original(self, counter_problem):
        masked = encrypt(counter_problem, trivial_key(counter_problem))
        assert masked_as_general(masked, True) == peculiar_as_general(counter_problem, True)

    def test_counterexample_masked(self, counter_problem, counter_key):
        general = masked_as_general(encrypt(counter_problem, counter_key), add_nonneg=True)
        assert general.Gineq == RatMatrix.from_rows([[2, 1], [0, 1]])
        assert masked_as_general(encrypt(counter_problem, counter_key), False).sign == (Sign.FREE,) * 2

    def test_feasibility_and_directions(self, counter_problem):
        general = peculiar_as_general(counter_problem, True)
        assert general.is_feasible(RatVector.of(0, 2))
        assert not general.is_feasible(RatVector.of(3, -1))
        assert general.is_recession_direction(RatVector.of(0, 0))
        assert not general.is_recession_direction(RatVector.of(1, -1))


class TestPositiveDiagonal:
    """Tests for is_positive_diagonal"""

    @pytest.mark.parametrize("rows,expected", [
        ([[2, 0], [0, 1]], True),
        ([[2, 1], [0, 1]], False),
        ([[2, 0], [0, -1]], False),
    ])
    def test_examples(self, rows, expected):
        assert is_positive_diagonal(RatMatrix.from_rows(rows)) is expected

    def test_non_square(self):
        with pytest.raises(NonSquareMatrix):
            is_positive_diagonal(RatMatrix.from_rows([[1, 0]]))

    @given(y=st.lists(st.integers(-10, 10), min_size=3, max_size=3))
    @settings(max_examples=100)
    def test_sign_equivalence(self, y):
        m = RatMatrix.diagonal([Fraction(1, 2), 3, 7])
        v = RatVector(tuple(y))
        assert (m @ v).is_nonneg() == v.is_nonneg()


class TestOutcomesAndKeys:
    """Tests for SolveOutcome and MaskingKey invariants"""

    def test_optimal_needs_point(self):
        with pytest.raises(InvalidProblem):
            SolveOutcome(Verdict.OPTIMAL, value=Fraction(0))

    def test_unbounded_needs_ray(self):
        with pytest.raises(InvalidProblem):
            SolveOutcome(Verdict.UNBOUNDED)

    def test_key_shapes(self):
        with pytest.raises(DimensionMismatch):
            MaskingKey(Q=RatMatrix.identity(1), M=RatMatrix.identity(3), P=RatMatrix.zeros(2, 1),
                       r=RatVector.zeros(2), gamma=Fraction(1))

    def test_failure_tags(self):
        assert TrialTag.SUBOPTIMAL.is_failure
        assert not TrialTag.FAITHFUL.is_failure
        assert not TrialTag.TRUE_UNBOUNDED.is_failure
        assert len(FAILURE_TAGS) == 4
