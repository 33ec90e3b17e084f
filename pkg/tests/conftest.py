"""
Pytest configuration and shared fixtures
"""
import os
import sys
import pytest
from dotenv import load_dotenv

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

# Load environment variables
load_dotenv()

from src.audit import builtin_key, builtin_problem
from src.models import AuditConfig, GeneralLP, Sign, StandardMaxProblem
from src.numerics import RatMatrix, RatVector


@pytest.fixture
def config():
    """Default AuditConfig"""
    return AuditConfig()


@pytest.fixture
def counter_problem():
    """minimize x1 subject to x1 + x2 = 2, I x >= 0"""
    return builtin_problem()


@pytest.fixture
def counter_key():
    """Q = [1], M = I, P = (-1, 0), r = (-1, 0), gamma = 1"""
    return builtin_key()


@pytest.fixture
def wyndor():
    """max 3x1 + 5x2 with x1 <= 4, 2x2 <= 12, 3x1 + 2x2 <= 18"""
    return StandardMaxProblem(
        A=RatMatrix.from_rows([[1, 0], [0, 2], [3, 2]]),
        b=RatVector.of(4, 12, 18),
        c=RatVector.of(3, 5),
    )


@pytest.fixture
def make_lp():
    """Factory for GeneralLPs with every variable nonnegative, from plain lists"""
    def build(c, Aeq=None, beq=None, G=None):
        return GeneralLP(
            c=RatVector.of(*c),
            Aeq=None if Aeq is None else RatMatrix.from_rows(Aeq),
            beq=None if beq is None else RatVector.of(*beq),
            Gineq=None if G is None else RatMatrix.from_rows(G),
            sign=(Sign.NONNEGATIVE,) * len(c),
        )
    return build
