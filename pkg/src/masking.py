"""
Client-side masking: key generation, problem encryption and solution decryption
"""
import logging
import random
from fractions import Fraction
from typing import Optional, Tuple

import tenacity

from .exceptions import DimensionMismatch, ResamplingExhausted
from .models import AuditConfig, MaskedProblem, MaskingKey, PeculiarProblem
from .numerics import RatMatrix, RatVector, determinant, mat_vec, null_space, solve_linear
from .seeding import make_rng

logger = logging.getLogger(__name__)


class KeyRejected(Exception):
    """A drawn key misses one of the side conditions; draw again"""


def trivial_key(p: PeculiarProblem) -> MaskingKey:
    """Q = I, M = I, P = 0, r = 0, γ = 1; valid whenever b ≠ 0"""
    return MaskingKey(
        Q=RatMatrix.identity(p.m),
        M=RatMatrix.identity(p.n),
        P=RatMatrix.zeros(p.n, p.m),
        r=RatVector.zeros(p.n),
        gamma=Fraction(1),
    )


def random_int_matrix(rng: random.Random, rows: int, cols: int, low: int, high: int) -> RatMatrix:
    return RatMatrix(rows, cols, tuple(rng.randint(low, high) for _ in range(rows * cols)))


def random_int_vector(rng: random.Random, length: int, low: int, high: int) -> RatVector:
    return RatVector(tuple(rng.randint(low, high) for _ in range(length)))


def _nonsingular(rng: random.Random, n: int, bound: int) -> RatMatrix:
    m = random_int_matrix(rng, n, n, -bound, bound)
    if determinant(m) == 0:
        raise KeyRejected(f"singular {n}x{n} draw")
    return m


def masked_b(p: PeculiarProblem, Q: RatMatrix, r: RatVector) -> RatVector:
    """b′ = Q(b + A·r)"""
    return mat_vec(Q, p.b + mat_vec(p.A, r))


def masked_B(p: PeculiarProblem, Q: RatMatrix, M: RatMatrix, P: RatMatrix) -> RatMatrix:
    """B′ = (B − P·Q·A)·M"""
    return (p.B - P @ Q @ p.A) @ M


def _draw_key(p: PeculiarProblem, rng: random.Random, config: AuditConfig) -> MaskingKey:
    bound = config.KEY_ENTRY_BOUND
    Q = _nonsingular(rng, p.m, bound)
    M = _nonsingular(rng, p.n, bound)
    r = random_int_vector(rng, p.n, -bound, bound)
    shifted = p.b + mat_vec(p.A, r)
    if shifted.is_zero():
        raise KeyRejected("b + A r = 0")
    gamma = Fraction(rng.randint(1, config.GAMMA_MAX), rng.randint(1, config.GAMMA_MAX))

    bp = mat_vec(Q, shifted)
    # Minimum-norm rank-one solution of P·b′ = B·r
    Br = mat_vec(p.B, r)
    P = RatMatrix.column(Br) @ RatMatrix.from_rows([bp.entries]).scale(1 / bp.dot(bp))
    if config.RANDOM_P_COMPONENT:
        # N·b′ = 0 for any N built from the orthogonal complement of b′
        for v in null_space([bp.entries], p.m):
            w = random_int_vector(rng, p.n, -bound, bound)
            P = P + RatMatrix.column(w) @ RatMatrix.from_rows([v.entries])

    if determinant(masked_B(p, Q, M, P)) == 0:
        raise KeyRejected("B' singular")
    return MaskingKey(Q=Q, M=M, P=P, r=r, gamma=gamma)


def keygen(p: PeculiarProblem, seed: int, config: Optional[AuditConfig] = None) -> MaskingKey:
    """Draw a key satisfying every side condition against p; deterministic per (p, seed)"""
    config = config or AuditConfig()
    if p.b.is_zero() and p.A.is_zero():
        raise ResamplingExhausted("b + A r = 0 for every r when A = 0 and b = 0")

    rng = make_rng(seed)
    retrying = tenacity.Retrying(
        stop=tenacity.stop_after_attempt(config.KEYGEN_MAX_ATTEMPTS),
        retry=tenacity.retry_if_exception_type(KeyRejected),
        before_sleep=lambda retry_state: logger.debug(
            f"Resampling key, attempt {retry_state.attempt_number}"
        ),
    )
    try:
        key = retrying(_draw_key, p, rng, config)
    except tenacity.RetryError as e:
        raise ResamplingExhausted(
            f"no valid key after {config.KEYGEN_MAX_ATTEMPTS} attempts (seed {seed})"
        ) from e
    logger.info(f"Generated {p.m}x{p.n} masking key from seed {seed}")
    return key


def _check_key_shape(p: PeculiarProblem, k: MaskingKey):
    if (k.m, k.n) != (p.m, p.n):
        raise DimensionMismatch("key/problem", (k.m, k.n), (p.m, p.n))


def encrypt(p: PeculiarProblem, k: MaskingKey) -> MaskedProblem:
    """A′ = QAM, B′ = (B − PQA)M, b′ = Q(b + Ar), c′ = γMᵀc"""
    _check_key_shape(p, k)
    return MaskedProblem(
        Ap=k.Q @ p.A @ k.M,
        Bp=masked_B(p, k.Q, k.M, k.P),
        bp=masked_b(p, k.Q, k.r),
        cp=mat_vec(k.M.transpose(), p.c).scale(k.gamma),
    )


def mask_point(k: MaskingKey, x: RatVector) -> RatVector:
    """y = M⁻¹(x + r)"""
    if len(x) != k.n:
        raise DimensionMismatch("mask_point", (k.n,), (len(x),))
    return solve_linear(k.M, x + k.r)


def decrypt_solution(y: RatVector, p: PeculiarProblem, k: MaskingKey) -> Tuple[RatVector, Fraction]:
    """x = M·y − r and its value under the client's own c"""
    _check_key_shape(p, k)
    if len(y) != p.n:
        raise DimensionMismatch("decrypt_solution", (p.n,), (len(y),))
    x = mat_vec(k.M, y) - k.r
    return x, p.c.dot(x)


def verify_feasibility_map(p: PeculiarProblem, k: MaskingKey, x: RatVector) -> Tuple[bool, bool]:
    """Feasibility of x for the client's free-sign problem and of y = M⁻¹(x + r) for the masked one"""
    masked = encrypt(p, k)
    y = mask_point(k, x)
    feasible1 = mat_vec(p.A, x) == p.b and mat_vec(p.B, x).is_nonneg()
    feasible2 = mat_vec(masked.Ap, y) == masked.bp and mat_vec(masked.Bp, y).is_nonneg()
    return feasible1, feasible2
