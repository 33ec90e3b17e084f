"""
Seed splitting and seeded generators

Every random draw in the package comes from random.Random (MT19937) seeded
with an integer; per-trial seeds come from split_seed, which applies the
SplitMix64 finalizer to master_seed + GOLDEN_GAMMA·(2·index + stream + 1)
modulo 2⁶⁴. Both are fully specified, so audits replay bit-exactly.
"""
import random

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

INSTANCE_STREAM = 0
KEY_STREAM = 1


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def split_seed(master_seed: int, index: int, stream: int) -> int:
    """64-bit seed for trial `index`, stream 0 (instance) or 1 (key)"""
    return splitmix64(master_seed + GOLDEN_GAMMA * (2 * index + stream + 1))


def make_rng(seed: int) -> random.Random:
    return random.Random(seed & MASK64)
