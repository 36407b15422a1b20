"""Seed derivation for reproducible parallel runs.

A splitmix-style hash of (master seed, index) gives every game or rollout
its own stream, so results never depend on scheduling or worker count.
"""

_MASK = (1 << 64) - 1


def mix_seed(master: int, index: int) -> int:
    z = (master + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK
