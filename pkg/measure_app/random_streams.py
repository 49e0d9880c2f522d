"""
Counter-based, splittable random streams.

Every stream is a Philox generator whose SeedSequence carries the
integer seed as entropy and the stream key as spawn key. A key such as
('estimate-constant', 17) always yields the same independent stream, so
parallel Monte Carlo runs are bit-reproducible regardless of how cells
are scheduled.
"""
import hashlib

import numpy as np

from core.exceptions import PreconditionError

SEED_MASK = 2**64 - 1


def key_word(part):
    """Maps one key component (non-negative int or str) onto a 64-bit word."""
    if isinstance(part, (bool, np.bool_)):
        raise PreconditionError("stream key parts must be ints or strings")
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise PreconditionError(f"stream key parts must be non-negative, got {part}")
        return int(part) & SEED_MASK
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode('utf-8')).digest()
        return int.from_bytes(digest[:8], byteorder='big')
    raise PreconditionError(f"unsupported stream key part {part!r}")


def stream(seed, *key):
    """
    Returns the generator for (seed, key).

    Args:
        seed (int): The 64-bit experiment seed.
        *key: Stream key parts, e.g. an experiment id and a trial index.

    Returns:
        numpy.random.Generator: A Philox-backed generator.
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & SEED_MASK,
        spawn_key=tuple(key_word(part) for part in key),
    )
    return np.random.Generator(np.random.Philox(sequence))
