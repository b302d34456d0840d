"""Deterministic random streams keyed by (master seed, purpose, indices).

Every consumer of randomness asks for its own stream instead of sharing a
generator, so results never depend on the order in which work is executed.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import numbers
import zlib

import numpy as np

from .errors import InvalidConfig


def label_key(label):
    """Stable 32-bit key for a purpose label (C{hash()} is salted per run)."""
    return zlib.crc32(label.encode('utf-8')) & 0xffffffff


def _seed_sequence(master_seed, label, indices):
    if isinstance(master_seed, bool) or not isinstance(
            master_seed, numbers.Integral) or master_seed < 0:
        raise InvalidConfig("Seed must be a non-negative integer, got %r"
                            % (master_seed,))
    for idx in indices:
        if not isinstance(idx, numbers.Integral) or idx < 0:
            raise InvalidConfig("Stream index must be a non-negative "
                                "integer, got %r" % (idx,))
    return np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=(label_key(label),) + tuple(int(x) for x in indices))


def stream(master_seed, label, *indices):
    """Return a fresh counter-based generator for one purpose.

    @param master_seed: Non-negative integer seed of the whole experiment
    @param label: Purpose label such as C{'session'} or C{'world-click'}
    @param indices: Further non-negative integers (day, user, run...)
    @rtype: C{numpy.random.Generator}
    """
    seq = _seed_sequence(master_seed, label, indices)
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(master_seed, label, *indices):
    """Derive a child integer seed, for APIs that take a seed not a stream."""
    seq = _seed_sequence(master_seed, label, indices)
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def as_generator(seed, label):
    """Accept either an integer seed or a ready generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(seed, label)
