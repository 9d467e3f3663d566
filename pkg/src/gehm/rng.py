"""Labeled random substreams derived from a single master seed.

Every consumer of randomness (graph generation, initial condition, node
noise, OU noise, spectral start vector) draws from its own stream, keyed by
``(seed, label)``.  Changing how much one consumer draws never shifts the
numbers another consumer sees.
"""

import zlib

import numpy as np

LABELS = ("graph-gen", "node-init", "node-noise", "ou-noise", "spectral-init")


def label_key(label):
    if label not in LABELS:
        raise KeyError(f"unknown substream label {label!r}")
    return zlib.crc32(label.encode("ascii"))


def substream(seed, label):
    """Return an independent ``numpy.random.Generator`` for ``(seed, label)``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(label_key(label),))
    return np.random.Generator(np.random.PCG64(ss))
