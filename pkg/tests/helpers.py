import itertools

import numpy as np

from seqtomo.instrument import Instrument, QuantumOperation, apply, apply_dual, make_luders, make_projective
from seqtomo.linalg import random_unitary


def random_instrument(d, m, kraus_per_outcome, rng):
    """Random instrument from a Haar isometry split into ``m * k`` Kraus blocks."""
    k = kraus_per_outcome
    U = random_unitary(d * m * k, rng)
    V = U[:, :d]
    blocks = V.reshape(m * k, d, d)
    ops = [QuantumOperation(list(blocks[j * k : (j + 1) * k])) for j in range(m)]
    return Instrument(ops, label=f"random(d={d}, m={m})")


def random_channel(d, rng, k=2):
    V = random_unitary(d * k, rng)[:, :d]
    return QuantumOperation(list(V.reshape(k, d, d)))


def random_luders2(d, rng):
    U = random_unitary(d, rng)
    E1 = U @ np.diag(rng.uniform(0.05, 0.95, d)) @ U.conj().T
    E1 = 0.5 * (E1 + E1.conj().T)
    return make_luders([E1, np.eye(d) - E1])


def random_sharp(d, rng):
    U = random_unitary(d, rng)
    r = int(rng.integers(1, d))
    P = U[:, :r] @ U[:, :r].conj().T
    P = 0.5 * (P + P.conj().T)
    return make_projective([P, np.eye(d) - P], [random_channel(d, rng), random_channel(d, rng)])


def naive_effect(instr, index):
    """Nested dual maps, innermost belonging to the last outcome (1-based labels)."""
    X = np.eye(instr.dim, dtype=complex)
    for j in reversed(index):
        X = apply_dual(instr[j - 1], X)
    return X


def naive_probability(instr, index, rho):
    R = rho
    for j in index:
        R = apply(instr[j - 1], R)
    return np.trace(R).real


def all_indices(m, depth):
    return list(itertools.product(range(1, m + 1), repeat=depth))
