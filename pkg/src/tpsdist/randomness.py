"""Seeded randomness and Haar-average baselines.

All stochastic code in the package draws from streams produced here, so a
single integer seed pins down every figure and every Monte Carlo estimate.
Streams are counter-based (Philox keyed by (seed, index)), which makes them
safe to hand to worker threads without coordination.
"""

from __future__ import annotations

import numpy as np

from .linalg import DenseOperator
from .structure import AlgebraSet


class SeededGenerator:
    """Deterministic family of independent random streams.

    ``stream(k)`` returns a numpy Generator backed by Philox with key
    (seed, k). Distinct indexes give statistically independent streams, and
    any stream can be reproduced from the two integers alone, regardless of
    the order in which streams were created or consumed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)

    def stream(self, index: int) -> np.random.Generator:
        key = np.array([self.seed, int(index)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return f"SeededGenerator(seed={self.seed})"


def haar_unitary(d: int, rng: np.random.Generator) -> DenseOperator:
    """Haar-distributed d x d unitary (Ginibre then QR with phase fix).

    The raw QR decomposition is not Haar because numpy's R can carry
    arbitrary diagonal phases; rescaling each column of Q by the phase of the
    matching diagonal entry of R removes the bias. The result goes through
    the unitarity construction gate.
    """
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag /= np.abs(diag)
    return DenseOperator.unitary(q * diag)


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state vector in C^d."""
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def typical_phi(algebras) -> float:
    """Exact Haar average of Phi for an algebra set.

    E_U Phi = 1 - dim(W/C1) / (d^2 - 1). Follows from the unitary
    second-moment formula: each correlator entry averages to 1/(d^2 - 1).
    Accepts an AlgebraSet or a plain sequence of local dims (full factor set).
    """
    if isinstance(algebras, AlgebraSet):
        d = algebras.d
        k = algebras.dim_w_traceless
    else:
        dims = [int(q) for q in algebras]
        d = int(np.prod(dims))
        k = sum(q * q - 1 for q in dims)
    return 1.0 - k / (d * d - 1.0)


def typical_phi_clustered(d: int, m: int) -> float:
    """Haar average of Phi when H splits into m equal clusters of total dim d."""
    q = round(d ** (1.0 / m))
    for cand in (q - 1, q, q + 1):
        if cand >= 2 and cand**m == d:
            return typical_phi([cand] * m)
    raise ValueError(f"d = {d} is not a perfect m = {m} power of an integer >= 2")


def typical_phi_qubit(partition) -> float:
    """Haar average of Phi for qubits grouped into clusters of sizes ``partition``.

    partition = (n_1, ..., n_M) with sum N gives
    1 - sum_i (4^{n_i} - 1) / (4^N - 1). Over all partitions of N the value
    is maximal for the finest one, all n_i = 1: merging two clusters always
    adds to the preserved weight, since 4^{a+b} - 1 > (4^a - 1) + (4^b - 1).
    """
    partition = [int(n) for n in partition]
    if any(n < 1 for n in partition):
        raise ValueError(f"cluster sizes must be >= 1, got {partition}")
    n_total = sum(partition)
    k = sum(4**n - 1 for n in partition)
    return 1.0 - k / (4**n_total - 1.0)


def typical_phi_qubit_max(n_qubits: int) -> tuple[float, tuple[int, ...]]:
    """The largest Haar-average Phi over qubit clusterings, and its argmax.

    Attained at the finest partition (1, ..., 1):
    1 - 3 N / (4^N - 1).
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    part = (1,) * n_qubits
    return typical_phi_qubit(part), part
