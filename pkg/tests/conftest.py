import numpy as np

from tpsdist import SeededGenerator, haar_unitary

SEED = 20260819


def stream(index: int) -> np.random.Generator:
    return SeededGenerator(SEED).stream(index)


def unitaries(d: int, n: int, stream_index: int = 0) -> list[np.ndarray]:
    rng = stream(stream_index)
    return [haar_unitary(d, rng).matrix for _ in range(n)]


def random_local_product(dims, rng) -> np.ndarray:
    """A product of independent local unitaries, one per factor."""
    out = None
    for q in dims:
        v = haar_unitary(q, rng).matrix
        out = v if out is None else np.kron(out, v)
    return out
