# walkpool/core/rng.py
"""
Portable random streams.

Only the raw 64-bit word stream of numpy's PCG64 bit generator is consumed.
That stream is fixed for a given seed across numpy releases and platforms,
unlike the distribution methods of ``numpy.random.Generator``. Every derived
quantity (bounded integers, shuffles, floats) is computed here from the raw
words with documented arithmetic so splits and initializations reproduce
anywhere.
"""
from typing import List, MutableSequence, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

_MASK64 = (1 << 64) - 1
_TWO_POW_M53 = 1.0 / (1 << 53)


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer"""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Mix integer keys into a seed; order of keys matters"""
    h = splitmix64(int(seed) & _MASK64)
    for key in keys:
        h = splitmix64(h ^ (int(key) & _MASK64))
    return h


class PortableRng:
    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._bits = np.random.PCG64(self.seed)

    def next_u64(self) -> int:
        return int(self._bits.random_raw())

    def raw(self, size: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(size), dtype=np.uint64)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on the raw words"""
        if n <= 0:
            raise ValueError("randbelow needs n > 0")
        limit = ((1 << 64) // n) * n
        while True:
            word = self.next_u64()
            if word < limit:
                return word % n

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _TWO_POW_M53

    def uniform_array(self, shape, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        size = int(np.prod(shape))
        words = self.raw(size) >> np.uint64(11)
        unit = words.astype(np.float64) * _TWO_POW_M53
        return (low + (high - low) * unit).reshape(shape)

    def shuffle(self, items: MutableSequence[T]) -> None:
        """In-place Fisher-Yates, last index first"""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> np.ndarray:
        order = list(range(n))
        self.shuffle(order)
        return np.asarray(order, dtype=np.int64)

    def sample(self, items: Sequence[T], k: int) -> List[T]:
        """k distinct items by a partial Fisher-Yates on a copy"""
        pool = list(items)
        if k > len(pool):
            raise ValueError(f"cannot sample {k} of {len(pool)} items")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
