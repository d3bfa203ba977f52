"""Deterministic, portable random streams.

Every random decision in a generation run is drawn from an :class:`RngStream`
derived from ``(master_seed, path)``.  The derivation rule is fixed:

    key  = SHA-256( "gamesynth-rng/v1" 0x00 str(master_seed) 0x00 label_1 0x1f label_2 ... )
    seed = first 16 bytes of key, big-endian, as an unsigned 128-bit integer
    bits = numpy PCG64(seed)

Only the raw 64-bit output of the bit generator is consumed; all derived
draws (bounded integers, floats, shuffles) are implemented here so that the
stream does not depend on numpy's ``Generator`` method implementations, which
are not covered by numpy's stream-compatibility policy.
"""

from __future__ import annotations

import hashlib
from typing import MutableSequence, Sequence, TypeVar

import numpy as np

RNG_VERSION = "gamesynth-rng/v1"
U64_MASK = (1 << 64) - 1

T = TypeVar("T")


def _derive_seed(master_seed: int, path: Sequence[object]) -> int:
    h = hashlib.sha256()
    h.update(RNG_VERSION.encode())
    h.update(b"\x00")
    h.update(str(master_seed & U64_MASK).encode())
    h.update(b"\x00")
    h.update("\x1f".join(str(p) for p in path).encode("utf-8"))
    return int.from_bytes(h.digest()[:16], "big")


class RngStream:
    """A seeded stream of random draws identified by a label path."""

    def __init__(self, master_seed: int, path: Sequence[object] = ()):
        if master_seed < 0 or master_seed > U64_MASK:
            raise ValueError(f"master seed out of u64 range: {master_seed}")
        self.master_seed = master_seed
        self.path = tuple(str(p) for p in path)
        self.seed = _derive_seed(master_seed, self.path)
        self._bits = np.random.PCG64(self.seed)

    def __repr__(self) -> str:
        return f"RngStream({self.master_seed}, {list(self.path)!r})"

    def fork(self, *labels: object) -> "RngStream":
        """Child stream whose path extends this one; independent of draws made here."""
        return RngStream(self.master_seed, self.path + tuple(str(x) for x in labels))

    def next_u64(self) -> int:
        return int(self._bits.random_raw())

    def random(self) -> float:
        """Float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        if n == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.randbelow(hi - lo + 1)

    def chance(self, p: float) -> bool:
        return self.random() < p

    def choice(self, seq: Sequence[T]) -> T:
        if not seq:
            raise IndexError("choice from empty sequence")
        return seq[self.randbelow(len(seq))]

    def shuffle(self, seq: MutableSequence[T]) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def shuffled(self, seq: Sequence[T]) -> list[T]:
        out = list(seq)
        self.shuffle(out)
        return out

    def sample(self, seq: Sequence[T], k: int) -> list[T]:
        if k > len(seq):
            raise ValueError(f"sample of {k} from {len(seq)} items")
        pool = list(seq)
        # partial Fisher-Yates from the front
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def weighted_index(self, weights: Sequence[float]) -> int:
        total = float(sum(weights))
        if total <= 0:
            raise ValueError("weights must have a positive sum")
        x = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if x < acc:
                return i
        return max(i for i, w in enumerate(weights) if w > 0)


def derive_rng(master_seed: int, path: Sequence[object]) -> RngStream:
    return RngStream(master_seed, path)
