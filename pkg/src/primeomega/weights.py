"""
Prime-divisor weights omega(n) and Omega(n) on 1..k_max.

A :class:`WeightTable` holds one of the two weights for every n up to a
bound, together with its exact prefix sums and the smallest-prime-factor
array it was derived from. Everything downstream reads weights through a
table, so a table is built once and never mutated.
"""
from __future__ import annotations

import enum
import hashlib
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Largest supported table bound.
K_LIMIT = 10**8

_MAGIC = b"PWGT"
_VERSION = 1
_HEADER = struct.Struct("<4sQQQ32s")


class WeightKind(enum.Enum):
    """Which weight g is: distinct primes (omega) or primes with multiplicity (Omega)."""

    LITTLE_OMEGA = "little-omega"
    BIG_OMEGA = "big-omega"

    @classmethod
    def parse(cls, text: str | "WeightKind") -> "WeightKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        aliases = {"little": cls.LITTLE_OMEGA, "big": cls.BIG_OMEGA}
        if key in aliases:
            return aliases[key]
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown weight kind {text!r}")


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Sieved weights g(n) for 1 <= n <= k_max.

    Attributes
    ----------
    k_max : int
        Inclusive bound.
    kind : WeightKind
    values : np.ndarray
        ``values[n] = g(n)`` for ``1 <= n <= k_max``; ``values[0]`` is an
        unused zero so indices match n.
    prefix : np.ndarray
        ``prefix[K] = S_{g,K}``, int64, with ``prefix[0] = 0``.
    smallest_prime_factor : np.ndarray
        ``smallest_prime_factor[n]`` for ``n >= 2``; entries 0 and 1 are 0.
    """

    k_max: int
    kind: WeightKind
    values: np.ndarray
    prefix: np.ndarray
    smallest_prime_factor: np.ndarray

    def __post_init__(self):
        for arr in (self.values, self.prefix, self.smallest_prime_factor):
            arr.setflags(write=False)

    def S(self, K: int) -> int:
        """Exact partial sum of g over 1..K."""
        self._check(K)
        return int(self.prefix[K])

    def g(self, n: int) -> int:
        self._check(n)
        return int(self.values[n])

    def primes(self, k: int | None = None) -> np.ndarray:
        """All primes <= k (defaults to k_max), ascending."""
        k = self.k_max if k is None else k
        self._check(k, allow_zero=True)
        spf = self.smallest_prime_factor[: k + 1]
        idx = np.arange(spf.size)
        return idx[(spf == idx) & (idx >= 2)]

    def running_max(self) -> np.ndarray:
        """``out[K] = max_{n <= K} g(n)`` (with ``out[0] = 0``)."""
        return np.maximum.accumulate(self.values)

    def _check(self, k: int, allow_zero: bool = False) -> None:
        lo = 0 if allow_zero else 1
        if not lo <= k <= self.k_max:
            raise IndexError(f"{k} outside table range [{lo}, {self.k_max}]")


def smallest_prime_factors(k_max: int) -> np.ndarray:
    """Smallest prime factor of every integer up to ``k_max``.

    Entries 0 and 1 are 0. Composite marking runs over primes up to
    sqrt(k_max) with strided slices, so the cost is dominated by numpy.
    """
    dtype = np.int32 if k_max < 2**31 else np.int64
    spf = np.zeros(k_max + 1, dtype=dtype)
    for p in range(2, math.isqrt(k_max) + 1):
        if spf[p] == 0:
            spf[p] = p
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = spf == 0
    rest[:2] = False
    spf[rest] = np.nonzero(rest)[0]
    return spf


def _omega_counts(spf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Strip one smallest prime factor per pass; at most log2(k_max) passes.
    n = spf.size - 1
    rem = np.arange(n + 1, dtype=np.int64)
    little = np.zeros(n + 1, dtype=np.uint8)
    big = np.zeros(n + 1, dtype=np.uint8)
    last = np.zeros(n + 1, dtype=np.int64)
    active = np.nonzero(rem > 1)[0]
    while active.size:
        p = spf[rem[active]].astype(np.int64)
        big[active] += 1
        little[active] += (p != last[active]).astype(np.uint8)
        last[active] = p
        rem[active] //= p
        active = active[rem[active] > 1]
    return little, big


def build_weight_table(k_max: int, kind: WeightKind | str) -> WeightTable:
    """Sieve g(n) for all ``1 <= n <= k_max``.

    Raises
    ------
    ValueError
        If ``k_max`` is not in ``[1, K_LIMIT]``.
    """
    kind = WeightKind.parse(kind)
    if isinstance(k_max, bool) or int(k_max) != k_max or not 1 <= k_max <= K_LIMIT:
        raise ValueError(f"k_max must be an integer in [1, {K_LIMIT}], got {k_max!r}")
    k_max = int(k_max)
    spf = smallest_prime_factors(k_max)
    little, big = _omega_counts(spf)
    values = little if kind is WeightKind.LITTLE_OMEGA else big
    prefix = np.cumsum(values, dtype=np.int64)
    return WeightTable(k_max, kind, values, prefix, spf)


def build_pair(k_max: int) -> tuple[WeightTable, WeightTable]:
    """Both tables from one sieve pass: ``(little_omega, big_omega)``."""
    if not 1 <= k_max <= K_LIMIT:
        raise ValueError(f"k_max must be in [1, {K_LIMIT}], got {k_max!r}")
    spf = smallest_prime_factors(k_max)
    little, big = _omega_counts(spf)
    return (
        WeightTable(k_max, WeightKind.LITTLE_OMEGA, little, np.cumsum(little, dtype=np.int64), spf),
        WeightTable(k_max, WeightKind.BIG_OMEGA, big, np.cumsum(big, dtype=np.int64), spf.copy()),
    )


def mertens_sum(k: int, table: WeightTable) -> float:
    """Sum of 1/p over primes p <= k, accumulated with ``math.fsum``."""
    if k < 1 or k > table.k_max:
        raise IndexError(f"k={k} outside table range [1, {table.k_max}]")
    return math.fsum(1.0 / table.primes(k))


def power_sum(k: int, m: int, table: WeightTable) -> int:
    """Exact ``sum_{n<=k} g(n)**m`` as a Python int."""
    if k < 1 or k > table.k_max:
        raise IndexError(f"k={k} outside table range [1, {table.k_max}]")
    if m < 1:
        raise ValueError("m must be a positive integer")
    counts = np.bincount(table.values[1 : k + 1])
    return sum(int(c) * v**m for v, c in enumerate(counts) if c)


def exp_sum(k: int, base: float, table: WeightTable) -> float:
    """``sum_{n<=k} base**g(n)``.

    Terms are grouped by weight value (an exact integer count times an
    exact power), then combined with ``math.fsum``.
    """
    if not base > 0:
        raise ValueError(f"base must be positive, got {base!r}")
    if k < 1 or k > table.k_max:
        raise IndexError(f"k={k} outside table range [1, {table.k_max}]")
    counts = np.bincount(table.values[1 : k + 1])
    return math.fsum(int(c) * base**v for v, c in enumerate(counts) if c)


def _checksum(prefix: np.ndarray) -> bytes:
    return hashlib.sha256(prefix.astype("<i8").tobytes()).digest()


def dump_table(table: WeightTable, path: str | Path) -> None:
    """Write a table to ``path``.

    Layout: header ``<4sQQQ32s`` (magic, version, kind code, k_max,
    sha256 of the little-endian int64 prefix sums), then ``values[1:]`` as
    uint8, then ``smallest_prime_factor`` as little-endian uint32.
    """
    kind_code = 0 if table.kind is WeightKind.LITTLE_OMEGA else 1
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, kind_code, table.k_max, _checksum(table.prefix)))
        fh.write(table.values[1:].astype(np.uint8).tobytes())
        fh.write(table.smallest_prime_factor.astype("<u4").tobytes())


def load_table(path: str | Path) -> WeightTable:
    """Read a table written by :func:`dump_table`, recomputing and checking prefix sums."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError("truncated weight table header")
        magic, version, kind_code, k_max, digest = _HEADER.unpack(head)
        if magic != _MAGIC or version != _VERSION:
            raise ValueError("not a weight table file (bad magic or version)")
        if kind_code not in (0, 1) or not 1 <= k_max <= K_LIMIT:
            raise ValueError("corrupt weight table header")
        raw = np.frombuffer(fh.read(k_max), dtype=np.uint8)
        spf = np.frombuffer(fh.read(4 * (k_max + 1)), dtype="<u4")
    if raw.size != k_max or spf.size != k_max + 1:
        raise ValueError("truncated weight table body")
    values = np.concatenate([[0], raw]).astype(np.uint8)
    prefix = np.cumsum(values, dtype=np.int64)
    if _checksum(prefix) != digest:
        raise ValueError("weight table checksum mismatch")
    kind = WeightKind.LITTLE_OMEGA if kind_code == 0 else WeightKind.BIG_OMEGA
    spf = spf.astype(np.int32 if k_max < 2**31 else np.int64)
    return WeightTable(k_max, kind, values, prefix, spf)
