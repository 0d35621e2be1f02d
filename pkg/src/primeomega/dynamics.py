"""
Concrete ergodic systems and g-weighted Birkhoff averages along their orbits.

Three systems are provided: an irrational circle rotation, the doubling map
(modelled as a shift on an explicit bit reservoir so it never collapses to
0 in floating point) and a Bernoulli shift on finitely many symbols.

States:

* ``Rotation``: ``x0`` is a float in [0, 1).
* ``Doubling``: ``x0`` is a float in [0, 1) or a string of binary digits.
  A float contributes its 52 leading digits, a string contributes itself;
  either is followed by seeded random bits, so the orbit is that of a
  typical point agreeing with ``x0`` on those digits.
* ``BernoulliShift``: ``x0`` is a nonnegative integer naming the sample;
  the symbol sequence is drawn from ``p`` with seed ``(spec.seed, x0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .maximal import LatticeFunction, level_set_report
from .weights import WeightTable

_MASK64 = (1 << 64) - 1


def _golden_fixed128() -> int:
    # floor(2**128 * (sqrt(5) - 1) / 2)
    return (math.isqrt(5 << 256) - (1 << 128)) >> 1


@dataclass(frozen=True)
class Rotation:
    """``x -> x + alpha mod 1``; alpha is held as a 128-bit binary fraction."""

    alpha: float | None = None
    seed: int = 0
    alpha_fixed: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.alpha is None:
            fixed = _golden_fixed128()
        else:
            if not 0 < self.alpha < 1:
                raise ValueError("alpha must lie in (0, 1)")
            fixed = int(Fraction(self.alpha) * (1 << 128))
        object.__setattr__(self, "alpha_fixed", fixed)

    @property
    def alpha_value(self) -> float:
        return self.alpha_fixed / 2.0**128


@dataclass(frozen=True)
class Doubling:
    """``x -> 2x mod 1`` as a left shift of binary digits."""

    seed: int = 0


@dataclass(frozen=True)
class BernoulliShift:
    """Shift on i.i.d. symbols ``0..len(p)-1`` with probabilities ``p``."""

    p: tuple[float, ...] = (0.5, 0.5)
    seed: int = 0

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) < 2 or min(p) <= 0 or abs(math.fsum(p) - 1) > 1e-12:
            raise ValueError("p must have at least two positive entries summing to 1")
        object.__setattr__(self, "p", p)


SystemSpec = Union[Rotation, Doubling, BernoulliShift]


@dataclass(frozen=True)
class IntervalIndicator:
    """Indicator of ``[a, b)`` inside [0, 1)."""

    a: float
    b: float

    def __post_init__(self):
        if not 0 <= self.a <= self.b <= 1:
            raise ValueError("need 0 <= a <= b <= 1")


@dataclass(frozen=True)
class Exponential:
    """``cos(2 pi k x)``, the real part of the character with frequency k."""

    frequency: int


@dataclass(frozen=True)
class CylinderIndicator:
    """Indicator that the next ``len(word)`` symbols (or bits) spell ``word``."""

    word: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(s) for s in self.word))
        if not self.word:
            raise ValueError("empty cylinder word")


@dataclass(frozen=True)
class LinearCombination:
    """``sum c_i f_i`` over ``(c_i, f_i)`` terms."""

    terms: tuple


Observable = Union[IntervalIndicator, Exponential, CylinderIndicator, LinearCombination]


def known_mean(spec: SystemSpec, obs: Observable) -> float:
    """Exact space average of ``obs`` for the invariant measure of ``spec``."""
    if isinstance(obs, LinearCombination):
        return math.fsum(c * known_mean(spec, f) for c, f in obs.terms)
    if isinstance(spec, BernoulliShift):
        if not isinstance(obs, CylinderIndicator):
            raise ValueError("Bernoulli shift observables are cylinder indicators")
        if max(obs.word) >= len(spec.p) or min(obs.word) < 0:
            raise ValueError("cylinder word uses a symbol outside the alphabet")
        return math.prod(spec.p[s] for s in obs.word)
    if isinstance(obs, IntervalIndicator):
        return obs.b - obs.a
    if isinstance(obs, Exponential):
        return 1.0 if obs.frequency == 0 else 0.0
    if isinstance(obs, CylinderIndicator):
        if isinstance(spec, Rotation):
            raise ValueError("cylinder observables need a symbolic system")
        if set(obs.word) - {0, 1}:
            raise ValueError("doubling-map cylinders are binary words")
        return 2.0 ** -len(obs.word)
    raise TypeError(f"unsupported observable {obs!r}")


def _rotation_points(spec: Rotation, x0: float, n_max: int) -> np.ndarray:
    """``frac(x0 + n alpha)`` for ``n = 1..n_max`` in 128-bit fixed point."""
    if not 0 <= x0 < 1:
        raise ValueError("x0 must lie in [0, 1)")
    if n_max >= 2**32:
        raise ValueError("n_max must be below 2**32")
    X = int(Fraction(x0) * (1 << 128))
    a_hi, a_lo = spec.alpha_fixed >> 64, spec.alpha_fixed & _MASK64
    x_hi, x_lo = np.uint64(X >> 64), np.uint64(X & _MASK64)
    n = np.arange(1, n_max + 1, dtype=np.uint64)
    lo0, lo1 = np.uint64(a_lo & 0xFFFFFFFF), np.uint64(a_lo >> 32)
    with np.errstate(over="ignore"):
        # n * a_lo as a 128-bit (carry, low) pair; n < 2**32 keeps partial products in 64 bits.
        p1 = n * lo1
        shifted = p1 << np.uint64(32)
        low = shifted + n * lo0
        carry = (p1 >> np.uint64(32)) + (low < shifted).astype(np.uint64)
        frac_lo = low + x_lo
        carry += (frac_lo < low).astype(np.uint64)
        frac_hi = n * np.uint64(a_hi) + carry + x_hi
    return (frac_hi >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _bit_reservoir(spec: Doubling, x0, length: int) -> np.ndarray:
    if isinstance(x0, str):
        if not x0 or set(x0) - {"0", "1"}:
            raise ValueError("a bit-string state must consist of 0 and 1")
        head = np.frombuffer(x0.encode(), dtype=np.uint8) - ord("0")
        key = int(x0, 2) + (1 << len(x0))
    else:
        if not 0 <= x0 < 1:
            raise ValueError("x0 must lie in [0, 1)")
        lead = int(Fraction(x0) * (1 << 52))
        head = np.array([(lead >> (51 - i)) & 1 for i in range(52)], dtype=np.uint8)
        key = int(Fraction(x0) * (1 << 64))
    rng = np.random.default_rng([spec.seed, key])
    tail = rng.integers(0, 2, size=max(length - head.size, 0), dtype=np.uint8)
    bits = np.concatenate([head, tail])[:length]
    assert bits.size >= length, "bit reservoir shorter than requested"
    return bits


def _doubling_points(bits: np.ndarray, n_max: int) -> np.ndarray:
    # T^n x = 0.b_{n+1} b_{n+2} ... truncated to 53 bits.
    windows = np.lib.stride_tricks.sliding_window_view(bits[1:], 53)[:n_max]
    return windows @ (2.0 ** -np.arange(1, 54))


def _symbols(spec: BernoulliShift, x0: int, length: int) -> np.ndarray:
    if isinstance(x0, float) and not x0.is_integer() or int(x0) < 0:
        raise ValueError("Bernoulli starting points are nonnegative sample indices")
    rng = np.random.default_rng([spec.seed, int(x0)])
    return rng.choice(len(spec.p), size=length, p=np.array(spec.p))


def _cylinder_hits(seq: np.ndarray, word: tuple[int, ...], n_max: int) -> np.ndarray:
    # seq[i] is coordinate i of x; T^n x starts at coordinate n.
    hit = np.ones(n_max, dtype=bool)
    for i, s in enumerate(word):
        hit &= seq[1 + i : 1 + i + n_max] == s
    return hit.astype(np.float64)


def _evaluate(spec, obs, x0, n_max, cache) -> np.ndarray:
    if isinstance(obs, LinearCombination):
        out = np.zeros(n_max)
        for c, f in obs.terms:
            out += c * _evaluate(spec, f, x0, n_max, cache)
        return out
    known_mean(spec, obs)  # validates the pairing
    if isinstance(spec, Rotation):
        if "pts" not in cache:
            cache["pts"] = _rotation_points(spec, x0, n_max)
        pts = cache["pts"]
    elif isinstance(spec, Doubling):
        if "bits" not in cache:
            cache["bits"] = _bit_reservoir(spec, x0, n_max + 64)
        if isinstance(obs, CylinderIndicator):
            return _cylinder_hits(cache["bits"], obs.word, n_max)
        if "pts" not in cache:
            cache["pts"] = _doubling_points(cache["bits"], n_max)
        pts = cache["pts"]
    else:
        if "sym" not in cache:
            cache["sym"] = _symbols(spec, x0, n_max + len(obs.word) + 1)
        return _cylinder_hits(cache["sym"], obs.word, n_max)
    if isinstance(obs, IntervalIndicator):
        return ((pts >= obs.a) & (pts < obs.b)).astype(np.float64)
    return np.cos(2 * np.pi * obs.frequency * pts)


def orbit_values(spec: SystemSpec, obs: Observable, x0, n_max: int) -> np.ndarray:
    """``f(T**n x0)`` for ``n = 1..n_max`` (entry ``n - 1``)."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    return _evaluate(spec, obs, x0, int(n_max), {})


def weighted_mean(values: np.ndarray, table: WeightTable) -> float:
    """``(1/S_{g,K}) sum_{n<=K} g(n) values[n-1]`` with ``K = len(values)``."""
    K = len(values)
    if K < 2:
        raise ValueError("K must be at least 2")
    if K > table.k_max:
        raise IndexError(f"K={K} exceeds table bound {table.k_max}")
    # Centering on values[0] returns constants exactly.
    base = float(values[0])
    return base + float(np.dot(table.values[1 : K + 1].astype(np.float64), values - base)) / table.S(K)


def weighted_birkhoff(spec: SystemSpec, obs: Observable, x0, K: int, table: WeightTable) -> float:
    """The g-weighted Birkhoff average of ``obs`` at ``x0`` over ``n = 1..K``."""
    if K < 2 or K > table.k_max:
        raise ValueError(f"K must lie in [2, {table.k_max}]")
    return weighted_mean(orbit_values(spec, obs, x0, K), table)


@dataclass(frozen=True)
class ConvergenceSeries:
    """Absolute errors of weighted and plain averages against the space mean."""

    x0: object
    checkpoints: tuple[int, ...]
    weighted: tuple[float, ...]
    unweighted: tuple[float, ...]
    mean: float


def convergence_report(spec: SystemSpec, obs: Observable, x0, checkpoints: Sequence[int], table: WeightTable) -> ConvergenceSeries:
    """Errors ``|A_{g,K} f(x0) - mean|`` and the same for the plain average, per checkpoint."""
    cps = tuple(int(K) for K in checkpoints)
    if not cps or any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be nonempty and strictly increasing")
    if cps[0] < 2 or cps[-1] > table.k_max:
        raise ValueError(f"checkpoints must lie in [2, {table.k_max}]")
    mean = known_mean(spec, obs)
    vals = orbit_values(spec, obs, x0, cps[-1])
    wsum = np.cumsum(table.values[1 : cps[-1] + 1] * vals)
    usum = np.cumsum(vals)
    idx = np.array(cps) - 1
    weighted = np.abs(wsum[idx] / table.prefix[np.array(cps)] - mean)
    unweighted = np.abs(usum[idx] / np.array(cps) - mean)
    return ConvergenceSeries(x0, cps, tuple(map(float, weighted)), tuple(map(float, unweighted)), mean)


def starting_points(spec: SystemSpec, count: int = 64, seed: int = 2024) -> list:
    """Fixed sample of starting points standing in for "almost every x"."""
    if isinstance(spec, BernoulliShift):
        return list(range(count))
    rng = np.random.default_rng(seed)
    return [float(x) for x in rng.random(count)]


def transfer_to_lattice(spec: SystemSpec, obs: Observable, x0, n_max: int) -> LatticeFunction:
    """The orbit sequence ``f(T**n x0)``, ``n = 1..n_max``, as a lattice function at offset 1."""
    vals = orbit_values(spec, obs, x0, n_max)
    if vals.size and vals.min() < 0:
        raise ValueError("observable takes negative values; split it into positive and negative parts")
    return LatticeFunction(1, vals)


def measure_maximal_ratio(
    spec: SystemSpec, obs: Observable, lam: float, table: WeightTable, k_max: int, starts: Sequence
) -> float:
    """Monte Carlo ``lam * mu{sup_{2<=K<=k_max} A_K f > lam} / |f|_1`` over ``starts``."""
    hits = 0
    S = table.prefix[2 : k_max + 1]
    for x0 in starts:
        vals = orbit_values(spec, obs, x0, k_max)
        num = np.cumsum(table.values[1 : k_max + 1] * vals)[1:]
        hits += bool(np.any(num > lam * S))
    return lam * hits / len(starts) / known_mean(spec, obs)


def lattice_maximal_ratio(spec: SystemSpec, obs: Observable, lam: float, table: WeightTable, n_max: int, x0) -> float:
    """Weak-type ratio of the orbit sequence viewed as a lattice function."""
    return level_set_report(transfer_to_lattice(spec, obs, x0, n_max), lam, table, "full").ratio


def make_system(name: str, alpha: float | None = None, p: Sequence[float] | None = None, seed: int = 0) -> SystemSpec:
    """System from its name: ``rotation``, ``doubling`` or ``bernoulli``."""
    if name == "rotation":
        return Rotation(alpha, seed)
    if name == "doubling":
        return Doubling(seed)
    if name == "bernoulli":
        return BernoulliShift(tuple(p) if p is not None else (0.5, 0.5), seed)
    raise ValueError(f"unknown system {name!r}")


def parse_observable(text: str) -> Observable:
    """``interval:<a>:<b>``, ``exp:<k>``, ``cylinder:<symbols>`` (e.g. ``cylinder:101``) or ``const``."""
    parts = text.split(":")
    try:
        if parts[0] == "interval" and len(parts) == 3:
            return IntervalIndicator(float(parts[1]), float(parts[2]))
        if parts[0] == "exp" and len(parts) == 2:
            return Exponential(int(parts[1]))
        if parts[0] == "cylinder" and len(parts) == 2 and parts[1].isdigit():
            return CylinderIndicator(tuple(int(c) for c in parts[1]))
        if text == "const":
            return Exponential(0)
    except ValueError as exc:
        raise ValueError(f"bad observable {text!r}: {exc}") from None
    raise ValueError(f"bad observable {text!r}")


def convergence_sweep(
    spec: SystemSpec, obs: Observable, checkpoints: Sequence[int], table: WeightTable, count: int = 64, seed: int = 2024
) -> list[ConvergenceSeries]:
    """:func:`convergence_report` at each of ``starting_points(spec, count, seed)``, in order."""
    return [convergence_report(spec, obs, x0, checkpoints, table) for x0 in starting_points(spec, count, seed)]
