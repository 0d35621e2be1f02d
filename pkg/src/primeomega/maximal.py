"""
Weighted averages and maximal functions on the integer lattice.

For a finitely supported ``phi: Z -> [0, inf)`` the operator

    M_K phi(j) = (1 / S_{g,K}) * sum_{n=1}^{K} g(n) phi(j + n)

is evaluated pointwise, and its suprema over all ``K >= 2`` (full) or over
``K = 2**l``, ``l >= 1`` (dyadic) are evaluated on whole windows of j at once.
K = 1 is excluded because ``S_{g,1} = 0``.

The module also carries the pieces of the covering argument for the
dyadic weak-type bound: bounded-overlap interval selection, the
heavy/light block split, the localized moment inequality and a
certificate that recomputes the three-part bound for a given ``phi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .asymptotics import dyadic_comparability, dyadic_level, nu as loglog_floor
from .weights import WeightTable

#: Relative slack for comparisons between two floating evaluations of the same quantity.
FLOAT_RTOL = 1e-12


# --------------------------------------------------------------------------
# lattice functions


@dataclass(frozen=True, eq=False)
class LatticeFunction:
    """Nonnegative ``phi`` with ``phi(offset + i) = mass[i]`` and zero elsewhere."""

    offset: int
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=np.float64).ravel()
        if mass.size and (not np.all(np.isfinite(mass)) or mass.min() < 0):
            raise ValueError("lattice function values must be finite and nonnegative")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def delta(cls, position: int, weight: float = 1.0) -> "LatticeFunction":
        return cls(position, [weight])

    @classmethod
    def indicator(cls, start: int, length: int, height: float = 1.0) -> "LatticeFunction":
        return cls(start, np.full(length, float(height)))

    @classmethod
    def from_points(cls, points: dict[int, float]) -> "LatticeFunction":
        if not points:
            return cls(0, [])
        lo, hi = min(points), max(points)
        mass = np.zeros(hi - lo + 1)
        for k, v in points.items():
            mass[k - lo] = v
        return cls(lo, mass)

    @property
    def l1(self) -> float:
        return math.fsum(self.mass)

    @property
    def sup_norm(self) -> float:
        return float(self.mass.max()) if self.mass.size else 0.0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.mass)

    def support_bounds(self) -> tuple[int, int]:
        """Smallest and largest j with ``phi(j) > 0``."""
        nz = np.flatnonzero(self.mass)
        if not nz.size:
            raise ValueError("zero function has empty support")
        return self.offset + int(nz[0]), self.offset + int(nz[-1])

    def __call__(self, j: int) -> float:
        i = j - self.offset
        return float(self.mass[i]) if 0 <= i < self.mass.size else 0.0

    def values(self, lo: int, hi: int) -> np.ndarray:
        """``phi(lo), ..., phi(hi)`` as an array (zeros outside the stored range)."""
        out = np.zeros(max(hi - lo + 1, 0))
        a, b = max(lo, self.offset), min(hi, self.offset + self.mass.size - 1)
        if a <= b:
            out[a - lo : b - lo + 1] = self.mass[a - self.offset : b - self.offset + 1]
        return out

    def window_sum(self, lo: int, hi: int) -> float:
        """Sum of phi over ``lo..hi`` inclusive."""
        return math.fsum(self.values(lo, hi))

    def runs(self) -> list[tuple[int, int, float]]:
        """Maximal runs ``(first, last, height)`` of equal positive values."""
        m = self.mass
        if not m.size:
            return []
        breaks = np.flatnonzero(np.diff(m)) + 1
        starts = np.concatenate([[0], breaks])
        ends = np.concatenate([breaks - 1, [m.size - 1]])
        return [
            (self.offset + int(s), self.offset + int(e), float(m[s]))
            for s, e in zip(starts, ends)
            if m[s] > 0
        ]

    def shifted(self, t: int) -> "LatticeFunction":
        return LatticeFunction(self.offset + t, self.mass)

    def scaled(self, c: float) -> "LatticeFunction":
        if c < 0:
            raise ValueError("scale must be nonnegative")
        return LatticeFunction(self.offset, self.mass * c)

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        if not self.mass.size:
            return other
        if not other.mass.size:
            return self
        lo = min(self.offset, other.offset)
        hi = max(self.offset + self.mass.size, other.offset + other.mass.size) - 1
        return LatticeFunction(lo, self.values(lo, hi) + other.values(lo, hi))


def corpus_member(spec: str, length: int = 1024, start: int = 1) -> LatticeFunction:
    """Build a test function from a short spec string.

    ``delta[:h]``
        mass ``h`` (default 1) at ``start``.
    ``indicator:<len>[:h]``
        height ``h`` on ``len`` points from ``start``.
    ``random:<density>:<seed>``
        on ``length`` points from ``start``, each point is occupied with
        probability ``density`` and carries an integer mass uniform on
        ``1 .. round(2/density) - 1`` (mean about ``1/density``).
    """
    parts = spec.split(":")
    name = parts[0]
    try:
        if name == "delta" and len(parts) <= 2:
            h = float(parts[1]) if len(parts) == 2 else 1.0
            return LatticeFunction.delta(start, h)
        if name == "indicator" and len(parts) in (2, 3):
            h = float(parts[2]) if len(parts) == 3 else 1.0
            return LatticeFunction.indicator(start, int(parts[1]), h)
        if name == "random" and len(parts) == 3:
            density, seed = float(parts[1]), int(parts[2])
            if not 0 < density <= 1:
                raise ValueError("density must be in (0, 1]")
            rng = np.random.default_rng(seed)
            occupied = rng.random(length) < density
            top = max(2, round(2 / density))
            mass = np.where(occupied, rng.integers(1, top, size=length), 0).astype(float)
            return LatticeFunction(start, mass)
    except ValueError as exc:
        raise ValueError(f"bad corpus spec {spec!r}: {exc}") from None
    raise ValueError(f"bad corpus spec {spec!r}")


# --------------------------------------------------------------------------
# pointwise operators


def _check_scale(K: int, table: WeightTable) -> None:
    if K < 2:
        raise ValueError(f"M_K is undefined for K={K}: S_(g,1) = 0")
    if K > table.k_max:
        raise IndexError(f"K={K} exceeds table bound {table.k_max}")


def weighted_average(phi: LatticeFunction, j: int, K: int, table: WeightTable) -> float:
    """``M_{g,K} phi(j)``."""
    _check_scale(K, table)
    window = phi.values(j + 1, j + K)
    return float(np.dot(table.values[1 : K + 1].astype(np.float64), window)) / table.S(K)


def sup_maximal(phi: LatticeFunction, j: int, table: WeightTable) -> float:
    """``sup_{K >= 2} M_{g,K} phi(j)``.

    Beyond ``K_cut = max(supp) - j`` the numerator is frozen while
    ``S_{g,K}`` grows, so scanning ``2 <= K <= K_cut`` is exact.
    """
    if phi.is_zero:
        return 0.0
    _, hi = phi.support_bounds()
    k_cut = hi - j
    if k_cut < 2:
        return 0.0
    _check_scale(k_cut, table)
    num = np.cumsum(table.values[1 : k_cut + 1] * phi.values(j + 1, j + k_cut))
    return float(np.max(num[1:] / table.prefix[2 : k_cut + 1]))


def dyadic_maximal(phi: LatticeFunction, j: int, table: WeightTable, l_max: int | None = None) -> float:
    """``max_{1 <= l <= l_max} M_{g,2**l} phi(j)``.

    The default ``l_max`` is the first l with ``2**l >= K_cut``; larger l
    only divide a frozen numerator by a larger normalizer.
    """
    if phi.is_zero:
        return 0.0
    if l_max is None:
        _, hi = phi.support_bounds()
        l_max = max(1, dyadic_level(max(hi - j, 2)))
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    if 2**l_max > table.k_max:
        raise IndexError(f"2**{l_max} exceeds table bound {table.k_max}")
    return max(weighted_average(phi, j, 2**l, table) for l in range(1, l_max + 1))


# --------------------------------------------------------------------------
# window profiles


@dataclass(frozen=True, eq=False)
class MaximalProfile:
    """Full and dyadic maximal functions on ``j_lo .. j_lo + len - 1``."""

    j_lo: int
    full: np.ndarray
    dyadic: np.ndarray
    l_max: int
    scales: dict = field(default_factory=dict)

    @property
    def positions(self) -> np.ndarray:
        return self.j_lo + np.arange(self.full.size)

    def at(self, j: int, mode: str = "full") -> float:
        arr = self.full if mode == "full" else self.dyadic
        i = j - self.j_lo
        return float(arr[i]) if 0 <= i < arr.size else 0.0


def maximal_profile(
    phi: LatticeFunction,
    table: WeightTable,
    j_lo: int | None = None,
    j_hi: int | None = None,
    keep_scales: bool = False,
) -> MaximalProfile:
    """Evaluate both maximal functions at every ``j_lo <= j <= j_hi``.

    ``phi`` is processed run by run. On a run of constant height h the
    average at K is ``h + c / S_K`` for a constant c, hence monotone, so
    the run's first and last points are the only candidates for the full
    supremum. Dyadic numerators are read off the same accumulator once no
    later run can reach the window ``j+1 .. j+2**l``.

    With ``keep_scales`` the per-scale arrays ``M_{2**l} phi`` are kept in
    ``scales[l]``.
    """
    lo, hi = phi.support_bounds()
    j_lo = lo - 1 if j_lo is None else int(j_lo)
    j_hi = hi - 2 if j_hi is None else int(j_hi)
    W = max(j_hi - j_lo + 1, 0)
    k_reach = hi - j_lo
    l_max = max(1, dyadic_level(max(k_reach, 2)))
    if 2**l_max > table.k_max:
        raise IndexError(f"window needs scales up to 2**{l_max} > table bound {table.k_max}")

    S = table.prefix.astype(np.float64)
    J = j_lo + np.arange(W)
    N = np.zeros(W)
    full = np.zeros(W)
    dyad = np.zeros(W)
    scales = {l: np.zeros(W) for l in range(1, l_max + 1)} if keep_scales else {}
    done = dict.fromkeys(range(1, l_max + 1), 0)
    runs = phi.runs()

    def finalize(l, upto, prev_run):
        # Fix N_{2**l}(j) for j < upto; prev_run may overshoot the window.
        a = done[l]
        b = min(max(upto - j_lo, a), W)
        if b <= a:
            return
        L = 2**l
        vals = N[a:b].copy()
        if prev_run is not None:
            _, e, h = prev_run
            over = e - J[a:b]
            mask = over > L
            if np.any(mask):
                vals[mask] -= h * (S[over[mask]] - S[L])
        m = vals / S[L]
        np.maximum(dyad[a:b], m, out=dyad[a:b])
        if keep_scales:
            scales[l][a:b] = m
        done[l] = b

    prev = None
    for run in runs:
        a, e, h = run
        for l in done:
            finalize(l, a - 2**l, prev)
        n = min(e - 1 - j_lo, W)  # j <= e - 2
        if n > 0:
            Jr = J[:n]
            kA = a - Jr
            base = S[np.maximum(kA - 1, 0)]
            K1 = np.maximum(kA, 2)
            K2 = e - Jr
            first = (N[:n] + h * (S[K1] - base)) / S[K1]
            N[:n] += h * (S[K2] - base)
            last = N[:n] / S[K2]
            np.maximum(full[:n], np.maximum(first, last), out=full[:n])
        prev = run
    for l in done:
        finalize(l, j_hi + 1, prev)
    return MaximalProfile(j_lo, full, dyad, l_max, scales)


def left_reach(phi: LatticeFunction, lam: float, table: WeightTable) -> int:
    """Smallest D >= 0 such that both maximal functions are ``<= lam`` at
    every ``j < min(supp) - D``.

    At distance ``d = min(supp) - j`` only ``n >= d`` contributes, giving
    three bounds on ``M_K phi(j)``, each nonincreasing in d:

    * ``|phi|_inf * min(S_K - S_{d-1}, U(d)) / S_K``, with ``U(d)`` the
      largest sum of g over a window of the support's length starting at
      or beyond d;
    * ``max_{n<=K} g(n) * Phi(K - d) / S_K``, with ``Phi(t)`` the mass of
      phi within t of its leftmost point;
    * past the table, ``log2 K * |phi|_1 / (S_kmax + K - k_max)``.

    Raises
    ------
    ValueError
        If the table is too short to certify the bound.
    """
    lo, hi = phi.support_bounds()
    span = hi - lo
    kmax = table.k_max
    gap0 = kmax - span
    if gap0 < 2:
        raise ValueError("weight table shorter than the support")
    S = table.prefix.astype(np.float64)
    G = table.running_max().astype(np.float64)
    linf, l1 = phi.sup_norm, phi.l1
    cum = np.cumsum(phi.values(lo, hi))

    tail_c = math.log2(kmax + 1) * l1 / (S[kmax] + 1)
    # Gaps >= gap0: only the mass bound is available.
    far = np.max(G[gap0:] * l1 / S[gap0:]) if gap0 <= kmax else 0.0
    if min(linf, max(far, tail_c)) > lam:
        raise ValueError(f"weight table bound {kmax} too short for lambda={lam} and |phi|_1={l1}")

    win = S[span + 1 : kmax + 1] - S[: kmax - span]  # win[d-1] = S_{d+span} - S_{d-1}
    U = np.maximum.accumulate(win[: gap0 - 1][::-1])[::-1]  # U[d-1] for 1 <= d < gap0
    # Past k_stop the mass bound alone is <= lam for every K.
    mass_bound = G[2:] * l1 / S[2:]
    over = np.flatnonzero(mass_bound > lam)
    k_stop = int(over[-1]) + 3 if over.size else 2

    def bound(d: int) -> float:
        K = np.arange(max(d, 2), min(k_stop, kmax + 1))
        a = linf * np.minimum(S[K] - S[d - 1], U[d - 1]) / S[K]
        c = G[K] * cum[np.minimum(K - d, span)] / S[K]
        inside = float(np.max(np.minimum(a, c))) if K.size else 0.0
        tail = min(linf * U[d - 1] / S[kmax], tail_c)
        return max(inside, tail)

    if bound(1) <= lam:
        return 0
    if bound(gap0 - 1) > lam:
        raise ValueError(f"weight table bound {kmax} too short for lambda={lam}")
    lo_d, hi_d = 1, gap0 - 1  # bound(lo_d) > lam >= bound(hi_d)
    while hi_d - lo_d > 1:
        mid = (lo_d + hi_d) // 2
        if bound(mid) > lam:
            lo_d = mid
        else:
            hi_d = mid
    return lo_d


# --------------------------------------------------------------------------
# level sets


@dataclass(frozen=True)
class MaximalReport:
    """Level-set count of a maximal function and the weak-type ratio ``lam * count / |phi|_1``."""

    lam: float
    level_count: int
    l1_mass: float
    ratio: float
    mode: str
    window: tuple[int, int]
    support: tuple[int, int]

    @property
    def scale(self) -> int:
        return self.support[1] - self.support[0] + 1


def level_set_report(phi: LatticeFunction, lam: float, table: WeightTable, mode: str = "full") -> MaximalReport:
    """Count ``j`` with maximal function ``> lam``.

    Points left of ``min(supp) - left_reach`` and right of ``max(supp) - 2``
    are certified to lie below ``lam`` and are not evaluated.
    """
    if mode not in ("full", "dyadic"):
        raise ValueError("mode must be 'full' or 'dyadic'")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    l1 = phi.l1
    if l1 == 0:
        raise ValueError("degenerate input: |phi|_1 = 0")
    lo, hi = phi.support_bounds()
    d = left_reach(phi, lam, table)
    j_lo, j_hi = lo - d, hi - 2
    if j_hi < j_lo:
        count = 0
    else:
        prof = maximal_profile(phi, table, j_lo, j_hi)
        arr = prof.full if mode == "full" else prof.dyadic
        count = int(np.count_nonzero(arr > lam))
    return MaximalReport(float(lam), count, l1, lam * count / l1, mode, (j_lo, j_hi), (lo, hi))


# --------------------------------------------------------------------------
# localized moment inequality


class MomentCheck(NamedTuple):
    lhs: float
    window_mass: float
    nu: int
    constant: float


def _scale_averages(phi: LatticeFunction, k: int, K: int, table: WeightTable) -> tuple[np.ndarray, np.ndarray]:
    """``M_K phi(k + j)`` for ``j = 1..K`` and the values ``phi(k+2..k+2K)``."""
    from scipy.signal import correlate

    w = phi.values(k + 2, k + 2 * K)
    kernel = table.values[1 : K + 1].astype(np.float64)
    num = np.clip(correlate(w, kernel, mode="valid"), 0.0, None)
    return num / table.S(K), w


def localized_moment_check(phi: LatticeFunction, k_anchor: int, K: int, table: WeightTable) -> MomentCheck:
    """Left side and smallest admissible constant in the localized moment inequality.

    ``lhs = sum_{j=1}^{K} (M_K phi(k+j))**nu`` with ``nu = floor(log log K)``,
    and ``constant`` is the least ``c`` with
    ``lhs <= W * (c W / K)**(nu - 1)``, ``W = sum_{j=2}^{2K} phi(k+j)``.
    For ``nu = 1`` the inequality is ``lhs <= W`` (mass preservation) and
    the constant is reported as 0.
    """
    if K < 16:
        raise ValueError("the localized moment inequality needs K >= 16")
    _check_scale(K, table)
    v = loglog_floor(K)
    avg, w = _scale_averages(phi, k_anchor, K, table)
    lhs = math.fsum(avg**v)
    W = math.fsum(w)
    if W == 0:
        if lhs != 0:
            raise AssertionError("nonzero averages from a zero window")
        return MomentCheck(0.0, 0.0, v, 0.0)
    if v == 1:
        if lhs > W * (1 + 1e-9):
            raise AssertionError(f"mass preservation violated: {lhs} > {W}")
        return MomentCheck(lhs, W, v, 0.0)
    return MomentCheck(lhs, W, v, K / W * (lhs / W) ** (1.0 / (v - 1)))


def moment_constant_bound(K: int, table: WeightTable) -> float:
    """Supremum over all ``phi`` of the constant from :func:`localized_moment_check`.

    The left side is a form of degree nu with nonnegative coefficients, so
    its ratio to ``W**nu`` peaks at a point mass; the worst point mass sits
    where every window sees it, giving ``sum_{n<=K} g(n)**nu / S_K**nu``.
    """
    from .weights import power_sum

    _check_scale(K, table)
    v = loglog_floor(K)
    if v < 2:
        return 0.0
    ratio = power_sum(K, v, table) / table.S(K) ** v
    return K * ratio ** (1.0 / (v - 1))


def fit_moment_constant(
    table: WeightTable,
    corpus: Iterable[str] = ("delta", "indicator:64", "random:0.1:0", "random:0.5:1"),
    scales: Sequence[int] = tuple(2**s for s in range(6, 15)),
) -> tuple[float, list[tuple[str, int, float]]]:
    """Largest constant from :func:`localized_moment_check` over a corpus.

    Each corpus member is placed on ``[1, 2K]`` with anchor 0; a delta is
    placed at ``K + 1``, where every window sees it. Returns the max and the
    per-case rows.
    """
    rows = []
    for spec in corpus:
        for K in scales:
            if spec.startswith("delta"):
                phi = corpus_member(spec, start=K + 1)
            else:
                phi = corpus_member(spec, length=2 * K, start=1)
            rows.append((spec, K, localized_moment_check(phi, 0, K, table).constant))
    return max(r[2] for r in rows), rows


# --------------------------------------------------------------------------
# interval covering


class IntervalFamily(tuple):
    """A finite family of nonempty integer intervals ``(a, b)``, ``a <= b``, both ends included."""

    def __new__(cls, intervals: Iterable[Sequence[int]] = ()):
        items = []
        for iv in intervals:
            a, b = int(iv[0]), int(iv[1])
            if a > b:
                raise ValueError(f"empty interval [{a}, {b}]")
            items.append((a, b))
        return super().__new__(cls, items)

    def cover_counts(self) -> tuple[int, np.ndarray]:
        """``(lo, counts)`` with ``counts[i]`` the multiplicity at ``lo + i``."""
        if not self:
            return 0, np.zeros(0, dtype=np.int64)
        lo = min(a for a, _ in self)
        hi = max(b for _, b in self)
        diff = np.zeros(hi - lo + 2, dtype=np.int64)
        for a, b in self:
            diff[a - lo] += 1
            diff[b - lo + 1] -= 1
        return lo, np.cumsum(diff)[:-1]

    def union_points(self) -> set[int]:
        lo, counts = self.cover_counts()
        return {lo + int(i) for i in np.flatnonzero(counts)}

    def union_size(self) -> int:
        return int(np.count_nonzero(self.cover_counts()[1]))

    def max_overlap(self) -> int:
        counts = self.cover_counts()[1]
        return int(counts.max()) if counts.size else 0


def select_bounded_overlap(family: Iterable[Sequence[int]]) -> IntervalFamily:
    """Subfamily with the same union in which no point lies in more than two intervals.

    Greedy: from the first uncovered point p, keep the interval that starts
    at or before p and reaches farthest. If three kept intervals shared a
    point, the third would have been available when the second was chosen
    and reaches farther, a contradiction.
    """
    ivs = sorted(IntervalFamily(family))
    out = []
    i, n = 0, len(ivs)
    reach = None
    while True:
        while i < n and reach is not None and ivs[i][1] <= reach:
            i += 1
        if i >= n:
            break
        p = ivs[i][0] if reach is None or ivs[i][0] > reach else reach + 1
        best = None
        while i < n and ivs[i][0] <= p:
            if best is None or ivs[i][1] > best[1]:
                best = ivs[i]
            i += 1
        out.append(best)
        reach = best[1]
    return IntervalFamily(out)


# --------------------------------------------------------------------------
# heavy/light blocks and the three-part certificate


#: Threshold denominator in the heavy-block test: mean over a doubled block above 1 / (100 C).
HEAVY_FACTOR = 100.0


class BlockClassification(NamedTuple):
    l: int
    plus: list
    minus: list
    threshold: float


def _block_range(phi: LatticeFunction, l: int) -> range:
    # Blocks (r 2^l, (r+1) 2^l] meeting {j : M_l phi(j) > 0} or whose doubled window meets supp.
    lo, hi = phi.support_bounds()
    L = 2**l
    return range((lo - L - 1) // L - 1, (hi - 1) // L + 1)


def classify_blocks(phi: LatticeFunction, l: int, table: WeightTable, c_gmax: float) -> BlockClassification:
    """Split dyadic blocks ``(r 2**l, (r+1) 2**l]`` by the mean of phi over ``r 2**l + 1 .. r 2**l + 2**(l+1)``.

    Heavy (``plus``) when that mean exceeds ``1 / (100 c_gmax)``. Only
    blocks near the support are listed; all others are light with
    ``M_l phi = 0`` on them.
    """
    if l <= 4:
        raise ValueError("block classification is for l > 4")
    if not c_gmax > 0:
        raise ValueError("c_gmax must be positive")
    L = 2**l
    threshold = 1.0 / (HEAVY_FACTOR * c_gmax)
    plus, minus = [], []
    if phi.is_zero:
        return BlockClassification(l, plus, minus, threshold)
    for r in _block_range(phi, l):
        mean = phi.window_sum(r * L + 1, r * L + 2 * L) / L
        (plus if mean > threshold else minus).append(r)
    return BlockClassification(l, plus, minus, threshold)


@dataclass
class ClaimCertificate:
    """Direct dyadic level-set count at height 1 next to the three-part bound.

    ``small_scale`` covers scales ``l <= 4`` by bounded-overlap covers of
    ``[j+1, j+2**l]``; ``light`` sums the moments of ``M_l phi`` over light
    blocks; ``heavy`` is the union size of the doubled heavy blocks.
    ``violations`` lists every intermediate inequality that failed.
    """

    direct_count: int
    small_scale: int
    light: float
    heavy: int
    l1: float
    c_gmax: float
    l_top: int
    per_scale: dict
    violations: list

    @property
    def bound(self) -> float:
        return self.small_scale + self.light + self.heavy

    @property
    def constant_form(self) -> float:
        """The closed-form constant times ``|phi|_1``."""
        return (128 + 12 * 100**2 * math.pi**2 / 6 + 800 * self.c_gmax) * self.l1

    @property
    def holds(self) -> bool:
        return self.direct_count <= self.bound and not self.violations


def _top_scale(phi: LatticeFunction, table: WeightTable) -> int:
    # Largest l whose averages can exceed 1 anywhere: M_l phi <= min(|phi|_inf, G(2^l) |phi|_1 / S_{2^l}).
    linf, l1 = phi.sup_norm, phi.l1
    if linf <= 1:
        return 0
    G = table.running_max()
    l_table = table.k_max.bit_length() - 1
    l_top = 0
    for l in range(1, l_table + 1):
        if G[2**l] * l1 / table.S(2**l) > 1:
            l_top = l
    kmax = table.k_max
    if math.log2(kmax + 1) * l1 / (table.S(kmax) + 1) > 1:
        raise ValueError(f"weight table bound {kmax} too short for |phi|_1={l1}")
    if l_top == l_table:
        raise ValueError("weight table too short: averages may exceed 1 at its largest dyadic scale")
    return l_top


#: Factor applied to the fitted moment constant before it enters the block test.
SAFETY_FACTOR = 2.0


def claim_certificate(phi: LatticeFunction, table: WeightTable, c_gmax: float | None = None) -> ClaimCertificate:
    """Recompute the covering proof of the dyadic weak-type bound for one ``phi`` at height 1.

    ``c_gmax`` defaults to :data:`SAFETY_FACTOR` times the constant from
    :func:`fit_moment_constant` on ``table``.
    """
    if phi.is_zero:
        raise ValueError("degenerate input: |phi|_1 = 0")
    if c_gmax is None:
        c_gmax = SAFETY_FACTOR * fit_moment_constant(table)[0]
    lo, hi = phi.support_bounds()
    l1 = phi.l1
    l_top = _top_scale(phi, table)
    violations: list[str] = []
    per_scale: dict[int, dict] = {}
    if l_top == 0:
        return ClaimCertificate(0, 0, 0.0, 0, l1, c_gmax, 0, per_scale, violations)

    j_lo, j_hi = lo - 2**l_top, hi - 2
    prof = maximal_profile(phi, table, j_lo, j_hi, keep_scales=True)
    positions = prof.positions
    hit = np.zeros(positions.size, dtype=bool)
    for l in range(1, l_top + 1):
        hit |= prof.scales[l] > 1
    direct = int(np.count_nonzero(hit))

    small = 0
    attributed_small = np.zeros(positions.size, dtype=bool)
    attributed_light = np.zeros(positions.size, dtype=bool)
    for l in range(1, min(4, l_top) + 1):
        attributed_small |= prof.scales[l] > 1
        L = 2**l
        E = positions[prof.scales[l] > 1]
        chosen = select_bounded_overlap((j + 1, j + L) for j in E)
        union = chosen.union_size()
        if union < E.size:
            violations.append(f"l={l}: cover of E_l has {union} points < |E_l|={E.size}")
        if chosen.max_overlap() > 2:
            violations.append(f"l={l}: selected cover overlaps {chosen.max_overlap()} times")
        light_iv = [iv for iv in chosen if phi.window_sum(*iv) < 1 - FLOAT_RTOL]
        if light_iv:
            violations.append(f"l={l}: {len(light_iv)} cover intervals carry mass < 1")
        covered = sum(b - a + 1 for a, b in chosen)
        if covered > 32 * l1 * (1 + FLOAT_RTOL):
            violations.append(f"l={l}: cover size {covered} > 32 |phi|_1")
        per_scale[l] = {"level": int(E.size), "cover": union}
        small += union

    light_total = 0.0
    heavy_iv = []
    for l in range(5, l_top + 1):
        L = 2**l
        v = loglog_floor(L)
        blocks = classify_blocks(phi, l, table, c_gmax)
        vals = prof.scales[l]
        light_l, level_l = 0.0, 0
        for r in blocks.minus:
            a = max(r * L + 1 - j_lo, 0)
            b = min((r + 1) * L - j_lo, vals.size - 1)
            if b < a:
                continue
            seg = vals[a : b + 1]
            moment = math.fsum(seg**v)
            count = int(np.count_nonzero(seg > 1))
            attributed_light[a : b + 1] |= seg > 1
            W = phi.window_sum(r * L + 2, r * L + 2 * L)
            lemma = W * (c_gmax * W / L) ** (v - 1)
            if count > moment:
                violations.append(f"l={l}, r={r}: level count {count} > moment {moment}")
            if moment > lemma * (1 + 1e-9) + 1e-300:
                violations.append(f"l={l}, r={r}: moment {moment:.6g} > localized bound {lemma:.6g}")
            if moment > 6 * 100**2 / l**2 * W * (1 + 1e-9) + 1e-300:
                violations.append(f"l={l}, r={r}: moment exceeds the 6*100^2/l^2 form")
            light_l += moment
            level_l += count
        for r in blocks.plus:
            heavy_iv.append((r * L, (r + 2) * L))
        per_scale[l] = {"level": level_l, "light_moment": light_l, "plus": len(blocks.plus), "minus": len(blocks.minus)}
        light_total += light_l

    chosen = select_bounded_overlap(heavy_iv)
    heavy = chosen.union_size()
    if chosen.max_overlap() > 2:
        violations.append("heavy cover overlaps more than twice")
    for a, b in chosen:
        if b - a + 1 >= 400 * c_gmax * phi.window_sum(a, b):
            violations.append(f"heavy interval [{a}, {b}] is too light for its length")
    if sum(b - a + 1 for a, b in chosen) > 800 * c_gmax * l1:
        violations.append("heavy cover exceeds 800 C |phi|_1")

    # Every level point must sit in a small-scale level set, a light block's
    # level set, or the heavy cover.
    in_heavy = np.zeros(positions.size, dtype=bool)
    for a, b in chosen:
        in_heavy[max(a - j_lo, 0) : max(b - j_lo + 1, 0)] = True
    unexplained = hit & ~(attributed_small | attributed_light | in_heavy)
    if np.any(unexplained):
        violations.append(f"{int(unexplained.sum())} level points outside every part of the certificate")
    if np.count_nonzero(attributed_light) > light_total * (1 + 1e-9):
        violations.append("light level points exceed the light moment total")
    if direct > small + light_total + heavy:
        violations.append(f"direct count {direct} exceeds certificate bound")
    return ClaimCertificate(direct, small, light_total, heavy, l1, c_gmax, l_top, per_scale, violations)


def comparability_for(phi: LatticeFunction, table: WeightTable, reach: int = 0) -> float:
    """C_R over every K a maximal function of ``phi`` can need."""
    lo, hi = phi.support_bounds()
    return dyadic_comparability(table, max(hi - lo + reach, 2)).constant


def corpus_at_scale(spec: str, scale: int, start: int = 1) -> LatticeFunction:
    """Corpus member sized to ``scale``: a bare ``indicator`` spans ``scale``
    points, ``random`` specs are drawn on ``scale`` points, and deltas and
    fixed-length indicators ignore it."""
    if spec == "indicator" or spec.startswith("indicator::"):
        height = spec.split(":")[2] if spec.count(":") == 2 else "1"
        return corpus_member(f"indicator:{scale}:{height}", start=start)
    return corpus_member(spec, length=scale, start=start)


def weak_type_sweep(
    corpus: Iterable[str], scales: Sequence[int], lam: float, table: WeightTable, mode: str = "full"
) -> list[tuple[str, int, MaximalReport]]:
    """:func:`level_set_report` for every corpus member at every scale, in input order."""
    return [(spec, int(s), level_set_report(corpus_at_scale(spec, s), lam, table, mode)) for spec in corpus for s in scales]
