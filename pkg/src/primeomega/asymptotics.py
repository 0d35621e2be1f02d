"""
Finite-K diagnostics built from the raw sums of a :class:`WeightTable`.

Each diagnostic returns a :class:`RatioSeries`: one value per checkpoint K.
Where a constant is only known to exist, the series is the per-K value of
that constant and the fitted constant is its max (or min) over the grid.
All logarithms are natural.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .weights import WeightKind, WeightTable, exp_sum, mertens_sum, power_sum

DEFAULT_CHECKPOINTS = (16, 10**2, 10**3, 10**4, 10**5, 10**6)

#: The base in the exponential-moment bound for the omega functions.
NORTON_BASE = 1.9


@dataclass(frozen=True)
class RatioSeries:
    """Checkpointed values of one diagnostic.

    ``fitted`` holds the summary constant (max or min over checkpoints) and
    ``argfit`` the checkpoint where it is attained, when the diagnostic has
    one.
    """

    label: str
    kind: WeightKind
    checkpoints: tuple[int, ...]
    ratios: tuple[float, ...]
    fitted: float | None = None
    argfit: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.checkpoints) != len(self.ratios):
            raise ValueError("checkpoints and ratios differ in length")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ValueError("checkpoints must be strictly increasing")

    def __len__(self):
        return len(self.checkpoints)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.checkpoints, self.ratios))

    def rows(self):
        for K, v in zip(self.checkpoints, self.ratios):
            yield (self.label, self.kind.value, K, v)


def loglog(K: float) -> float:
    return math.log(math.log(K))


def nu(K: int) -> int:
    """``floor(log log K)``, the exponent used throughout the moment bounds."""
    return math.floor(loglog(K))


def _checkpoints(table: WeightTable, checkpoints: Sequence[int], minimum: int, why: str) -> tuple[int, ...]:
    cps = tuple(int(K) for K in checkpoints)
    for K in cps:
        if K < minimum:
            raise ValueError(f"checkpoint {K} below {minimum} ({why})")
        if K > table.k_max:
            raise IndexError(f"checkpoint {K} exceeds table bound {table.k_max}")
    return cps


def _series(label, table, cps, ratios, fitted=None, argfit=None, **extra) -> RatioSeries:
    return RatioSeries(label, table.kind, cps, tuple(float(r) for r in ratios), fitted, argfit, extra)


def hardy_wright_drift(table: WeightTable, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS) -> RatioSeries:
    """``D(K) = (S_{g,K} - K log log K) / K``, which should settle to a constant."""
    cps = _checkpoints(table, checkpoints, 16, "log log K must exceed 1")
    ratios = [(table.S(K) - K * loglog(K)) / K for K in cps]
    return _series("hardy_wright_drift", table, cps, ratios)


def mertens_drift(table: WeightTable, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS) -> RatioSeries:
    """``E(K) - log log K`` per checkpoint.

    ``fitted`` is the empirical C_P, the max of ``E(K) / log log K``.
    """
    cps = _checkpoints(table, checkpoints, 4, "needs K > 3")
    sums = [mertens_sum(K, table) for K in cps]
    ratios = [e - loglog(K) for e, K in zip(sums, cps)]
    cp = [e / loglog(K) for e, K in zip(sums, cps)]
    i = int(np.argmax(cp))
    return _series("mertens_drift", table, cps, ratios, cp[i], cps[i], mertens=tuple(sums))


def norton_ratio(table: WeightTable, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS) -> RatioSeries:
    """``sum_{n<=K} 1.9**g(n) / (K exp(0.9 E(K)))``; ``fitted`` is the max."""
    cps = _checkpoints(table, checkpoints, 2, "needs a prime below K")
    ratios = [exp_sum(K, NORTON_BASE, table) / (K * math.exp(0.9 * mertens_sum(K, table))) for K in cps]
    i = int(np.argmax(ratios))
    return _series("norton_ratio", table, cps, ratios, ratios[i], cps[i])


def power_sum_ratio(table: WeightTable, checkpoints: Sequence[int] = (16, 10**3, 10**6)) -> RatioSeries:
    """Implied C_{Omega,max} per checkpoint: ``(P_nu(K)/K)**(1/nu) / nu`` with ``nu = floor(log log K)``.

    ``P_nu(K)`` is the exact power sum of g to the power nu. ``fitted`` is
    the max over checkpoints.
    """
    cps = _checkpoints(table, checkpoints, 16, "moment bound requires K >= 16")
    ratios = []
    for K in cps:
        v = nu(K)
        ratios.append((power_sum(K, v, table) / K) ** (1.0 / v) / v)
    i = int(np.argmax(ratios))
    return _series("power_sum_ratio", table, cps, ratios, ratios[i], cps[i])


def delange_ratio(table: WeightTable, m: int, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS, max_m: int = 6) -> RatioSeries:
    """``sum_{n<=K} g(n)**m / (K (log log K)**m)``."""
    if not 1 <= m <= max_m:
        raise ValueError(f"m must be in [1, {max_m}], got {m}")
    cps = _checkpoints(table, checkpoints, 16, "log log K must exceed 1")
    ratios = [power_sum(K, m, table) / (K * loglog(K) ** m) for K in cps]
    return _series(f"delange_ratio_m{m}", table, cps, ratios, m=m)


def s_power_lower_constant(table: WeightTable, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS) -> RatioSeries:
    """``c(K) = (S_{g,K} / (K nu))**nu``; ``fitted`` is the min, the empirical C_g."""
    cps = _checkpoints(table, checkpoints, 16, "nu >= 1 requires K >= 16")
    ratios = []
    for K in cps:
        v = nu(K)
        ratios.append((table.S(K) / (K * v)) ** v)
    i = int(np.argmin(ratios))
    return _series("s_power_lower_constant", table, cps, ratios, ratios[i], cps[i])


class Comparability(NamedTuple):
    constant: float
    argmax: int


def dyadic_level(K: int) -> int:
    """Minimal l with ``2**(l-1) < K <= 2**l``."""
    return (int(K) - 1).bit_length()


def dyadic_comparability(table: WeightTable, k_max: int | None = None) -> Comparability:
    """Exact finite-range C_R = ``max_{2<=K<=k_max} S_{g,2**l_K} / S_{g,K}``.

    The table must reach the next power of two above ``k_max``.
    """
    k_max = table.k_max if k_max is None else int(k_max)
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    top = 1 << (k_max - 1).bit_length()
    if top > table.k_max:
        raise IndexError(f"table must reach {top} to compare K <= {k_max} with the next power of two")
    K = np.arange(2, k_max + 1, dtype=np.int64)
    # Exact l_K via bit lengths: 2**l_K is the next power of two >= K.
    l = np.zeros_like(K)
    x = K - 1
    while np.any(x):
        l += x > 0
        x >>= 1
    ratios = table.prefix[1 << l] / table.prefix[K]
    i = int(np.argmax(ratios))
    return Comparability(float(ratios[i]), int(K[i]))


def series_to_csv(series: Sequence[RatioSeries] | RatioSeries, fh: io.TextIOBase | None = None) -> str:
    """Serialize to CSV with header ``label,kind,K,value`` and 12 significant digits."""
    if isinstance(series, RatioSeries):
        series = [series]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "kind", "K", "value"])
    for s in series:
        for label, kind, K, v in s.rows():
            w.writerow([label, kind, K, f"{v:.12g}"])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
