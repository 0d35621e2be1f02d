"""
Products of permuted copies of a nonnegative sequence.

For nonnegative ``b_1..b_K`` and permutations ``pi_1..pi_nu`` of the index
set, the sum over k of ``b[pi_1(k)] * ... * b[pi_nu(k)]`` never exceeds
``sum_k b_k**nu``. :func:`swap_normalize` reaches the right-hand side from
any starting system by single exchanges, none of which decreases the sum.

Indices are 0-based throughout. Integer (or Fraction) inputs keep every
computation exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np

#: Relative tolerance used by :func:`verify_inequality` for float inputs.
REAL_RTOL = 1e-12


@dataclass(frozen=True)
class PermutationSystem:
    """``nu`` permutations of ``range(K)`` acting on the values ``b``."""

    b: tuple
    perms: tuple[tuple[int, ...], ...]

    def __init__(self, b: Sequence, perms: Sequence[Sequence[int]]):
        b = tuple(b)
        perms = tuple(tuple(int(i) for i in p) for p in perms)
        if any(x < 0 for x in b):
            raise ValueError("values must be nonnegative")
        if not perms:
            raise ValueError("need at least one permutation")
        ident = list(range(len(b)))
        for p in perms:
            if sorted(p) != ident:
                raise ValueError(f"{p} is not a permutation of range({len(b)})")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "perms", perms)

    @property
    def K(self) -> int:
        return len(self.b)

    @property
    def nu(self) -> int:
        return len(self.perms)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Rational) for x in self.b)

    def row(self, k: int) -> list:
        """Factors multiplied at position k."""
        return [self.b[p[k]] for p in self.perms]


def _total(values, exact: bool):
    return sum(values) if exact else math.fsum(values)


def power_sum(sys: PermutationSystem):
    """``sum_k b_k**nu``, the right-hand side of the inequality."""
    return _total([x**sys.nu for x in sys.b], sys.exact)


def product_sum(sys: PermutationSystem):
    """``sum_k prod_j b[perms[j][k]]``."""
    return _total([math.prod(sys.row(k)) for k in range(sys.K)], sys.exact)


class InequalityCheck(NamedTuple):
    holds: bool
    lhs: object
    rhs: object

    @property
    def slack(self):
        return self.rhs - self.lhs


def verify_inequality(sys: PermutationSystem) -> InequalityCheck:
    """Check ``product_sum(sys) <= power_sum(sys)``.

    Exact for rational inputs; otherwise allows a relative slack of
    :data:`REAL_RTOL`.
    """
    lhs, rhs = product_sum(sys), power_sum(sys)
    if sys.exact:
        return InequalityCheck(lhs <= rhs, lhs, rhs)
    return InequalityCheck(lhs <= rhs + REAL_RTOL * max(abs(rhs), 1.0), lhs, rhs)


class Normalization(NamedTuple):
    final: PermutationSystem
    trace: list
    swaps: int


def swap_normalize(sys: PermutationSystem) -> Normalization:
    """Drive a system to one whose every row is a constant value.

    Stages run from the largest value down. In each stage the rows not yet
    finalized form a sub-system. Let ``top`` be the largest value still
    available in every permutation. While the largest row product
    ``M`` is below ``top**nu``:

    * ``k1`` is the first row attaining ``M``;
    * ``j`` is the first permutation whose factor at ``k1`` is below ``top``;
    * ``k2`` is the first row where permutation ``j`` carries ``top``;

    and the entries of permutation ``j`` at ``k1`` and ``k2`` are exchanged.
    With ``A = top``, ``B`` the old factor, ``C = M / B`` and ``D`` the
    co-factor at ``k2``, the sum changes from ``BC + AD`` to ``AC + BD``,
    which is no smaller because ``A >= B`` and ``C >= D``. Row ``k1`` gains
    one factor equal to ``top`` per exchange, so a stage ends after at most
    ``nu`` exchanges with ``k1`` finalized.

    Returns the final system, the trace of ``product_sum`` (initial value,
    then one entry per exchange) and the exchange count.
    """
    exact = sys.exact
    b = sys.b
    perms = [list(p) for p in sys.perms]
    nu = len(perms)
    K = len(b)

    def row_product(k):
        return math.prod(b[p[k]] for p in perms)

    products = [row_product(k) for k in range(K)]
    trace = [_total(products, exact)]
    live = list(range(K))
    swaps = 0
    while live:
        # Every permutation carries the same multiset of values on live rows.
        top = max(b[perms[0][k]] for k in live)

        def settled():
            return next((k for k in live if all(b[p[k]] == top for p in perms)), None)

        # Equivalent to "largest product < top**nu" but immune to float rounding.
        while (k_done := settled()) is None:
            best = max(products[k] for k in live)
            k1 = next(k for k in live if products[k] == best)
            j = next(j for j in range(nu) if b[perms[j][k1]] < top)
            k2 = next(k for k in live if b[perms[j][k]] == top)
            perms[j][k1], perms[j][k2] = perms[j][k2], perms[j][k1]
            products[k1] = row_product(k1)
            products[k2] = row_product(k2)
            swaps += 1
            trace.append(_total(products, exact))
        live.remove(k_done)
    return Normalization(PermutationSystem(b, perms), trace, swaps)


def random_system(rng: np.random.Generator, K: int, nu: int, high: int | None = 10) -> PermutationSystem:
    """A random system; integer values in ``[0, high]`` or uniform floats if ``high`` is None."""
    if high is None:
        b = [float(x) for x in rng.random(K)]
    else:
        b = [int(x) for x in rng.integers(0, high + 1, size=K)]
    perms = [[int(i) for i in rng.permutation(K)] for _ in range(nu)]
    return PermutationSystem(b, perms)


class ExhaustiveResult(NamedTuple):
    total: int
    passed: int
    worst_slack: int
    worst_case: tuple | None


def exhaustive_check(max_k: int, max_nu: int, grid: Sequence[int], fix_first: bool = False) -> ExhaustiveResult:
    """Check the inequality on every system with ``K <= max_k``, ``nu <= max_nu``
    and integer values drawn from ``grid``.

    Vectorized over value vectors with exact int64 arithmetic. With
    ``fix_first`` the first permutation is pinned to the identity, which
    loses nothing because relabeling all rows together leaves the sum
    unchanged; the reported counts are then over the reduced family.

    ``worst_slack`` is the smallest ``rhs - lhs`` seen.
    """
    grid = [int(x) for x in grid]
    if min(grid) < 0:
        raise ValueError("grid values must be nonnegative")
    if max(grid) ** max_nu * max_k >= 2**62:
        raise OverflowError("grid too large for exact int64 evaluation")
    total = passed = 0
    worst_slack, worst_case = None, None
    for K in range(1, max_k + 1):
        all_perms = np.array(list(itertools.permutations(range(K))), dtype=np.intp)
        values = np.array(list(itertools.product(grid, repeat=K)), dtype=np.int64)
        for nu in range(1, max_nu + 1):
            rhs = (values**nu).sum(axis=1)
            free = nu - 1 if fix_first else nu
            tuples = itertools.product(range(len(all_perms)), repeat=free)
            for idx in tuples:
                chosen = [all_perms[i] for i in idx]
                if fix_first:
                    chosen.insert(0, all_perms[0])
                lhs = np.ones_like(values)
                for p in chosen:
                    lhs *= values[:, p]
                lhs = lhs.sum(axis=1)
                slack = rhs - lhs
                total += slack.size
                passed += int(np.count_nonzero(slack >= 0))
                i = int(np.argmin(slack))
                if worst_slack is None or slack[i] < worst_slack:
                    worst_slack = int(slack[i])
                    worst_case = (tuple(int(x) for x in values[i]), tuple(tuple(int(x) for x in p) for p in chosen))
    return ExhaustiveResult(total, passed, worst_slack, worst_case)


def as_fraction_system(sys: PermutationSystem) -> PermutationSystem:
    """Same system with values converted to exact fractions."""
    return PermutationSystem([Fraction(x) for x in sys.b], sys.perms)


class NormalizationSweep(NamedTuple):
    total: int
    passed: int
    failures: list


def check_normalization(sys: PermutationSystem) -> bool:
    """Trace is nondecreasing, ends at the power sum and every final row is constant."""
    result = swap_normalize(as_fraction_system(sys) if not sys.exact else sys)
    trace = result.trace
    rows_const = all(len(set(result.final.row(k))) == 1 for k in range(sys.K))
    monotone = all(b >= a for a, b in zip(trace, trace[1:]))
    return monotone and rows_const and trace[-1] == power_sum(result.final)


def random_normalization_sweep(count: int, max_k: int = 12, max_nu: int = 5, seed: int = 0, high: int | None = 10) -> NormalizationSweep:
    """Run :func:`check_normalization` on ``count`` random systems with
    ``1 <= K <= max_k`` and ``1 <= nu <= max_nu``. Float systems (``high=None``)
    are normalized in exact fraction arithmetic."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(count):
        K = int(rng.integers(1, max_k + 1))
        nu = int(rng.integers(1, max_nu + 1))
        sys = random_system(rng, K, nu, high)
        if not check_normalization(sys):
            failures.append((i, sys))
    return NormalizationSweep(count, count - len(failures), failures)
