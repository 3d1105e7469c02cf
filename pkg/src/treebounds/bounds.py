"""Bounds on partitioning functions, growth functions, VC dimension and true risk.

Every tree bound recurses on the root split: the ``k`` examples sent left are
partitioned by the left subtree and the ``m - k`` sent right by the right
subtree, and an ``a``-partition and a ``b``-partition merge into a
``c``-partition in ``C(a, c-b) C(b, c-a) (a+b-c)!`` ways. The per-``k``
coefficient counts how many root rules can realize a given left/right split.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from math import comb, factorial
from pathlib import Path
from typing import Callable, Hashable

from .combinatorics import (
    LogNumber,
    ln_falling_factorial,
    log_stirling2,
    log_sum,
    stirling2,
    wedderburn_etherington,
)
from .data import FeatureLandscape, shrink_landscape
from .tree import TreeShape

PER_K = "per-k"
LITERAL = "literal"
CLAMP_MODES = (PER_K, LITERAL)


class BoundCache:
    """Memo table keyed by (evaluator, shape digest, c, m, landscape digest, options).

    Reads are lock-free; insertions are serialized and idempotent.
    """

    VERSION = 1

    def __init__(self) -> None:
        self._store: dict[Hashable, int | float] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._store)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._store

    def get(self, key: Hashable):
        return self._store.get(key)

    def put(self, key: Hashable, value: int | float) -> int | float:
        with self._lock:
            return self._store.setdefault(key, value)

    def memo(self, key: Hashable, compute: Callable[[], int | float]) -> int | float:
        value = self._store.get(key)
        if value is None:
            value = self.put(key, compute())
        return value

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def save(self, path: str | Path) -> None:
        """Write a versioned JSON snapshot (exact counts are stored as strings)."""
        entries = []
        for key, value in self._store.items():
            if isinstance(value, int):
                entries.append([key, "int", str(value)])
            else:
                entries.append([key, "float", repr(value)])
        Path(path).write_text(json.dumps({"version": self.VERSION, "entries": entries}))

    @classmethod
    def load(cls, path: str | Path) -> "BoundCache":
        payload = json.loads(Path(path).read_text())
        if payload.get("version") != cls.VERSION:
            raise ValueError(f"cache file version {payload.get('version')} is not {cls.VERSION}")
        cache = cls()
        for key, kind, text in payload["entries"]:
            cache._store[_tuplify(key)] = int(text) if kind == "int" else float(text)
        return cache


def _tuplify(obj):
    if isinstance(obj, list):
        return tuple(_tuplify(x) for x in obj)
    return obj


_DEFAULT_CACHE = BoundCache()


def default_cache() -> BoundCache:
    return _DEFAULT_CACHE


@dataclass(frozen=True)
class PriorConfig:
    delta: float = 0.05
    r: float = 2 ** -10.5

    def __post_init__(self) -> None:
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not 0 < self.r < 1:
            raise ValueError("r must lie in (0, 1)")


# ---------------------------------------------------------------- stumps


def stump_pf2_real(m: int, ell: int) -> int:
    """Number of 2-partitions a stump over ``ell`` real features realizes on m points (upper bound, exact in the tight regimes)."""
    if m < 1 or ell < 1:
        raise ValueError("need m >= 1 and ell >= 1")
    total = sum(min(2 * ell, comb(m, k)) for k in range(1, m))
    return total // 2


def stump_vcdim_real(ell: int) -> int:
    """Exact VC dimension of stumps over ``ell`` real features."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    d = 1
    while 2 * ell >= comb(d + 1, (d + 1) // 2):
        d += 1
    return d


def stump_pf2_ordinal_terms(m: int, omega_counts: tuple[int, ...]) -> list[int]:
    """Per-size contributions R_1, ..., R_{floor(m/2)} of the greedy ordinal attribution."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if any(o < 1 for o in omega_counts):
        raise ValueError("category counts must be at least 1")
    conj = list(FeatureLandscape(0, omega_counts, ()).conjugate())

    def at(c: int) -> int:
        return conj[c - 1] if 1 <= c <= len(conj) else 0

    terms = []
    for k in range(1, m // 2 + 1):
        if 2 * k == m:
            terms.append(min(at(1), comb(m, k) // 2))
            continue
        r = min(at(1) + at(2), comb(m, k))
        terms.append(r)
        if r == 0:
            continue
        gamma = max(c for c in range(1, len(conj) + 1) if at(c) + at(c + 1) >= r)
        updated = [at(c) for c in range(1, gamma)]
        updated.append(at(gamma) + at(gamma + 1) + at(gamma + 2) - r)
        updated.extend(at(c + 2) for c in range(gamma + 1, len(conj) + 1))
        conj = updated
    return terms


def stump_pf2_ordinal(m: int, omega_counts: tuple[int, ...]) -> int:
    return sum(stump_pf2_ordinal_terms(m, tuple(omega_counts)))


def _nominal_total_cap(n: int, m: int) -> int:
    return n - 1 if n <= 2 else min(n, m)


def _nominal_size_cap(n: int, m: int, k: int) -> int:
    if 2 * k == m and n != 1:
        return 1
    if m > n * k:
        return n - 1
    return m // k


def stump_pf2_nominal(m: int, nu_counts: tuple[int, ...]) -> int:
    """Bound on the 2-partitions a stump with equality tests realizes on m points."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if any(n < 1 for n in nu_counts):
        raise ValueError("category counts must be at least 1")
    sizes = range(1, m // 2 + 1)
    by_feature = sum(
        min(_nominal_total_cap(n, m), sum(_nominal_size_cap(n, m, k) for k in sizes)) for n in nu_counts
    )
    by_size = sum(
        min(_part_count(m, k), sum(_nominal_size_cap(n, m, k) for n in nu_counts)) for k in sizes
    )
    return min(by_feature, by_size)


def _part_count(m: int, k: int) -> int:
    return comb(m, k) // 2 if 2 * k == m else comb(m, k)


# ---------------------------------------------------------------- tree recursion helpers


def _merge_ways(a: int, b: int, c: int) -> int:
    if a + b < c:
        return 0
    return comb(a, c - b) * comb(b, c - a) * factorial(a + b - c)


def _inner_sum(c: int, left: Callable[[int], int], right: Callable[[int], int]) -> int:
    """Sum over (a, b) of merge ways times the subtree counts."""
    total = 0
    for a in range(1, c + 1):
        pa = left(a)
        if pa == 0:
            continue
        for b in range(max(1, c - a), c + 1):
            ways = _merge_ways(a, b, c)
            if ways:
                total += ways * pa * right(b)
    return total


def _validate(c: int, m: int) -> None:
    if c < 1 or m < 1:
        raise ValueError(f"need c >= 1 and m >= 1, got c={c}, m={m}")


def _trivial(shape: TreeShape, c: int, m: int) -> int | None:
    if c > m or c > shape.n_leaves:
        return 0
    if c == 1:
        return 1
    return None


def _finish(shape: TreeShape, total: int, c: int, m: int) -> int:
    if shape.children_identical:
        # the count is an integer, so halving may round down
        total //= 2
    return min(total, stirling2(m, c))


def tree_pf_real(shape: TreeShape, c: int, m: int, ell: int, cache: BoundCache | None = None) -> int:
    """Bound on the c-partitions a tree class over ``ell`` real features realizes on m points."""
    _validate(c, m)
    if ell < 1:
        raise ValueError("ell must be at least 1")
    cache = cache if cache is not None else _DEFAULT_CACHE
    return _tree_real(shape, c, m, ell, cache)


def _tree_real(shape: TreeShape, c: int, m: int, ell: int, cache: BoundCache) -> int:
    trivial = _trivial(shape, c, m)
    if trivial is not None:
        return trivial
    if m <= shape.n_leaves:
        return stirling2(m, c)

    def compute() -> int:
        left, right = shape.left, shape.right
        total = 0
        for k in range(left.n_leaves, m - right.n_leaves + 1):
            coef = min(2 * ell, comb(m, k))
            total += coef * _inner_sum(
                c,
                lambda a: _tree_real(left, a, k, ell, cache),
                lambda b: _tree_real(right, b, m - k, ell, cache),
            )
        return _finish(shape, total, c, m)

    return cache.memo(("real", shape.canonical, c, m, ell), compute)


def _clamp_each(counts: tuple[int, ...], k: int, skip: int | None = None) -> tuple[int, ...]:
    return tuple(min(v - (1 if j == skip else 0), k) for j, v in enumerate(counts))


def tree_pf_ordinal(
    shape: TreeShape, c: int, m: int, omega_counts: tuple[int, ...], cache: BoundCache | None = None
) -> int:
    """Bound for a tree class over ordinal features with category counts ``omega_counts``.

    Returns the smaller of the per-feature and the aggregate recursions. Ordinal
    samples are also real samples, so the real-feature bound with one feature
    per splittable ordinal feature caps the result as well.
    """
    _validate(c, m)
    cache = cache if cache is not None else _DEFAULT_CACHE
    return _tree_ordinal(shape, c, m, tuple(sorted(omega_counts)), cache)


def _tree_ordinal(shape: TreeShape, c: int, m: int, counts: tuple[int, ...], cache: BoundCache) -> int:
    trivial = _trivial(shape, c, m)
    if trivial is not None:
        return trivial
    splittable = sum(1 for o in counts if o >= 2)
    if splittable == 0:
        return 0

    def compute() -> int:
        left, right = shape.left, shape.right

        def sub(t: TreeShape, size: int, cs: tuple[int, ...]) -> Callable[[int], int]:
            key = tuple(sorted(cs))
            return lambda a: _tree_ordinal(t, a, size, key, cache)

        per_feature = 0
        for i, o in enumerate(counts):
            if o < 2:
                continue
            for k in range(1, m):
                coef = min(2 * (o - 1) if 2 * k == m else o - 1, 2)
                per_feature += coef * _inner_sum(
                    c, sub(left, k, _clamp_each(counts, k, i)), sub(right, m - k, _clamp_each(counts, m - k, i))
                )

        conj = FeatureLandscape(0, counts, ()).conjugate()
        first = conj[0] if conj else 0
        second = conj[1] if len(conj) > 1 else 0
        aggregate = 0
        for k in range(1, m):
            coef = min(2 * first if 2 * k == m else first + second, comb(m, k))
            aggregate += coef * _inner_sum(
                c, sub(left, k, _clamp_each(counts, k)), sub(right, m - k, _clamp_each(counts, m - k))
            )

        best = min(_finish(shape, per_feature, c, m), _finish(shape, aggregate, c, m))
        return min(best, _tree_real(shape, c, m, splittable, cache))

    return cache.memo(("ordinal", shape.canonical, c, m, counts), compute)


def tree_pf_nominal(
    shape: TreeShape, c: int, m: int, nu_counts: tuple[int, ...], cache: BoundCache | None = None
) -> int:
    """Bound for a tree class over nominal features with category counts ``nu_counts``."""
    _validate(c, m)
    cache = cache if cache is not None else _DEFAULT_CACHE
    return _tree_nominal(shape, c, m, tuple(sorted(nu_counts)), cache)


def _nominal_pair_cap(n: int, m: int, k: int) -> int:
    k = min(k, m - k)
    return n - 1 if m > n * k else m // k


def _tree_nominal(shape: TreeShape, c: int, m: int, counts: tuple[int, ...], cache: BoundCache) -> int:
    trivial = _trivial(shape, c, m)
    if trivial is not None:
        return trivial
    splittable = sum(1 for n in counts if n >= 2)
    if splittable == 0:
        return 0

    def compute() -> int:
        left, right = shape.left, shape.right

        def sub(t: TreeShape, size: int, cs: tuple[int, ...]) -> Callable[[int], int]:
            key = tuple(sorted(cs))
            return lambda a: _tree_nominal(t, a, size, key, cache)

        per_feature = 0
        for i, n in enumerate(counts):
            if n < 2:
                continue
            for k in range(1, m):
                coef = _nominal_pair_cap(n, m, k)
                per_feature += coef * _inner_sum(
                    c, sub(left, k, _clamp_each(counts, k, i)), sub(right, m - k, _clamp_each(counts, m - k, i))
                )

        aggregate = 0
        for k in range(1, m):
            coef = min(comb(m, k), splittable * (m // min(k, m - k)))
            aggregate += coef * _inner_sum(
                c, sub(left, k, _clamp_each(counts, k)), sub(right, m - k, _clamp_each(counts, m - k))
            )
        return min(_finish(shape, per_feature, c, m), _finish(shape, aggregate, c, m))

    return cache.memo(("nominal", shape.canonical, c, m, counts), compute)


# ---------------------------------------------------------------- mixed features


def split_capacity(m: int, k: int, landscape: FeatureLandscape) -> int:
    """Rules able to send a given k examples left: two per real or splittable ordinal
    feature, and floor(m / min(k, m-k)) per splittable nominal feature."""
    ordinals = sum(1 for o in landscape.omega_counts if o >= 2)
    nominals = sum(1 for n in landscape.nu_counts if n >= 2)
    return 2 * landscape.ell + 2 * ordinals + (m // min(k, m - k)) * nominals


def parti_func_ub(
    shape: TreeShape,
    c: int,
    m: int,
    landscape: FeatureLandscape,
    cache: BoundCache | None = None,
    clamp: str = PER_K,
) -> int:
    """Bound on the c-partitioning function for any mixture of feature types.

    Args:
        clamp: ``"per-k"`` caps each split coefficient at C(m, k); ``"literal"``
            only applies the final Stirling cap.
    """
    _validate(c, m)
    if clamp not in CLAMP_MODES:
        raise ValueError(f"clamp must be one of {CLAMP_MODES}")
    cache = cache if cache is not None else _DEFAULT_CACHE
    return _parti(shape, c, m, landscape, cache, clamp)


def _parti(shape: TreeShape, c: int, m: int, ls: FeatureLandscape, cache: BoundCache, clamp: str) -> int:
    if c > m or c > shape.n_leaves:
        return 0
    if c == m or c == 1 or m == 1:
        return 1

    def compute() -> int:
        left, right = shape.left, shape.right
        total = 0
        for k in range(1, m):
            coef = split_capacity(m, k, ls)
            if clamp == PER_K:
                coef = min(coef, comb(m, k))
            if coef == 0:
                continue
            ls_left, ls_right = shrink_landscape(ls, k), shrink_landscape(ls, m - k)
            total += coef * _inner_sum(
                c,
                lambda a: _parti(left, a, k, ls_left, cache, clamp),
                lambda b: _parti(right, b, m - k, ls_right, cache, clamp),
            )
        return _finish(shape, total, c, m)

    return cache.memo(("mixed", shape.canonical, c, m, ls.key(), clamp), compute)


def log_parti_func_ub(
    shape: TreeShape, c: int, m: int, landscape: FeatureLandscape, cache: BoundCache | None = None
) -> LogNumber:
    """Fast log-space relaxation: the sum over split sizes is replaced by
    (m-1) times its largest coefficient and largest subtree counts."""
    _validate(c, m)
    cache = cache if cache is not None else _DEFAULT_CACHE
    return LogNumber(_log_parti(shape, c, m, landscape, cache))


def _log_parti(shape: TreeShape, c: int, m: int, ls: FeatureLandscape, cache: BoundCache) -> float:
    if c > m or c > shape.n_leaves:
        return -math.inf
    if c == m or c == 1 or m == 1:
        return 0.0
    if m <= shape.n_leaves:
        return log_stirling2(m, c)

    def compute() -> float:
        left, right = shape.left, shape.right
        coef = split_capacity(m, m - 1, ls)
        if coef == 0:
            return -math.inf
        terms = []
        for a in range(1, c + 1):
            la = _log_parti(left, a, m - 1, ls, cache)
            if la == -math.inf:
                continue
            for b in range(max(1, c - a), c + 1):
                ways = _merge_ways(a, b, c)
                if ways:
                    terms.append(math.log(ways) + la + _log_parti(right, b, m - 1, ls, cache))
        if not terms:
            return -math.inf
        value = math.log(m - 1) + math.log(coef) + log_sum(terms).value
        if shape.children_identical:
            value -= math.log(2)
        return min(value, log_stirling2(m, c))

    return cache.memo(("log", shape.canonical, c, m, ls.key()), compute)


def log_growth_func_ub(
    shape: TreeShape, n_classes: int, m: int, landscape: FeatureLandscape, cache: BoundCache | None = None
) -> LogNumber:
    """Log of a bound on the number of labelings with ``n_classes`` classes on m points."""
    if n_classes < 1 or m < 1:
        raise ValueError("need n_classes >= 1 and m >= 1")
    cache = cache if cache is not None else _DEFAULT_CACHE
    top = min(n_classes, shape.n_leaves, m)
    return log_sum(
        ln_falling_factorial(n_classes, a) * LogNumber(_log_parti(shape, a, m, landscape, cache))
        for a in range(1, top + 1)
    )


def vcdim_ub(
    shape: TreeShape,
    landscape: FeatureLandscape,
    cache: BoundCache | None = None,
    clamp: str = PER_K,
    cap: int = 10_000,
) -> int:
    """Largest m for which the 2-partition bound still allows shattering."""
    if shape.is_leaf:
        return 1
    cache = cache if cache is not None else _DEFAULT_CACHE
    m = 1
    while parti_func_ub(shape, 2, m, landscape, cache, clamp) >= 2 ** (m - 1) - 1:
        m += 1
        if m > cap:
            raise RuntimeError(f"VC dimension search exceeded m = {cap}")
    return m - 1


# ---------------------------------------------------------------- risk bound


def complexity_prior(shape: TreeShape) -> float:
    """Prior mass of a shape: 6/(pi^2 L^2) shared by the shapes with L leaves."""
    L = shape.n_leaves
    return 6 / (math.pi ** 2 * L ** 2) / wedderburn_etherington(L)


def error_prior(k: int, cfg: PriorConfig = PriorConfig()) -> float:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return (1 - cfg.r) * cfg.r ** k


def shawe_taylor_epsilon(
    m: int,
    k: int,
    shape: TreeShape,
    landscape: FeatureLandscape,
    n_classes: int,
    cfg: PriorConfig = PriorConfig(),
    cache: BoundCache | None = None,
) -> float:
    """Risk bound for a tree of class ``shape`` making ``k`` errors on m training examples."""
    if m < 1 or not 0 <= k <= m:
        raise ValueError("need m >= 1 and 0 <= k <= m")
    ln_tau = log_growth_func_ub(shape, n_classes, 2 * m, landscape, cache).value
    ln_q = math.log1p(-cfg.r) + k * math.log(cfg.r)
    ln_p = math.log(complexity_prior(shape))
    return (2 * k + 4 * (math.log(4) + ln_tau - math.log(cfg.delta) - ln_q - ln_p)) / m
