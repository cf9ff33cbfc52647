"""Upgrade operators between base hierarchies.

The upgrade of n rewrites the hereditary structure of n over its source
hierarchy into a target hierarchy: digits below the working base are
upgraded recursively, exponents are rewritten deeply, and the target
base is the least one whose rewrite lands strictly between the previous
upgrade and the next target element.  When no target base fits, the
upgrade is infinite.
"""

from __future__ import annotations

from typing import Callable, Iterable, NamedTuple

from .hierarchy import FiniteHierarchy, Hierarchy, _coerce
from .numerals import (
    DEFAULT_BUDGET,
    BitBudget,
    ExtNat,
    INFINITY,
    base_change,
    decompose,
)

__all__ = [
    "UpgradeContext",
    "GoodSuccessorReport",
    "upgrade",
    "deep_base_change",
    "check_good_successor",
]


def _phi_value(
    up: Callable[[int], ExtNat],
    b: int,
    c: int,
    m: int,
    budget: BitBudget,
    cache: dict[int, ExtNat],
) -> ExtNat:
    """Deep base change of m: hereditary base-b monomials rebuilt over c.

    up() supplies upgrades of values below b (digits and small remainders);
    exponents are rewritten recursively.  Infinite digit upgrades make the
    whole value infinite.
    """
    if m < b:
        return up(m)
    hit = cache.get(m)
    if hit is not None:
        return hit
    acc: ExtNat = 0
    rest = m
    # walk monomials iteratively; recursion depth is only the exponent tower
    while rest >= b:
        _, e, a, r = decompose(rest, b)
        pe = _phi_value(up, b, c, e, budget, cache)
        ua = up(a)
        if pe is INFINITY or ua is INFINITY:
            acc = INFINITY
            break
        acc = budget.check(acc + budget.pow(c, pe) * ua)
        rest = r
    if acc is not INFINITY and rest:
        tail = up(rest)
        acc = INFINITY if tail is INFINITY else budget.check(acc + tail)
    cache[m] = acc
    return acc


class UpgradeContext:
    """Memoized upgrade operator from a hierarchy into a successor hierarchy.

    Values are filled from 0 upward, since each upgrade thresholds against
    the previous one.  Once an upgrade comes out infinite, all later ones do.
    """

    def __init__(
        self,
        source: Hierarchy | Iterable[int],
        target: Hierarchy | Iterable[int],
        budget: BitBudget = DEFAULT_BUDGET,
        fast_paths: bool = True,
    ) -> None:
        self.source = _coerce(source)
        self.target = _coerce(target)
        self.budget = budget
        self._fast = fast_paths
        self._up: list[ExtNat] = []
        self._chosen: dict[int, int] = {}
        self._phi_caches: dict[tuple[int, int], dict[int, ExtNat]] = {}
        self._singleton = (
            fast_paths
            and isinstance(self.source, FiniteHierarchy)
            and len(self.source) == 1
            and isinstance(self.target, FiniteHierarchy)
            and len(self.target) == 1
        )

    def upgrade(self, n: int) -> ExtNat:
        if n < 0:
            raise ValueError("upgrades are defined on nonnegative integers")
        if n < self.source.min_base:
            return n
        if self._singleton:
            # one source base, one target base: the upgrade is exactly the
            # hereditary base change between them
            val = base_change(n, self.source.min_base, self.target.min_base, self.budget)
            self._chosen[n] = self.target.min_base
            return val
        while len(self._up) <= n:
            self._fill_next()
        return self._up[n]

    def chosen_base(self, n: int) -> int | None:
        """Target base of the upgrade of n (None below the source minimum)."""
        self.upgrade(n)
        return self._chosen.get(n)

    def deep_base_change(self, b: int, c: int, m: int) -> ExtNat:
        if b not in self.source:
            raise ValueError(f"{b} is not a base of {self.source!r}")
        if c < 2:
            raise ValueError("target base must be at least 2")
        if m < 0:
            raise ValueError("deep base change is defined on nonnegative integers")
        return self._phi(b, c, m)

    def _phi(self, b: int, c: int, m: int) -> ExtNat:
        cache = self._phi_caches.setdefault((b, c), {})
        return _phi_value(self._small_up, b, c, m, self.budget, cache)

    def _small_up(self, m: int) -> ExtNat:
        if m < len(self._up):
            return self._up[m]
        return self.upgrade(m)

    def _fill_next(self) -> None:
        m = len(self._up)
        minb = self.source.min_base
        if m < minb:
            self._up.append(m)
            return
        prev = self._up[m - 1]
        if prev is INFINITY:
            self._up.append(INFINITY)
            return
        if m in self.source:
            # the deep change of a base element is the candidate base itself,
            # so the least target element past the previous upgrade wins
            for c in self.target.elements_from(prev + 1):
                self._chosen[m] = c
                self._up.append(c)
                return
            self._up.append(INFINITY)
            return
        b = self.source.upper_base(m)
        if self._fast:
            # block decomposition: upgrades distribute over the final digit
            a, r = divmod(m, b)
            if r:
                block = self._up[b * a]
                off = self._up[r]
                if block is INFINITY or off is INFINITY:
                    self._up.append(INFINITY)
                    return
                self._up.append(self.budget.check(block + off))
                chosen = self._chosen.get(b * a)
                if chosen is not None:
                    self._chosen[m] = chosen
                return
        ub = self._up[b]
        if ub is INFINITY:
            self._up.append(INFINITY)
            return
        for c in self.target.elements_from(ub):
            val = self._phi(b, c, m)
            if val is INFINITY or val <= prev:
                continue
            if val < self.target.s_next(c):
                self._chosen[m] = c
                self._up.append(val)
                return
        self._up.append(INFINITY)


def upgrade(
    source: Hierarchy | Iterable[int],
    target: Hierarchy | Iterable[int],
    n: int,
    budget: BitBudget = DEFAULT_BUDGET,
) -> ExtNat:
    """Upgrade n from source into target (fresh context; see UpgradeContext)."""
    return UpgradeContext(source, target, budget).upgrade(n)


def deep_base_change(
    source: Hierarchy | Iterable[int],
    target: Hierarchy | Iterable[int],
    b: int,
    c: int,
    m: int,
    budget: BitBudget = DEFAULT_BUDGET,
) -> ExtNat:
    """Deep base change of m from source base b to target base c."""
    return UpgradeContext(source, target, budget).deep_base_change(b, c, m)


class GoodSuccessorReport(NamedTuple):
    ok: bool
    bound: int
    counterexample: int | None
    reason: str


def check_good_successor(
    source: Hierarchy | Iterable[int],
    target: Hierarchy | Iterable[int],
    bound: int,
    budget: BitBudget = DEFAULT_BUDGET,
) -> GoodSuccessorReport:
    """Check the good-successor conditions for all n up to bound.

    A good successor keeps every upgrade finite, starts no lower than the
    source, and leaves no multiple of the working target base strictly
    between the upgrade of n and the next target element whenever n + 1 is
    a non-minimal source base.
    """
    src = _coerce(source)
    try:
        tgt = _coerce(target)
    except ValueError as exc:
        return GoodSuccessorReport(False, bound, None, f"target is not a hierarchy: {exc}")
    if tgt.min_base < src.min_base:
        return GoodSuccessorReport(
            False, bound, None,
            f"target minimum {tgt.min_base} sits below source minimum {src.min_base}",
        )
    ctx = UpgradeContext(src, tgt, budget)
    for n in range(bound + 1):
        val = ctx.upgrade(n)
        if val is INFINITY:
            return GoodSuccessorReport(False, bound, n, "upgrade escapes to infinity")
        if n + 1 in src and n + 1 > src.min_base:
            d = tgt.upper_base(val)
            first_multiple = d * (val // d + 1)
            if first_multiple < tgt.s_next(val):
                return GoodSuccessorReport(
                    False, bound, n,
                    f"multiple {first_multiple} of base {d} falls in the gap above {val}",
                )
    return GoodSuccessorReport(True, bound, None, "")
