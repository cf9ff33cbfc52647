"""Successor hierarchies built stage by stage, and the dynamical systems over them.

The i-th successor of a hierarchy B starts as {min B + 1} and grows at
events: at each source base above the minimum it adds one multiple of the
current maximum, and at each critical value (a multiple of the working
base that is not itself a base) it adds i iterated deep base changes.
Both growth rules end-extend the hierarchy, so every stage is an initial
segment of the final successor.

Upgrades into a successor built this way never escape to infinity, and
they collapse to a single deep base change into the stage maximum; no
candidate search is needed.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Iterable

from .hierarchy import (
    DEFAULT_HORIZON,
    FiniteHierarchy,
    Hierarchy,
    _check_pair,
    _coerce,
    HorizonError,
)
from .numerals import (
    DEFAULT_BUDGET,
    _short,
    BitBudget,
    ExtNat,
    INFINITY,
    base_change,
    superexp,
)
from .upgrade import _phi_value

__all__ = [
    "PlusHierarchy",
    "ouroboros_stage",
    "d_sequence",
    "DynamicalHierarchy",
    "ClassicHierarchy",
    "PlusChainHierarchy",
    "OuroborosHierarchy",
    "FiniteForHierarchy",
    "DiagonalHierarchy",
    "dynamical",
]


class PlusHierarchy(Hierarchy):
    """The i-th successor of a base hierarchy, materialized event by event."""

    def __init__(
        self,
        base: Hierarchy | Iterable[int],
        index: int,
        budget: BitBudget = DEFAULT_BUDGET,
        horizon: int = DEFAULT_HORIZON,
    ) -> None:
        if index < 0:
            raise ValueError("successor index cannot be negative")
        self.base = _coerce(base)
        self.index = index
        self.budget = budget
        self._hor = horizon
        self._elems = [self.base.min_base + 1]
        self._added_at = [0]
        self._frontier = self.base.min_base
        self._no_more_events = False
        self._up_memo: dict[int, int] = {}
        self._phi_caches: dict[tuple[int, int], dict[int, ExtNat]] = {}

    def __repr__(self) -> str:
        inner = ", ".join(map(_short, self._elems))
        tail = "" if self._no_more_events else ", ..."
        return f"PlusHierarchy({self.base!r} + {self.index}){{{inner}{tail}}}"

    # --- event walking ---

    def _next_event(self) -> tuple[int, bool] | None:
        """Position and kind (True = source-base event) of the next event."""
        pos = self._frontier
        next_b = self.base.s_next(pos)
        if self.index == 0:
            # critical events add nothing, so only source bases matter
            if next_b is INFINITY:
                return None
            return next_b, True
        u = self.base.upper_base(pos)
        multiple = u * (pos // u + 1)
        if next_b is not INFINITY and next_b <= multiple:
            return next_b, True
        return multiple, False

    def _apply_event(self, pos: int, is_base: bool) -> None:
        if is_base:
            c = self._elems[-1]
            b = self.base.lower_base(pos)
            ph = self._phi(b, c, pos - 1)
            assert ph is not INFINITY
            self._append(c * (ph // c + 1), pos)
        else:
            b = self.base.upper_base(pos)
            d = self._elems[-1]
            for _ in range(self.index):
                nd = self._phi(b, d, pos)
                assert nd is not INFINITY
                self._append(nd, pos)
                d = nd

    def _append(self, x: int, pos: int) -> None:
        if len(self._elems) >= self._hor:
            raise HorizonError(
                f"{self!r} needs more than {self._hor} materialized bases"
            )
        _check_pair(self._elems[-1], self.budget.check(x))
        self._elems.append(x)
        self._added_at.append(pos)

    def _advance_to(self, n: int) -> None:
        while self._frontier < n:
            ev = self._next_event()
            if ev is None:
                self._no_more_events = True
                self._frontier = n
                return
            pos, is_base = ev
            if pos > n:
                self._frontier = n
                return
            self._apply_event(pos, is_base)
            self._frontier = pos

    def _extend_one(self) -> bool:
        before = len(self._elems)
        while len(self._elems) == before:
            ev = self._next_event()
            if ev is None:
                self._no_more_events = True
                return False
            pos, is_base = ev
            self._apply_event(pos, is_base)
            self._frontier = pos
        return True

    def materialize(self) -> FiniteHierarchy:
        """Force every element; only terminates when the successor is finite."""
        while self._extend_one():
            pass
        return FiniteHierarchy(self._elems)

    # --- stages and upgrades ---

    def stage_at(self, n: int) -> FiniteHierarchy:
        """The stage of the construction after processing all events up to n."""
        if n < 0:
            raise ValueError("stages are indexed by nonnegative integers")
        self._advance_to(n)
        return FiniteHierarchy(self._elems[: bisect_right(self._added_at, n)])

    def d_sequence(self, n: int) -> tuple[int, ...]:
        """Iterated deep changes at a critical value: d_0 through d_index."""
        if not self.base.is_critical(n):
            raise ValueError(f"{n} is not critical in {self.base!r}")
        self._advance_to(n)
        b = self.base.upper_base(n)
        k = bisect_right(self._added_at, n - 1)
        d = self._elems[k - 1]
        out = [d]
        for _ in range(self.index):
            nd = self._phi(b, d, n)
            assert nd is not INFINITY
            out.append(nd)
            d = nd
        return tuple(out)

    def upgrade_value(self, n: int) -> int:
        """Upgrade n from the base into this successor.

        The value is the deep base change of n into the maximum of its own
        stage; totality of the stage construction makes this exact, with no
        candidate search.
        """
        if n < 0:
            raise ValueError("upgrades are defined on nonnegative integers")
        if n < self.base.min_base:
            return n
        hit = self._up_memo.get(n)
        if hit is not None:
            return hit
        self._advance_to(n)
        b = self.base.upper_base(n)
        c = self._elems[bisect_right(self._added_at, n) - 1]
        val = self._phi(b, c, n)
        assert val is not INFINITY
        self._up_memo[n] = val
        return val

    def chosen_base(self, n: int) -> int | None:
        """Target base of the upgrade of n: the maximum of its stage."""
        if n < self.base.min_base:
            return None
        self._advance_to(n)
        return self._elems[bisect_right(self._added_at, n) - 1]

    def _phi(self, b: int, c: int, m: int) -> ExtNat:
        cache = self._phi_caches.setdefault((b, c), {})
        return _phi_value(self._small_up, b, c, m, self.budget, cache)

    def _small_up(self, m: int) -> ExtNat:
        return self.upgrade_value(m)


def ouroboros_stage(
    i: int,
    budget: BitBudget = DEFAULT_BUDGET,
    horizon: int = DEFAULT_HORIZON,
) -> Hierarchy:
    """The i-th ouroboros hierarchy: start at {2}, take the i-th successor at step i."""
    return OuroborosHierarchy(budget, horizon).stage(i)


def d_sequence(
    base: Hierarchy | Iterable[int],
    index: int,
    n: int,
    budget: BitBudget = DEFAULT_BUDGET,
    horizon: int = DEFAULT_HORIZON,
) -> tuple[int, ...]:
    """The d-sequence at critical n for the index-th successor of base."""
    return PlusHierarchy(base, index, budget, horizon).d_sequence(n)


class DynamicalHierarchy:
    """A family of hierarchies indexed by time, with one-step upgrades between them.

    stage(i) is the hierarchy at time i; upgrade_step(i, n) carries n from
    stage i into stage i + 1.  plus_index(i) is the successor index used by
    that step, and plus_object(i) exposes the underlying construction.
    """

    kind: str

    def spec_string(self) -> str:
        raise NotImplementedError

    def stage(self, i: int) -> Hierarchy:
        raise NotImplementedError

    def upgrade_step(self, i: int, n: int) -> int:
        raise NotImplementedError

    def plus_index(self, i: int) -> int:
        raise NotImplementedError

    def plus_object(self, i: int) -> PlusHierarchy:
        raise NotImplementedError

    def step_bound(self, i: int) -> int | None:
        """Largest value upgrade_step(i, .) accepts, when the stage is frozen."""
        return None


class ClassicHierarchy(DynamicalHierarchy):
    """Single bases 2, 3, 4, ...; each upgrade is a hereditary base change."""

    kind = "classic"

    def __init__(self, budget: BitBudget = DEFAULT_BUDGET) -> None:
        self.budget = budget
        self._plus: dict[int, PlusHierarchy] = {}

    def spec_string(self) -> str:
        return "classic"

    def stage(self, i: int) -> Hierarchy:
        return FiniteHierarchy([i + 2])

    def upgrade_step(self, i: int, n: int) -> int:
        return base_change(n, i + 2, i + 3, self.budget)

    def plus_index(self, i: int) -> int:
        return 0

    def plus_object(self, i: int) -> PlusHierarchy:
        if i not in self._plus:
            self._plus[i] = PlusHierarchy(FiniteHierarchy([i + 2]), 0, self.budget)
        return self._plus[i]


class PlusChainHierarchy(DynamicalHierarchy):
    """Iterated 0-th successors of a finite start; every stage stays finite."""

    kind = "plus-chain"

    def __init__(
        self,
        start: Hierarchy | Iterable[int],
        budget: BitBudget = DEFAULT_BUDGET,
        horizon: int = DEFAULT_HORIZON,
    ) -> None:
        first = _coerce(start)
        if not isinstance(first, FiniteHierarchy):
            first = FiniteHierarchy(first.known_elements())
        self.budget = budget
        self.horizon = horizon
        self._stages: list[FiniteHierarchy] = [first]
        self._plus: list[PlusHierarchy] = []

    def spec_string(self) -> str:
        return "plus-chain: " + ",".join(map(str, self._stages[0]))

    def _ensure(self, i: int) -> None:
        while len(self._plus) <= i:
            p = PlusHierarchy(self._stages[len(self._plus)], 0, self.budget, self.horizon)
            frozen = p.materialize()
            self._plus.append(p)
            self._stages.append(frozen)

    def stage(self, i: int) -> Hierarchy:
        if i > 0:
            self._ensure(i - 1)
        return self._stages[i]

    def upgrade_step(self, i: int, n: int) -> int:
        self._ensure(i)
        return self._plus[i].upgrade_value(n)

    def plus_index(self, i: int) -> int:
        return 0

    def plus_object(self, i: int) -> PlusHierarchy:
        self._ensure(i)
        return self._plus[i]


class OuroborosHierarchy(DynamicalHierarchy):
    """Start at {2} and take the i-th successor at step i."""

    kind = "ouroboros"

    def __init__(
        self,
        budget: BitBudget = DEFAULT_BUDGET,
        horizon: int = DEFAULT_HORIZON,
    ) -> None:
        self.budget = budget
        self.horizon = horizon
        self._stages: list[Hierarchy] = [FiniteHierarchy([2])]
        self._plus: list[PlusHierarchy] = []

    def spec_string(self) -> str:
        return "ouroboros"

    def _ensure(self, i: int) -> None:
        while len(self._plus) <= i:
            j = len(self._plus)
            p = PlusHierarchy(self._stages[j], j, self.budget, self.horizon)
            self._plus.append(p)
            self._stages.append(p)

    def stage(self, i: int) -> Hierarchy:
        if i > 0:
            self._ensure(i - 1)
        return self._stages[i]

    def upgrade_step(self, i: int, n: int) -> int:
        self._ensure(i)
        return self._plus[i].upgrade_value(n)

    def plus_index(self, i: int) -> int:
        return i

    def plus_object(self, i: int) -> PlusHierarchy:
        self._ensure(i)
        return self._plus[i]


class FiniteForHierarchy(DynamicalHierarchy):
    """Successor stages frozen at a moving bound, keeping every stage finite.

    Stage i + 1 is the stage of the i-th successor of stage i at the bound
    k_i; the bound then advances to the upgrade of k_i.  Upgrades are only
    valid at or below the bound, where the frozen stage and the full
    successor agree.
    """

    kind = "finite-for"

    def __init__(
        self,
        m: int,
        budget: BitBudget = DEFAULT_BUDGET,
        horizon: int = DEFAULT_HORIZON,
    ) -> None:
        if m < 0:
            raise ValueError("the bound seed cannot be negative")
        self.m = m
        self.budget = budget
        self.horizon = horizon
        self._stages: list[FiniteHierarchy] = [FiniteHierarchy([2])]
        self._ks: list[int] = [m]
        self._plus: list[PlusHierarchy] = []

    def spec_string(self) -> str:
        return f"finite-for: {self.m}"

    def _next_k(self, j: int, plus: PlusHierarchy, frozen: FiniteHierarchy) -> int:
        return plus.upgrade_value(self._ks[j])

    def _ensure(self, i: int) -> None:
        while len(self._plus) <= i:
            j = len(self._plus)
            p = PlusHierarchy(self._stages[j], j, self.budget, self.horizon)
            frozen = p.stage_at(self._ks[j])
            nk = self._next_k(j, p, frozen)
            self._plus.append(p)
            self._stages.append(frozen)
            self._ks.append(nk)

    def stage(self, i: int) -> Hierarchy:
        if i > 0:
            self._ensure(i - 1)
        return self._stages[i]

    def step_bound(self, i: int) -> int:
        if i >= len(self._ks):
            self._ensure(i - 1)
        return self._ks[i]

    def upgrade_step(self, i: int, n: int) -> int:
        if i > 0:
            self._ensure(i - 1)
        if n > self._ks[i]:
            raise ValueError(
                f"value {_short(n)} exceeds the stage-{i} bound {_short(self._ks[i])}"
            )
        if n < self._stages[i].min_base:
            return n  # identity below the minimum; the next stage is not needed
        self._ensure(i)
        return self._plus[i].upgrade_value(n)

    def plus_index(self, i: int) -> int:
        return i

    def plus_object(self, i: int) -> PlusHierarchy:
        self._ensure(i)
        return self._plus[i]


class DiagonalHierarchy(FiniteForHierarchy):
    """Frozen successor stages whose bound grows by a power tower each step."""

    kind = "diagonal"

    def __init__(
        self,
        budget: BitBudget = DEFAULT_BUDGET,
        horizon: int = DEFAULT_HORIZON,
    ) -> None:
        super().__init__(2, budget, horizon)

    def spec_string(self) -> str:
        return "diagonal"

    def _next_k(self, j: int, plus: PlusHierarchy, frozen: FiniteHierarchy) -> int:
        return superexp(frozen.max_base, j + 1, self.budget)


def dynamical(
    kind: str,
    *,
    start: Hierarchy | Iterable[int] | None = None,
    m: int | None = None,
    budget: BitBudget = DEFAULT_BUDGET,
    horizon: int = DEFAULT_HORIZON,
) -> DynamicalHierarchy:
    """Build a dynamical hierarchy by kind.

    plus-chain needs start; finite-for needs m; the others take no parameters.
    """
    if kind == "classic":
        return ClassicHierarchy(budget)
    if kind == "plus-chain":
        if start is None:
            raise ValueError("plus-chain needs a start hierarchy")
        return PlusChainHierarchy(start, budget, horizon)
    if kind == "ouroboros":
        return OuroborosHierarchy(budget, horizon)
    if kind == "finite-for":
        if m is None:
            raise ValueError("finite-for needs a bound seed m")
        return FiniteForHierarchy(m, budget, horizon)
    if kind == "diagonal":
        return DiagonalHierarchy(budget, horizon)
    raise ValueError(f"unknown dynamical hierarchy kind: {kind!r}")
