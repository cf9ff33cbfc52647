"""Ordinal readings of hereditary notation over a base hierarchy.

Two collapses share one positional engine.  The theta reading splits a value
along its lower base and anchors the split point at earlier hierarchy
elements, which makes it strictly monotone and certificate grade.  The psi
reading interprets digits literally along the upper base; it is not monotone
but it commutes with upgrades, and fundamental-sequence entries of psi values
can be realized by explicit integers.  Everything here is an exact term
computation, no limits are taken anywhere.
"""

from __future__ import annotations

from typing import Callable, Iterable, NamedTuple

from .hierarchy import Hierarchy, _coerce
from .numerals import (
    DEFAULT_BUDGET,
    BitBudget,
    _short,
    decompose,
    digits,
)
from .ordinal_terms import (
    CNT_ONE,
    CNT_ZERO,
    ZERO,
    Cofinality,
    CntTerm,
    Index,
    OrdTerm,
    OrdinalError,
    cofinality,
    compare,
    compare_cnt,
    fin_cnt,
    fin_ord,
    fund_seq,
    lift,
    natural_sum,
    omega_monomial,
    ord_add,
    plus_big_omega,
    psi,
    theta,
)
from .successors import PlusHierarchy

__all__ = [
    "ThetaInterpretation",
    "PsiInterpretation",
    "IotaProvenance",
    "o_from_digits",
    "fs_witness",
    "majorize_witness",
]


def o_from_digits(
    b: int,
    f: Callable[[int], CntTerm],
    x: int,
    rest: Callable[[int], CntTerm] | None = None,
) -> OrdTerm:
    """Positional ordinal of x along base b, digits read through f.

    Coefficients and exponent leaves go through f; exponents at or above b
    recurse.  A trailing remainder below b goes through rest instead, which
    defaults to f.
    """
    if b < 2:
        raise ValueError(f"base must be at least 2, got {b}")
    if rest is None:
        rest = f
    if x < b:
        return lift(f(x))
    acc = ZERO
    t = x
    while t >= b:
        _, e, a, r = decompose(t, b)
        exp = lift(f(e)) if e < b else o_from_digits(b, f, e, rest)
        acc = ord_add(acc, omega_monomial(exp, f(a)))
        t = r
    if t:
        acc = ord_add(acc, lift(rest(t)))
    return acc


class ThetaInterpretation:
    """Strictly monotone collapse of hereditary notation over a hierarchy.

    upper(n) is the uncountable reading, value(n) the countable collapse
    used in termination certificates.  Values below the minimum base read as
    themselves; hierarchy elements restart the notation on top of the
    reading of what is left below them.
    """

    def __init__(self, base: Hierarchy | Iterable[int]) -> None:
        self.base = _coerce(base)
        self._upper: dict[int, OrdTerm] = {}
        self._value: dict[int, CntTerm] = {}
        self._star: dict[int, CntTerm] = {}

    def upper_base_term(self, b: int, n: int) -> OrdTerm:
        """The uncountable reading of n forced along the single base b."""
        return o_from_digits(b, self._digit, n, rest=self.value)

    def _digit(self, m: int) -> CntTerm:
        # literal only below the minimum base; larger digits go through the
        # collapse, which upgrades preserve
        if m < self.base.min_base:
            return fin_cnt(m)
        return self.value(m)

    def upper(self, n: int) -> OrdTerm:
        if n < 0:
            raise ValueError(f"cannot interpret {n}")
        hit = self._upper.get(n)
        if hit is not None:
            return hit
        h = self.base
        if n < h.min_base:
            out = fin_ord(n)
        elif n in h and n != h.min_base:
            b = h.lower_base(n)
            out = ord_add(self.upper_base_term(b, n - b), lift(self.value(n - b)))
        else:
            out = self.upper_base_term(h.lower_base(n), n)
        self._upper[n] = out
        return out

    def star(self, n: int) -> CntTerm:
        """Collapse at the largest earlier element whose reading majorizes n.

        Comparison happens after adding one uncountable step to both sides,
        so a countable difference on top of a shared spine does not count.
        """
        hit = self._star.get(n)
        if hit is not None:
            return hit
        target = plus_big_omega(self.upper(n))
        below: list[int] = []
        for x in self.base.elements_from(0):
            if x >= n:
                break
            below.append(x)
        out = CNT_ZERO
        for b_star in reversed(below):
            if compare(plus_big_omega(self.upper(b_star)), target) >= 0:
                out = self.value(b_star)
                break
        self._star[n] = out
        return out

    def value(self, n: int) -> CntTerm:
        hit = self._value.get(n)
        if hit is not None:
            return hit
        out = theta(natural_sum(self.upper(n), lift(self.star(n))))
        self._value[n] = out
        return out


class PsiInterpretation:
    """Upgrade-invariant collapse of hereditary notation over a hierarchy.

    One digit function everywhere: upper(n) reads n along its upper base
    with every digit interpreted by value, and value(n) collapses that.
    """

    def __init__(self, base: Hierarchy | Iterable[int]) -> None:
        self.base = _coerce(base)
        self._upper: dict[int, OrdTerm] = {}
        self._value: dict[int, CntTerm] = {}

    def upper_base_term(self, b: int, n: int) -> OrdTerm:
        return o_from_digits(b, self.value, n)

    def upper(self, n: int) -> OrdTerm:
        if n < 0:
            raise ValueError(f"cannot interpret {n}")
        hit = self._upper.get(n)
        if hit is not None:
            return hit
        if n < self.base.min_base:
            out = fin_ord(n)
        else:
            out = self.upper_base_term(self.base.upper_base(n), n)
        self._upper[n] = out
        return out

    def value(self, n: int) -> CntTerm:
        hit = self._value.get(n)
        if hit is not None:
            return hit
        if n < self.base.min_base:
            out = fin_cnt(n)
        else:
            out = psi(self.upper(n))
        self._value[n] = out
        return out

    # Normal forms.  A value is upper normal along b when every layer of its
    # decomposition is normal and each remainder stays under the monomial it
    # follows; it is normal outright when on top of that every hereditary
    # digit collapses strictly below the value itself.

    def is_upper_base_normal(self, b: int, n: int) -> bool:
        if n < self.base.min_base:
            return True
        if n < b:
            return self.is_normal(n)
        _, e, a, r = decompose(n, b)
        if not self.is_normal(a):
            return False
        if not (self.is_upper_normal(e) and self.is_upper_normal(r)):
            return False
        if r == 0:
            return True
        bound = omega_monomial(self.upper_base_term(b, e), CNT_ONE)
        return compare(self.upper_base_term(b, r), bound) < 0

    def is_upper_normal(self, n: int) -> bool:
        if n < self.base.min_base:
            return True
        return self.is_upper_base_normal(self.base.upper_base(n), n)

    def is_normal(self, n: int) -> bool:
        if n < self.base.min_base:
            return True
        if not self.is_upper_normal(n):
            return False
        own = self.value(n)
        b = self.base.upper_base(n)
        return all(compare_cnt(self.value(c), own) < 0 for c in digits(n, b))


class IotaProvenance(NamedTuple):
    """An index ordinal arriving with an integer realization in hand.

    value is the index itself, c realizes it (the psi value of c is the
    index), and digit_witness steps a single digit down by the index when
    the caller knows how; it may be omitted when no limit digit will be hit.
    """

    value: Index
    c: int
    digit_witness: Callable[[int], int] | None = None


def _digit_step(interp: PsiInterpretation, iota: IotaProvenance, d: int) -> int:
    val = interp.value(d)
    if val.is_zero():
        raise OrdinalError("cannot step a zero digit down")
    if val.is_finite():
        return d - 1
    if iota.digit_witness is None:
        raise OrdinalError(f"no digit witness available for {_short(d)}")
    return iota.digit_witness(d)


def fs_witness(
    interp: PsiInterpretation,
    b: int,
    s: int,
    iota: IotaProvenance,
    budget: BitBudget = DEFAULT_BUDGET,
) -> int:
    """An integer whose reading along b is a fundamental-sequence entry.

    Returns s2 with upper_base_term(b, s2) equal to the entry of
    upper_base_term(b, s) at iota.value.  The index must be finite unless
    the reading of s is uncountably cofinal, and the provenance integer must
    actually realize the index.
    """
    term = interp.upper_base_term(b, s)
    cof = cofinality(term)
    if cof is Cofinality.ZERO:
        raise OrdinalError("cannot step zero down")
    if cof is not Cofinality.BIG_OMEGA and not isinstance(iota.value, int):
        raise OrdinalError(
            f"index {iota.value!r} is not finite but the reading of "
            f"{_short(s)} is not uncountably cofinal"
        )
    want = fin_cnt(iota.value) if isinstance(iota.value, int) else iota.value
    if interp.value(iota.c) != want:
        raise OrdinalError(f"provenance {iota.c} does not realize the index")
    return _fs_witness(interp, b, s, iota, budget)


def _fs_witness(
    interp: PsiInterpretation,
    b: int,
    s: int,
    iota: IotaProvenance,
    budget: BitBudget,
) -> int:
    if s < b:
        return _digit_step(interp, iota, s)
    if s == b:
        return iota.c
    _, e, a, r = decompose(s, b)
    if r > 0:
        return budget.check((s - r) + _fs_witness(interp, b, r, iota, budget))
    alpha = interp.value(a)
    block = s // a
    if alpha == CNT_ONE:
        # s is exactly a power of b; step inside the exponent
        eta = interp.upper_base_term(b, e)
        if e >= b:
            new_e = _fs_witness(interp, b, e, iota, budget)
        else:
            new_e = _digit_step(interp, iota, e)
        if eta.tail.fin > 0:
            return budget.check(budget.pow(b, new_e) * iota.c)
        return budget.pow(b, new_e)
    if alpha.is_finite():
        return budget.check(block * (a - 1) + _fs_witness(interp, b, block, iota, budget))
    if alpha.fin > 0:
        raise OrdinalError(f"digit {_short(a)} has a mixed successor value")
    return budget.check(block * _digit_step(interp, iota, a))


def majorize_witness(
    base: Hierarchy | Iterable[int],
    k: int,
    n: int,
    i: int,
    budget: BitBudget = DEFAULT_BUDGET,
    plus: PlusHierarchy | None = None,
) -> int:
    """An integer realizing the i-th entry under the psi value of n.

    Over the k-th successor of the base hierarchy, the psi value of the
    returned integer is the i-th fundamental-sequence entry of the psi value
    of n, which the upgrade preserves.  The index must stay below both the
    minimum base and k + 2, and n must be in normal form.
    """
    B = _coerce(base)
    if plus is None:
        plus = PlusHierarchy(B, k, budget=budget)
    if not 0 <= i < min(B.min_base, k + 2):
        raise ValueError(f"index {i} is out of range for this hierarchy pair")
    if n == 0:
        return 0
    if n < B.min_base:
        return n - 1
    side_b = PsiInterpretation(B)
    if not side_b.is_normal(n):
        raise OrdinalError(f"{_short(n)} is not in normal form over {B!r}")
    if n in B:
        return i
    side_c = PsiInterpretation(plus)
    zeta = side_b.upper(n)
    cof = cofinality(zeta)
    if cof is not Cofinality.BIG_OMEGA:
        pre = {plus.upgrade_value(x): x for x in digits(n, B.upper_base(n))}

        def step_digit(v: int) -> int:
            if v not in pre:
                raise OrdinalError(f"no digit witness for {_short(v)}")
            return majorize_witness(B, k, pre[v], i, budget, plus)

        s = plus.upgrade_value(n)
        chosen = plus.chosen_base(n)
        assert chosen is not None
        return fs_witness(side_c, chosen, s, IotaProvenance(i, i, step_digit), budget)
    if not B.is_critical(n):
        raise OrdinalError(
            f"{_short(n)} reads as uncountably cofinal but is not critical"
        )
    d = plus.d_sequence(n)
    pre = {plus.upgrade_value(x): x for x in digits(n, B.upper_base(n))}
    cur = 0
    for j in range(i):
        iota_val = side_c.value(cur)
        zi = fund_seq(zeta, iota_val)
        if zi.is_countable():
            t = zi.tail
            if t == CNT_ZERO:
                cur = 0
            elif t == CNT_ONE:
                cur = 1
            else:
                raise OrdinalError(
                    f"no witness for countable entry {t!r} at round {j}"
                )
            continue
        witness = None
        if cur < min(B.min_base, k + 2):
            bound_i = cur

            def witness(v: int, _i: int = bound_i) -> int:
                if v not in pre:
                    raise OrdinalError(f"no digit witness for {_short(v)}")
                return majorize_witness(B, k, pre[v], _i, budget, plus)

        s = d[j + 1] if j < k else plus.upgrade_value(n)
        cur = fs_witness(side_c, d[j], s, IotaProvenance(iota_val, cur, witness), budget)
    return cur
