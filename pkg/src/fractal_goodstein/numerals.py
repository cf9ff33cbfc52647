"""Exact arithmetic on hereditary base representations.

Everything here works on plain Python ints and never goes through
floating point.  A bit budget guards against materializing numbers so
wide that downstream work becomes infeasible.
"""

from __future__ import annotations

from typing import NamedTuple

__all__ = [
    "BudgetExceededError",
    "BitBudget",
    "DEFAULT_BUDGET",
    "Infinity",
    "INFINITY",
    "ExtNat",
    "Decomposition",
    "decompose",
    "digits",
    "base_change",
    "superexp",
]


class BudgetExceededError(Exception):
    """A computation would exceed the active budget."""


class BitBudget:
    """Cap on the bit length of any single value.

    The budget is stateless: it does not meter cumulative work, it only
    refuses to produce a number wider than ``bits`` bits.
    """

    __slots__ = ("bits",)

    def __init__(self, bits: int = 1 << 20) -> None:
        if bits < 1:
            raise ValueError("budget must allow at least one bit")
        self.bits = bits

    def check(self, n: int) -> int:
        if n.bit_length() > self.bits:
            raise BudgetExceededError(
                f"value of {n.bit_length()} bits exceeds budget of {self.bits} bits"
            )
        return n

    def pow(self, base: int, exp: int) -> int:
        # pre-guard: refuse before materializing anything astronomically wide
        if base >= 2 and (
            exp > self.bits or (base.bit_length() - 1) * exp > self.bits
        ):
            raise BudgetExceededError(
                f"{_short(base)}**{_short(exp)} exceeds budget of {self.bits} bits"
            )
        return self.check(base**exp)


def _short(n: int) -> str:
    # huge values cannot even be printed in full (int-to-str digit limits)
    if n.bit_length() <= 256:
        return str(n)
    return f"<{n.bit_length()}-bit integer>"


DEFAULT_BUDGET = BitBudget()


class Infinity:
    """Positive infinity for extended natural arithmetic.

    A dedicated singleton type rather than a sentinel integer, so it can
    never be confused with an actual value.  Comparisons with ints work
    in both directions.
    """

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Infinity)

    def __hash__(self) -> int:
        return hash("fractal_goodstein.Infinity")

    def __lt__(self, other: object):
        if isinstance(other, (int, Infinity)):
            return False
        return NotImplemented

    def __le__(self, other: object):
        if isinstance(other, Infinity):
            return True
        if isinstance(other, int):
            return False
        return NotImplemented

    def __gt__(self, other: object):
        if isinstance(other, int):
            return True
        if isinstance(other, Infinity):
            return False
        return NotImplemented

    def __ge__(self, other: object):
        if isinstance(other, (int, Infinity)):
            return True
        return NotImplemented


INFINITY = Infinity()

ExtNat = int | Infinity


def _floor_log(n: int, b: int) -> tuple[int, int]:
    """Largest e with b**e <= n, together with b**e.  Requires n >= 1, b >= 2."""
    # repeated squaring, then greedy descent: exact and logarithm-free
    squares = [b]
    while squares[-1] <= n // squares[-1]:
        squares.append(squares[-1] * squares[-1])
    e, power = 0, 1
    for i in range(len(squares) - 1, -1, -1):
        candidate = power * squares[i]
        if candidate <= n:
            power = candidate
            e += 1 << i
    return e, power


class Decomposition(NamedTuple):
    """n = base**exp * coeff + rest with 0 < coeff < base and rest < base**exp."""

    base: int
    exp: int
    coeff: int
    rest: int


def decompose(n: int, b: int) -> Decomposition:
    """Leading-term b-decomposition of n >= 1."""
    if b < 2:
        raise ValueError(f"base must be at least 2, got {b}")
    if n <= 0:
        raise ValueError(f"cannot decompose {n}: need a positive number")
    if n < b:
        return Decomposition(b, 0, n, 0)
    e, power = _floor_log(n, b)
    coeff, rest = divmod(n, power)
    return Decomposition(b, e, coeff, rest)


def digits(n: int, b: int) -> frozenset[int]:
    """All hereditary base-b digits of n, exponents included."""
    if b < 2:
        raise ValueError(f"base must be at least 2, got {b}")
    if n < 0:
        raise ValueError(f"cannot take digits of {n}")
    out: set[int] = set()
    visited: set[int] = set()
    stack = [n]
    while stack:
        m = stack.pop()
        if m < b:
            out.add(m)
            continue
        if m in visited:
            continue
        visited.add(m)
        _, e, a, r = decompose(m, b)
        stack += (e, a, r)
    return frozenset(out)


def base_change(n: int, b: int, c: int, budget: BitBudget = DEFAULT_BUDGET) -> int:
    """Rewrite n from hereditary base b to base c >= b, digits unchanged.

    Strictly monotone in n, the identity when c == b.
    """
    if b < 2:
        raise ValueError(f"base must be at least 2, got {b}")
    if c < b:
        raise ValueError(f"target base {c} must be at least the source base {b}")
    if n < 0:
        raise ValueError(f"cannot base-change {n}")
    budget.check(n)
    cache: dict[int, int] = {}

    # loop over monomials; recursion only on exponents (tower height stays tiny)
    def chi(m: int) -> int:
        if m < b:
            return m
        hit = cache.get(m)
        if hit is not None:
            return hit
        acc = 0
        rest = m
        while rest >= b:
            _, e, a, r = decompose(rest, b)
            acc = budget.check(acc + budget.pow(c, chi(e)) * a)
            rest = r
        result = acc + rest
        cache[m] = result
        return result

    return chi(n)


def superexp(x: int, y: int, budget: BitBudget = DEFAULT_BUDGET) -> int:
    """Iterated exponentiation: a tower of y copies of x."""
    if x < 0 or y < 0:
        raise ValueError("superexp needs nonnegative arguments")
    out = 1
    for _ in range(y):
        out = budget.pow(x, out)
    return out
