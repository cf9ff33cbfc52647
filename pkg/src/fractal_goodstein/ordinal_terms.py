"""Term calculus for ordinals below the Bachmann-Howard ordinal.

Terms are two-sorted.  An OrdTerm is a sum of Omega-monomials plus a
countable tail; a CntTerm (countable term) is a sum of atom copies plus
a finite part.  Atoms are the countable building blocks: the distinguished
omega, and collapses v(.) and p(.) of OrdTerms.

The two collapse flavors live in disjoint universes that share this one
skeleton: v-atoms certify termination, p-atoms witness lower bounds.
Comparing a v-atom with a p-atom is a type error by design.

All terms are immutable, canonical at construction, and sized; building
a term above the node or depth budget raises BudgetExceededError.  The
depth budget matters independently: iterated collapses nest fast, and a
deep-but-narrow term would otherwise overflow the interpreter stack in
comparison or printing long before the node count became suspicious.
"""

from __future__ import annotations

import enum
import re
from typing import Iterator, Union

from .numerals import BudgetExceededError

__all__ = [
    "TERM_NODE_BUDGET",
    "TERM_DEPTH_BUDGET",
    "OrdinalError",
    "Atom",
    "CntTerm",
    "OrdTerm",
    "CNT_ZERO",
    "CNT_ONE",
    "ZERO",
    "ONE",
    "OMEGA",
    "OMEGA_ORD",
    "BIG_OMEGA",
    "fin_cnt",
    "fin_ord",
    "lift",
    "as_cnt",
    "theta",
    "psi",
    "omega_monomial",
    "omega_tower",
    "compare",
    "compare_cnt",
    "natural_sum",
    "natural_sum_cnt",
    "ord_add",
    "cnt_add",
    "plus_big_omega",
    "max_coefficient",
    "Cofinality",
    "cofinality",
    "fund_seq",
    "fund_seq_cnt",
    "step_down",
    "big_f",
    "is_psi_normal_form",
    "term_to_str",
    "parse_term",
]

# Guards against runaway term growth (iterated collapses can nest quickly).
# The depth bound must stay far below the interpreter recursion limit.
TERM_NODE_BUDGET = 10_000
TERM_DEPTH_BUDGET = 200


class OrdinalError(Exception):
    """Structural misuse of the term calculus."""


def _check_size(size: int) -> int:
    if size > TERM_NODE_BUDGET:
        raise BudgetExceededError(
            f"term of {size} nodes exceeds budget of {TERM_NODE_BUDGET} nodes"
        )
    return size


def _check_depth(depth: int) -> int:
    if depth > TERM_DEPTH_BUDGET:
        raise BudgetExceededError(
            f"term of depth {depth} exceeds budget of {TERM_DEPTH_BUDGET} levels"
        )
    return depth


class Atom:
    """A countable building block: omega, or a collapse of an OrdTerm."""

    __slots__ = ("kind", "arg", "size", "depth", "_hash")

    def __init__(self, kind: str, arg: "OrdTerm | None") -> None:
        self.kind = kind
        self.arg = arg
        self.size = _check_size(1 + (arg.size if arg is not None else 0))
        self.depth = _check_depth(1 + (arg.depth if arg is not None else 0))
        self._hash = hash(("atom", kind, arg))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Atom):
            return NotImplemented
        return self.kind == other.kind and self.arg == other.arg

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.kind == "omega":
            return "w"
        tag = "v" if self.kind == "theta" else "p"
        return f"{tag}({self.arg!r})"


class CntTerm:
    """Countable term: atom copies in strictly decreasing order plus a finite part."""

    __slots__ = ("parts", "fin", "size", "depth", "_hash")

    def __init__(self, parts: tuple[tuple[Atom, int], ...], fin: int) -> None:
        if fin < 0:
            raise OrdinalError("finite part cannot be negative")
        if any(m < 1 for _, m in parts):
            raise OrdinalError("atom multiplicities must be positive")
        self.parts = parts
        self.fin = fin
        self.size = _check_size(1 + sum(a.size for a, _ in parts))
        self.depth = _check_depth(1 + max((a.depth for a, _ in parts), default=0))
        self._hash = hash(("cnt", parts, fin))

    def is_zero(self) -> bool:
        return not self.parts and self.fin == 0

    def is_finite(self) -> bool:
        return not self.parts

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, CntTerm):
            return NotImplemented
        return self.fin == other.fin and self.parts == other.parts

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return term_to_str(lift(self))


class OrdTerm:
    """Sum of Omega-monomials (exponents strictly decreasing) plus a countable tail."""

    __slots__ = ("monos", "tail", "size", "depth", "_hash")

    def __init__(self, monos: tuple[tuple["OrdTerm", CntTerm], ...], tail: CntTerm) -> None:
        for exp, coeff in monos:
            if exp.is_zero() or coeff.is_zero():
                raise OrdinalError("monomials need nonzero exponent and coefficient")
        self.monos = monos
        self.tail = tail
        self.size = _check_size(
            1 + sum(e.size + c.size for e, c in monos) + tail.size
        )
        deepest = max((max(e.depth, c.depth) for e, c in monos), default=0)
        self.depth = _check_depth(1 + max(deepest, tail.depth))
        self._hash = hash(("ord", monos, tail))

    def is_zero(self) -> bool:
        return not self.monos and self.tail.is_zero()

    def is_countable(self) -> bool:
        return not self.monos

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, OrdTerm):
            return NotImplemented
        return self.tail == other.tail and self.monos == other.monos

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return term_to_str(self)


# canonical constants
_OMEGA_ATOM = Atom("omega", None)
CNT_ZERO = CntTerm((), 0)
CNT_ONE = CntTerm((), 1)
OMEGA = CntTerm(((_OMEGA_ATOM, 1),), 0)
ZERO = OrdTerm((), CNT_ZERO)
ONE = OrdTerm((), CNT_ONE)
OMEGA_ORD = OrdTerm((), OMEGA)
BIG_OMEGA = OrdTerm(((ONE, CNT_ONE),), CNT_ZERO)


def fin_cnt(n: int) -> CntTerm:
    if n < 0:
        raise OrdinalError("finite terms are nonnegative")
    return CntTerm((), n)


def fin_ord(n: int) -> OrdTerm:
    return OrdTerm((), fin_cnt(n))


def lift(c: CntTerm) -> OrdTerm:
    """Embed a countable term as an OrdTerm."""
    return OrdTerm((), c)


def as_cnt(x: OrdTerm) -> CntTerm:
    """Project a countable OrdTerm back to its tail."""
    if x.monos:
        raise OrdinalError(f"{x!r} is uncountable")
    return x.tail


def theta(arg: OrdTerm) -> CntTerm:
    """v-collapse of arg; v(0) = 1 and v(1) = omega are folded in."""
    if arg.is_zero():
        return CNT_ONE
    if arg == ONE:
        return OMEGA
    return CntTerm(((Atom("theta", arg), 1),), 0)


def psi(arg: OrdTerm) -> CntTerm:
    """p-collapse of arg; countable arguments are fixed and p(Omega) = omega."""
    if arg.is_countable():
        return arg.tail
    if arg == BIG_OMEGA:
        return OMEGA
    return CntTerm(((Atom("psi", arg), 1),), 0)


def omega_monomial(exp: OrdTerm, coeff: CntTerm) -> OrdTerm:
    """Omega^exp * coeff as a term; degenerate cases fold away."""
    if coeff.is_zero():
        return ZERO
    if exp.is_zero():
        return lift(coeff)
    return OrdTerm(((exp, coeff),), CNT_ZERO)


def omega_tower(k: int) -> OrdTerm:
    """Omega^^k: a tower of k Omegas (k = 0 gives 1)."""
    out = ONE
    for _ in range(k):
        out = omega_monomial(out, CNT_ONE)
    return out


# --- comparison ---------------------------------------------------------


def _compare_atoms(a: Atom, b: Atom) -> int:
    if a is b or a == b:
        return 0
    if a.kind == "omega":
        return -1  # omega sits below every collapse atom with argument >= Omega
    if b.kind == "omega":
        return 1
    if a.kind != b.kind:
        raise OrdinalError(
            "cannot compare a v-collapse with a p-collapse: the two "
            "interpretations never mix"
        )
    if a.kind == "psi":
        # p-atoms compare by argument alone
        return compare(a.arg, b.arg)
    # v-atoms: order reflects argument order exactly when the smaller
    # argument's maximal coefficient stays below the larger collapse
    c = compare(a.arg, b.arg)
    if c < 0:
        return -1 if compare_cnt(max_coefficient(a.arg), CntTerm(((b, 1),), 0)) < 0 else 1
    return 1 if compare_cnt(max_coefficient(b.arg), CntTerm(((a, 1),), 0)) < 0 else -1


def compare_cnt(x: CntTerm, y: CntTerm) -> int:
    """Strict total order on countable terms of one flavor: -1, 0, or 1."""
    for (a1, m1), (a2, m2) in zip(x.parts, y.parts):
        c = _compare_atoms(a1, a2)
        if c:
            return c
        if m1 != m2:
            return -1 if m1 < m2 else 1
    if len(x.parts) != len(y.parts):
        return -1 if len(x.parts) < len(y.parts) else 1
    if x.fin != y.fin:
        return -1 if x.fin < y.fin else 1
    return 0


def compare(x: OrdTerm, y: OrdTerm) -> int:
    """Strict total order on OrdTerms of one flavor: -1, 0, or 1."""
    for (e1, c1), (e2, c2) in zip(x.monos, y.monos):
        c = compare(e1, e2)
        if c:
            return c
        c = compare_cnt(c1, c2)
        if c:
            return c
    if len(x.monos) != len(y.monos):
        return -1 if len(x.monos) < len(y.monos) else 1
    return compare_cnt(x.tail, y.tail)


def _cnt_max(*terms: CntTerm) -> CntTerm:
    best = terms[0]
    for t in terms[1:]:
        if compare_cnt(best, t) < 0:
            best = t
    return best


def max_coefficient(x: OrdTerm) -> CntTerm:
    """Largest countable coefficient occurring hereditarily in x."""
    best = x.tail
    for exp, coeff in x.monos:
        best = _cnt_max(best, coeff, max_coefficient(exp))
    return best


# --- sums ----------------------------------------------------------------


def natural_sum_cnt(x: CntTerm, y: CntTerm) -> CntTerm:
    """Commutative merge of countable terms."""
    merged: list[tuple[Atom, int]] = []
    i = j = 0
    while i < len(x.parts) and j < len(y.parts):
        a1, m1 = x.parts[i]
        a2, m2 = y.parts[j]
        c = _compare_atoms(a1, a2)
        if c == 0:
            merged.append((a1, m1 + m2))
            i += 1
            j += 1
        elif c > 0:
            merged.append((a1, m1))
            i += 1
        else:
            merged.append((a2, m2))
            j += 1
    merged.extend(x.parts[i:])
    merged.extend(y.parts[j:])
    return CntTerm(tuple(merged), x.fin + y.fin)


def natural_sum(x: OrdTerm, y: OrdTerm) -> OrdTerm:
    """Commutative merge of OrdTerms, strictly monotone in both arguments."""
    merged: list[tuple[OrdTerm, CntTerm]] = []
    i = j = 0
    while i < len(x.monos) and j < len(y.monos):
        e1, c1 = x.monos[i]
        e2, c2 = y.monos[j]
        c = compare(e1, e2)
        if c == 0:
            merged.append((e1, natural_sum_cnt(c1, c2)))
            i += 1
            j += 1
        elif c > 0:
            merged.append((e1, c1))
            i += 1
        else:
            merged.append((e2, c2))
            j += 1
    merged.extend(x.monos[i:])
    merged.extend(y.monos[j:])
    return OrdTerm(tuple(merged), natural_sum_cnt(x.tail, y.tail))


def cnt_add(x: CntTerm, y: CntTerm) -> CntTerm:
    """Ordinal addition on countable terms: x-pieces below y's lead are absorbed."""
    if not y.parts:
        return CntTerm(x.parts, x.fin + y.fin)
    lead = y.parts[0][0]
    kept: list[tuple[Atom, int]] = []
    boundary = 0
    for atom, mult in x.parts:
        c = _compare_atoms(atom, lead)
        if c > 0:
            kept.append((atom, mult))
        elif c == 0:
            boundary = mult
            break
        else:
            break
    rest = list(y.parts)
    if boundary:
        rest[0] = (lead, rest[0][1] + boundary)
    return CntTerm(tuple(kept) + tuple(rest), y.fin)


def ord_add(x: OrdTerm, y: OrdTerm) -> OrdTerm:
    """Ordinal addition on OrdTerms, absorbing as usual."""
    if y.is_zero():
        return x
    if not y.monos:
        return OrdTerm(x.monos, cnt_add(x.tail, y.tail))
    lead = y.monos[0][0]
    kept: list[tuple[OrdTerm, CntTerm]] = []
    boundary: CntTerm | None = None
    for exp, coeff in x.monos:
        c = compare(exp, lead)
        if c > 0:
            kept.append((exp, coeff))
        elif c == 0:
            boundary = coeff
            break
        else:
            break
    rest = list(y.monos)
    if boundary is not None:
        rest[0] = (lead, cnt_add(boundary, rest[0][1]))
    return OrdTerm(tuple(kept) + tuple(rest), y.tail)


def plus_big_omega(x: OrdTerm) -> OrdTerm:
    """x + Omega: used for the left-additive base comparisons."""
    return ord_add(x, BIG_OMEGA)


# --- cofinality and fundamental sequences --------------------------------


class Cofinality(enum.Enum):
    ZERO = "zero"
    SUCCESSOR = "successor"
    OMEGA = "omega"
    BIG_OMEGA = "Omega"


def _cofinality_cnt(c: CntTerm) -> Cofinality:
    if c.is_zero():
        return Cofinality.ZERO
    if c.fin > 0:
        return Cofinality.SUCCESSOR
    return Cofinality.OMEGA


def cofinality(x: OrdTerm) -> Cofinality:
    """Which index type the fundamental sequence of x consumes."""
    if not x.monos:
        return _cofinality_cnt(x.tail)
    if not x.tail.is_zero():
        return _cofinality_cnt(x.tail)
    alpha, beta = x.monos[-1]
    if beta.fin == 0:
        return Cofinality.OMEGA  # countable limit coefficient
    # coefficient is a successor: the exponent decides
    if alpha.tail.fin > 0:
        return Cofinality.BIG_OMEGA  # successor exponent
    return cofinality(alpha)


Index = Union[int, CntTerm]


def _as_finite_index(idx: Index) -> int:
    if isinstance(idx, CntTerm):
        if not idx.is_finite():
            raise OrdinalError(
                f"this position has countable cofinality; index {idx!r} is too large"
            )
        return idx.fin
    if idx < 0:
        raise OrdinalError("indices are nonnegative")
    return idx


def _as_cnt_index(idx: Index) -> CntTerm:
    if isinstance(idx, CntTerm):
        return idx
    if idx < 0:
        raise OrdinalError("indices are nonnegative")
    return fin_cnt(idx)


def _pred_cnt(c: CntTerm) -> CntTerm:
    return CntTerm(c.parts, c.fin - 1)


def _pred_ord(x: OrdTerm) -> OrdTerm:
    return OrdTerm(x.monos, _pred_cnt(x.tail))


def _psi_atom_fund_seq(atom: Atom, idx: Index) -> CntTerm:
    zeta = atom.arg
    assert zeta is not None
    cof = cofinality(zeta)
    if cof is Cofinality.BIG_OMEGA:
        # diagonal descent: xi[0] = 0, xi[k+1] = p(zeta[xi[k]])
        steps = _as_finite_index(idx)
        cur = CNT_ZERO
        for _ in range(steps):
            cur = psi(fund_seq(zeta, cur))
        return cur
    # countable (or successor) argument cofinality: push the index inside
    return psi(fund_seq(zeta, idx))


def fund_seq_cnt(c: CntTerm, idx: Index) -> CntTerm:
    """Fundamental sequence member c[idx] for countable terms."""
    if c.is_zero():
        return CNT_ZERO
    if c.fin > 0:
        return _pred_cnt(c)
    prefix = c.parts[:-1]
    atom, mult = c.parts[-1]
    if mult > 1:
        head = CntTerm(prefix + ((atom, mult - 1),), 0)
    else:
        head = CntTerm(prefix, 0)
    if atom.kind == "omega":
        step = _as_cnt_index(idx)  # omega[i] = i
    elif atom.kind == "psi":
        step = _psi_atom_fund_seq(atom, idx)
    else:
        raise OrdinalError("v-collapses have no fundamental sequences")
    return cnt_add(head, step)


def fund_seq(x: OrdTerm, idx: Index) -> OrdTerm:
    """Fundamental sequence member x[idx]; zero and one both step to zero."""
    if x.is_zero():
        return ZERO
    if x.tail.fin > 0:
        return _pred_ord(x)  # successors step to their predecessor
    if not x.tail.is_zero():
        return OrdTerm(x.monos, fund_seq_cnt(x.tail, idx))
    if not x.monos:
        return lift(fund_seq_cnt(x.tail, idx))
    prefix = x.monos[:-1]
    alpha, beta = x.monos[-1]
    if beta.fin == 0:
        # limit coefficient: recurse inside it
        stepped = fund_seq_cnt(beta, _as_finite_index(idx))
        return ord_add(OrdTerm(prefix, CNT_ZERO), omega_monomial(alpha, stepped))
    delta = _pred_cnt(beta)
    head = ord_add(OrdTerm(prefix, CNT_ZERO), omega_monomial(alpha, delta))
    if alpha.tail.fin > 0:
        # successor exponent: Omega^(a+1)[iota] = Omega^a * iota
        part = omega_monomial(_pred_ord(alpha), _as_cnt_index(idx))
    else:
        # limit exponent: Omega^a[idx] = Omega^(a[idx])
        part = omega_monomial(fund_seq(alpha, idx), CNT_ONE)
    return ord_add(head, part)


def step_down(x: OrdTerm | CntTerm, upto: int | None = None) -> list[OrdTerm]:
    """Iterated descent x, x[1], (x[1])[2], ... until zero (or upto steps)."""
    if isinstance(x, CntTerm):
        x = lift(x)
    seq = [x]
    i = 1
    while not seq[-1].is_zero() and (upto is None or i <= upto):
        seq.append(fund_seq(seq[-1], i))
        i += 1
    return seq


def big_f(n: int) -> int:
    """Length of the iterated descent starting at p(Omega^^n)."""
    if n < 0:
        raise OrdinalError("big_f needs a nonnegative argument")
    cur = lift(psi(omega_tower(n)))
    i = 0
    while not cur.is_zero():
        cur = fund_seq(cur, i + 1)
        i += 1
    return i


def is_psi_normal_form(arg: OrdTerm) -> bool:
    """Whether p(arg) is in normal form: max coefficient of arg below p(arg)."""
    if arg.is_countable():
        return True  # collapse is the identity here, nothing to check
    value = psi(arg)
    return compare_cnt(max_coefficient(arg), value) < 0


# --- text grammar ---------------------------------------------------------
#
# ord := "0" | sum ; sum := prod ("+" prod)* ; prod := ("W^" exp "*")? cnt ;
# exp := "(" ord ")" | nat | "w" ; cnt := nat | "w" | ("v"|"p") "(" ord ")" ("*" nat)?
#
# Exponents other than bare naturals and "w" are parenthesized so the
# grammar stays unambiguous; the parser re-merges repeated "W^e*" pieces,
# making print/parse a bit-exact round trip.


def _atom_to_str(a: Atom) -> str:
    if a.kind == "omega":
        return "w"
    tag = "v" if a.kind == "theta" else "p"
    return f"{tag}({term_to_str(a.arg)})"


def _cnt_pieces(c: CntTerm) -> Iterator[str]:
    for atom, mult in c.parts:
        if atom.kind == "omega":
            for _ in range(mult):
                yield "w"
        elif mult == 1:
            yield _atom_to_str(atom)
        else:
            yield f"{_atom_to_str(atom)}*{mult}"
    if c.fin > 0:
        yield str(c.fin)


def _exp_to_str(e: OrdTerm) -> str:
    if not e.monos and e.tail.is_finite():
        return str(e.tail.fin)
    if e == OMEGA_ORD:
        return "w"
    return f"({term_to_str(e)})"


def term_to_str(x: OrdTerm) -> str:
    if x.is_zero():
        return "0"
    prods: list[str] = []
    for exp, coeff in x.monos:
        head = f"W^{_exp_to_str(exp)}*"
        for piece in _cnt_pieces(coeff):
            prods.append(head + piece)
    prods.extend(_cnt_pieces(x.tail))
    return "+".join(prods)


_TOKEN = re.compile(r"W\^|\d+|[wvp()*+]")


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens: list[str] = []
        pos = 0
        for m in _TOKEN.finditer(text):
            if text[pos : m.start()].strip():
                raise OrdinalError(f"cannot read term near {text[pos:m.start()]!r}")
            self.tokens.append(m.group())
            pos = m.end()
        if text[pos:].strip():
            raise OrdinalError(f"cannot read term near {text[pos:]!r}")
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise OrdinalError("term ended unexpectedly")
        if expected is not None and tok != expected:
            raise OrdinalError(f"expected {expected!r}, found {tok!r}")
        self.i += 1
        return tok

    def parse_sum(self) -> OrdTerm:
        out = self.parse_prod()
        while self.peek() == "+":
            self.take("+")
            out = ord_add(out, self.parse_prod())
        return out

    def parse_prod(self) -> OrdTerm:
        if self.peek() == "W^":
            self.take("W^")
            exp = self.parse_exp()
            self.take("*")
            return omega_monomial(exp, self.parse_cnt())
        return lift(self.parse_cnt())

    def parse_exp(self) -> OrdTerm:
        tok = self.peek()
        if tok == "(":
            self.take("(")
            out = self.parse_sum()
            self.take(")")
            return out
        if tok == "w":
            self.take("w")
            return OMEGA_ORD
        if tok is not None and tok.isdigit():
            return fin_ord(int(self.take()))
        raise OrdinalError(f"expected an exponent, found {tok!r}")

    def parse_cnt(self) -> CntTerm:
        tok = self.peek()
        if tok is not None and tok.isdigit():
            return fin_cnt(int(self.take()))
        if tok == "w":
            self.take("w")
            return OMEGA
        if tok in ("v", "p"):
            self.take()
            self.take("(")
            arg = self.parse_sum()
            self.take(")")
            value = theta(arg) if tok == "v" else psi(arg)
            if self.peek() == "*":
                self.take("*")
                mult_tok = self.take()
                if not mult_tok.isdigit():
                    raise OrdinalError(f"expected a multiplicity, found {mult_tok!r}")
                mult = int(mult_tok)
                if mult > 1_000_000:
                    raise OrdinalError("multiplicity too large")
                scaled = CNT_ZERO
                for _ in range(mult):
                    scaled = cnt_add(scaled, value)
                value = scaled
            return value
        raise OrdinalError(f"expected a countable piece, found {tok!r}")


def parse_term(text: str) -> OrdTerm:
    """Parse the term grammar; inverse of term_to_str on its outputs."""
    text = text.strip()
    if text == "0":
        return ZERO
    parser = _Parser(text)
    out = parser.parse_sum()
    if parser.peek() is not None:
        raise OrdinalError(f"trailing input from {parser.peek()!r}")
    return out
