"""Ordinal term calculus: comparison laws, fundamental sequences, grammar."""

import pytest
from hypothesis import given, settings, strategies as st

from fractal_goodstein.numerals import BudgetExceededError
from fractal_goodstein.ordinal_terms import (
    BIG_OMEGA,
    CNT_ONE,
    CNT_ZERO,
    OMEGA,
    OMEGA_ORD,
    ONE,
    ZERO,
    Cofinality,
    CntTerm,
    OrdinalError,
    OrdTerm,
    as_cnt,
    big_f,
    cnt_add,
    cofinality,
    compare,
    compare_cnt,
    fin_cnt,
    fin_ord,
    fund_seq,
    fund_seq_cnt,
    is_psi_normal_form,
    lift,
    max_coefficient,
    natural_sum,
    natural_sum_cnt,
    omega_monomial,
    omega_tower,
    ord_add,
    parse_term,
    plus_big_omega,
    psi,
    step_down,
    term_to_str,
    theta,
)

W_W = omega_monomial(BIG_OMEGA, CNT_ONE)  # Omega^Omega


def s(t):
    return term_to_str(t if isinstance(t, OrdTerm) else lift(t))


# --- factories and canonicalization ---------------------------------------


def test_factory_canonicalization():
    assert theta(ZERO) == CNT_ONE
    assert theta(ONE) == OMEGA
    assert psi(BIG_OMEGA) == OMEGA
    assert psi(fin_ord(7)) == fin_cnt(7)  # collapse is the identity below Omega
    assert as_cnt(lift(OMEGA)) == OMEGA
    assert lift(CNT_ZERO) == ZERO


def test_as_cnt_rejects_uncountable():
    with pytest.raises(OrdinalError):
        as_cnt(BIG_OMEGA)


def test_omega_monomial_folding():
    assert omega_monomial(ZERO, fin_cnt(3)) == fin_ord(3)
    assert s(omega_monomial(ONE, CNT_ONE)) == "W^1*1"
    with pytest.raises(OrdinalError):
        OrdTerm(((ONE, CNT_ZERO),), CNT_ZERO)  # zero coefficient


def test_omega_tower():
    assert omega_tower(0) == ONE
    assert omega_tower(1) == BIG_OMEGA
    assert omega_tower(2) == W_W
    assert s(omega_tower(3)) == "W^(W^(W^1*1)*1)*1"


# --- comparison -------------------------------------------------------------


def test_compare_fixtures():
    chain = [
        ZERO,
        ONE,
        fin_ord(5),
        OMEGA_ORD,
        lift(theta(BIG_OMEGA)),
        lift(theta(natural_sum(BIG_OMEGA, ONE))),
        BIG_OMEGA,
        natural_sum(BIG_OMEGA, OMEGA_ORD),
        W_W,
    ]
    for i, a in enumerate(chain):
        for j, b in enumerate(chain):
            assert compare(a, b) == (i > j) - (i < j)


def test_omega_is_least_infinite_atom():
    assert compare_cnt(OMEGA, theta(BIG_OMEGA)) < 0
    assert compare_cnt(OMEGA, psi(W_W)) < 0
    assert compare_cnt(OMEGA, psi(BIG_OMEGA)) == 0  # p(W) collapses to w


def test_mixed_collapse_comparison_is_an_error():
    with pytest.raises(OrdinalError):
        compare_cnt(theta(BIG_OMEGA), psi(W_W))


def _atoms_theta(depth):
    # pieces are countable terms built from w and v-collapses
    if depth == 0:
        return st.just(OMEGA)
    sub = _cnt_terms(depth - 1, _atoms_theta)
    return st.one_of(
        st.just(OMEGA),
        st.builds(
            lambda c, use: theta(natural_sum(BIG_OMEGA, lift(c)) if use else lift(c)),
            sub,
            st.booleans(),
        ),
    )


def _atoms_psi(depth):
    if depth == 0:
        return st.just(OMEGA)
    sub = _cnt_terms(depth - 1, _atoms_psi)
    return st.one_of(
        st.just(OMEGA),
        st.builds(
            lambda c, k: psi(natural_sum(omega_tower(k), lift(c))),
            sub,
            st.integers(min_value=1, max_value=2),
        ),
    )


def _cnt_terms(depth, family):
    pieces = st.lists(family(depth), max_size=4)
    fins = st.integers(min_value=0, max_value=4)

    def build(parts, fin):
        out = CntTerm((), fin)
        for p in parts:
            out = natural_sum_cnt(out, p)
        return out

    return st.builds(build, pieces, fins)


@settings(max_examples=300)
@given(_cnt_terms(3, _atoms_theta), _cnt_terms(3, _atoms_theta), _cnt_terms(3, _atoms_theta))
def test_compare_is_a_total_order_theta(a, b, c):
    # trichotomy
    assert compare_cnt(a, b) == -compare_cnt(b, a)
    assert (compare_cnt(a, b) == 0) == (a == b)
    # transitivity
    if compare_cnt(a, b) <= 0 and compare_cnt(b, c) <= 0:
        assert compare_cnt(a, c) <= 0


@settings(max_examples=300)
@given(_cnt_terms(3, _atoms_psi), _cnt_terms(3, _atoms_psi), _cnt_terms(3, _atoms_psi))
def test_compare_is_a_total_order_psi(a, b, c):
    assert compare_cnt(a, b) == -compare_cnt(b, a)
    assert (compare_cnt(a, b) == 0) == (a == b)
    if compare_cnt(a, b) <= 0 and compare_cnt(b, c) <= 0:
        assert compare_cnt(a, c) <= 0


# --- arithmetic -------------------------------------------------------------


def test_ord_add_absorbs_on_the_left():
    assert ord_add(ONE, OMEGA_ORD) == OMEGA_ORD
    assert ord_add(fin_ord(3), BIG_OMEGA) == BIG_OMEGA
    assert s(ord_add(BIG_OMEGA, ONE)) == "W^1*1+1"
    assert cnt_add(CNT_ONE, OMEGA) == OMEGA
    assert s(cnt_add(OMEGA, CNT_ONE)) == "w+1"


@settings(max_examples=300)
@given(_cnt_terms(2, _atoms_theta), _cnt_terms(2, _atoms_theta))
def test_natural_sum_commutes(a, b):
    assert natural_sum_cnt(a, b) == natural_sum_cnt(b, a)


@settings(max_examples=200)
@given(_cnt_terms(2, _atoms_psi), _cnt_terms(2, _atoms_psi))
def test_natural_sum_dominates_both_arguments(a, b):
    total = natural_sum_cnt(a, b)
    assert compare_cnt(total, a) >= 0
    assert compare_cnt(total, b) >= 0


def test_plus_big_omega_and_max_coefficient():
    assert plus_big_omega(W_W) == natural_sum(W_W, BIG_OMEGA)
    assert plus_big_omega(ZERO) == BIG_OMEGA
    assert max_coefficient(natural_sum(BIG_OMEGA, fin_ord(3))) == fin_cnt(3)
    assert max_coefficient(omega_monomial(lift(theta(BIG_OMEGA)), fin_cnt(2))) == theta(BIG_OMEGA)


# --- cofinality and fundamental sequences -----------------------------------


def test_cofinality():
    assert cofinality(ZERO) is Cofinality.ZERO
    assert cofinality(ONE) is Cofinality.SUCCESSOR
    assert cofinality(natural_sum(BIG_OMEGA, ONE)) is Cofinality.SUCCESSOR
    assert cofinality(OMEGA_ORD) is Cofinality.OMEGA
    assert cofinality(natural_sum(BIG_OMEGA, OMEGA_ORD)) is Cofinality.OMEGA
    assert cofinality(BIG_OMEGA) is Cofinality.BIG_OMEGA
    assert cofinality(W_W) is Cofinality.BIG_OMEGA


def test_fund_seq_fixtures():
    assert fund_seq(BIG_OMEGA, 0) == ZERO
    assert fund_seq(BIG_OMEGA, 7) == fin_ord(7)
    # indexing Omega by a countable term keeps the term
    assert fund_seq(BIG_OMEGA, theta(BIG_OMEGA)) == lift(theta(BIG_OMEGA))
    assert fund_seq(W_W, 0) == ONE
    assert fund_seq(W_W, theta(BIG_OMEGA)) == omega_monomial(lift(theta(BIG_OMEGA)), CNT_ONE)
    assert fund_seq(omega_tower(3), 0) == BIG_OMEGA
    assert fund_seq(omega_tower(4), 0) == W_W
    assert fund_seq(W_W, 1) == BIG_OMEGA


def test_fund_seq_successor_steps_to_predecessor():
    assert fund_seq(natural_sum(BIG_OMEGA, ONE), 5) == BIG_OMEGA
    assert fund_seq_cnt(cnt_add(OMEGA, CNT_ONE), 3) == OMEGA
    assert fund_seq(ZERO, 1) == ZERO


def test_fund_seq_psi_diagonal():
    u = psi(W_W)
    assert fund_seq_cnt(u, 1) == CNT_ONE
    assert fund_seq_cnt(u, 2) == OMEGA
    assert fund_seq_cnt(u, 3) == psi(omega_monomial(OMEGA_ORD, CNT_ONE))


def test_fund_seq_rejects_theta_atoms():
    with pytest.raises(OrdinalError):
        fund_seq_cnt(theta(natural_sum(BIG_OMEGA, ONE)), 2)


@settings(max_examples=300)
@given(_cnt_terms(3, _atoms_psi), st.integers(min_value=0, max_value=5))
def test_fund_seq_strictly_descends(c, k):
    if c.is_zero():
        return
    stepped = fund_seq_cnt(c, k)
    assert compare_cnt(stepped, c) < 0


def test_step_down_fixtures():
    assert [s(t) for t in step_down(lift(OMEGA))] == ["w", "1", "0"]
    assert [s(t) for t in step_down(psi(W_W))] == ["p(W^(W^1*1)*1)", "1", "0"]
    capped = step_down(lift(psi(omega_tower(3))), upto=2)
    assert len(capped) == 3 and not capped[-1].is_zero()


def test_big_f_small_values():
    # hand oracle for the first two descents:
    #   F(0): p(1) = 1, then 1[1] = 0, so one step.
    assert lift(psi(omega_tower(0))) == ONE
    assert fund_seq(ONE, 1) == ZERO
    assert big_f(0) == 1
    #   F(1): p(W) = w, w[1] = 1, 1[2] = 0, so two steps.
    assert lift(psi(omega_tower(1))) == lift(OMEGA)
    assert fund_seq(lift(OMEGA), 1) == ONE
    assert fund_seq(ONE, 2) == ZERO
    assert big_f(1) == 2
    assert [big_f(n) for n in range(5)] == [1, 2, 2, 4, 6]


def test_big_f_exhausts_budget():
    with pytest.raises(BudgetExceededError):
        big_f(5)


# --- normal forms -----------------------------------------------------------


def test_is_psi_normal_form():
    assert is_psi_normal_form(W_W)
    assert is_psi_normal_form(omega_tower(3))
    assert is_psi_normal_form(BIG_OMEGA)
    assert is_psi_normal_form(lift(OMEGA))  # countable: nothing to check
    # W + p(W^W) has a coefficient the collapse cannot dominate
    assert not is_psi_normal_form(natural_sum(BIG_OMEGA, lift(psi(W_W))))


# --- grammar ----------------------------------------------------------------

ROUND_TRIP = [
    "0",
    "1",
    "7",
    "w",
    "w+1",
    "w+w",
    "W^1*1",
    "W^1*1+1",
    "W^(W^1*1)*1",
    "W^(W^1*1)*2+W^1*v(W^1*1)+w",
    "v(W^1*1)",
    "v(W^1*1+v(W^1*1)+w)",
    "p(W^(W^1*1)*1)",
    "p(W^(W^1*1)*1)*3+2",
    "W^w*1",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_parse_print_round_trip(text):
    assert term_to_str(parse_term(text)) == text


def test_parse_canonicalizes():
    assert term_to_str(parse_term("v(0)*3")) == "3"  # v(0) = 1
    assert term_to_str(parse_term("3+w")) == "w"  # left absorption
    assert parse_term("w+w+w") == lift(cnt_add(cnt_add(OMEGA, OMEGA), OMEGA))


@pytest.mark.parametrize("bad", ["W^", "v 1", "", "w+", "(w)", "W^1", "p()", "w*"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(OrdinalError):
        parse_term(bad)


def test_parse_multiplicity_cap():
    with pytest.raises(OrdinalError):
        parse_term("v(1)*2000000")


@settings(max_examples=300)
@given(_cnt_terms(3, _atoms_psi))
def test_round_trip_is_exact(c):
    t = lift(c)
    assert parse_term(term_to_str(t)) == t


def test_deep_terms_hit_the_depth_budget():
    with pytest.raises(BudgetExceededError):
        cur = OMEGA
        for _ in range(100):
            cur = theta(natural_sum(BIG_OMEGA, lift(cur)))
