from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnslab import ktheory
from gnslab.errors import BrokenDivisibilityChain, NotDivisible
from gnslab.ktheory import INF, GroupExpr, SupernaturalNumber, UHFType

small_primes = st.sampled_from([2, 3, 5, 7])
exponents = st.one_of(st.integers(0, 4), st.just(INF))
supernaturals = st.dictionaries(small_primes, exponents, max_size=4).map(SupernaturalNumber.of)


def _rationals(n):
    """Random members of Q(n) with finite exponents capped at 3 for INF primes."""
    def build(num, pows):
        den = 1
        for p, e in n.exponents:
            cap = 3 if e == INF else e
            den *= p ** min(pows.get(p, 0), cap)
        return Fraction(num, den)

    return st.builds(build, st.integers(-50, 50),
                     st.dictionaries(small_primes, st.integers(0, 3)))


# supernatural numbers and types --------------------------------------------------

def test_supernatural_basics():
    n = SupernaturalNumber.of({2: INF, 3: 2})
    assert n.exponent(2) == INF and n.exponent(5) == 0
    assert n.infinite_primes() == frozenset({2})
    assert str(n) == "2^inf*3^2"
    assert str(SupernaturalNumber()) == "1"
    assert SupernaturalNumber.from_int(12) == SupernaturalNumber.of({2: 2, 3: 1})
    assert SupernaturalNumber.of({2: 0}) == SupernaturalNumber()
    with pytest.raises(ValueError):
        SupernaturalNumber.of({4: 1})
    with pytest.raises(ValueError):
        SupernaturalNumber.of({2: -1})


def test_sn_from_type_examples():
    t = UHFType((2, 4, 8), frozenset({2}))
    assert ktheory.sn_from_type(t) == SupernaturalNumber.of({2: INF})
    assert ktheory.sn_from_type(UHFType((6, 12, 36))) == SupernaturalNumber.of({2: 2, 3: 2})
    assert ktheory.sn_from_type(UHFType((1,))) == SupernaturalNumber()


def test_broken_chain():
    with pytest.raises(BrokenDivisibilityChain):
        UHFType((2, 6, 9))
    with pytest.raises(BrokenDivisibilityChain):
        UHFType((4, 4))
    with pytest.raises(BrokenDivisibilityChain):
        UHFType(())


# Q(n) ------------------------------------------------------------------------------

def test_q_contains_examples():
    two_inf = SupernaturalNumber.of({2: INF})
    assert ktheory.q_contains(two_inf, Fraction(3, 8))
    assert not ktheory.q_contains(two_inf, Fraction(1, 3))
    assert ktheory.q_contains(SupernaturalNumber.of({2: INF, 3: 1}), Fraction(5, 6))
    # reduction happens before the test
    assert ktheory.q_contains(SupernaturalNumber(), Fraction(6, 3))


def test_q_isomorphic_examples():
    a = SupernaturalNumber.of({2: INF})
    assert ktheory.q_isomorphic(a, SupernaturalNumber.of({2: INF, 3: 2}))
    assert not ktheory.q_isomorphic(a, SupernaturalNumber.of({3: INF}))
    assert ktheory.q_isomorphic(a, a)


@given(supernaturals, supernaturals)
def test_q_isomorphic_via_finite_multipliers(n, m):
    """n n' = m m' for finite n', m' exactly when the infinite parts agree."""
    primes = {p for p, _ in n.exponents} | {p for p, _ in m.exponents}
    # the finite multipliers that balance each finite exponent
    n_extra, m_extra = {}, {}
    possible = True
    for p in primes:
        a, b = n.exponent(p), m.exponent(p)
        if (a == INF) != (b == INF):
            possible = False
        elif a != INF:
            n_extra[p] = max(0, b - a)
            m_extra[p] = max(0, a - b)
    if possible:
        assert n * SupernaturalNumber.of(n_extra) == m * SupernaturalNumber.of(m_extra)
    assert ktheory.q_isomorphic(n, m) == possible


@given(st.data(), supernaturals)
def test_q_is_a_group(data, n):
    assert ktheory.q_contains(n, 1) and ktheory.q_contains(n, 0)
    for _ in range(25):
        a = data.draw(_rationals(n))
        b = data.draw(_rationals(n))
        assert ktheory.q_contains(n, a) and ktheory.q_contains(n, b)
        assert ktheory.q_contains(n, a - b)


def test_q_group_closure_many():
    import random

    rnd = random.Random(7)
    n = SupernaturalNumber.of({2: INF, 3: 2, 5: 1})
    dens = [2 ** i * 3 ** j * 5 ** k for i in range(8) for j in range(3) for k in range(2)]
    for _ in range(1000):
        a = Fraction(rnd.randint(-999, 999), rnd.choice(dens))
        b = Fraction(rnd.randint(-999, 999), rnd.choice(dens))
        assert ktheory.q_contains(n, a - b)


@given(supernaturals, supernaturals, st.integers(-30, 30), st.integers(1, 3000))
def test_monotonicity(n, m, num, den):
    big = n * m
    assert n.divides(big)
    q = Fraction(num, den)
    if ktheory.q_contains(n, q):
        assert ktheory.q_contains(big, q)


@pytest.mark.parametrize("sequence", [(6, 12, 36, 360), (1, 2, 8, 40, 1000), (7,)])
def test_union_form_exhaustive(sequence):
    n = ktheory.sn_from_type(UHFType(sequence))
    for den in range(1, 10_001):
        q = Fraction(1, den)
        assert ktheory.q_contains(n, q) == ktheory.union_form_contains(sequence, q)


# groups ------------------------------------------------------------------------------

def test_group_expr_grammar():
    for text in ("0", "Z", "Q(delta)", "Z x Q(delta)"):
        assert str(GroupExpr.parse(text)) == text
    assert GroupExpr.parse("Q(delta) x Z") == ktheory.Z_X_Q_DELTA
    with pytest.raises(ValueError):
        GroupExpr.parse("R")


@pytest.mark.parametrize("k", range(0, 8))
def test_homotopy_tables(k):
    u = ktheory.homotopy_group(k, "U")
    uw = ktheory.homotopy_group(k, "U_omega")
    if k % 2 == 0:
        assert str(u) == "0" and str(uw) == "0"
    else:
        assert str(u) == "Q(delta)"
        assert str(uw) == ("Z x Q(delta)" if k == 1 else "Q(delta)")


def test_k_theory_and_note():
    assert str(ktheory.k_theory(0)) == "Q(delta)"
    assert str(ktheory.k_theory(1)) == "0"
    note = ktheory.rational_pi1_note()
    assert note == {"rank_pi1_U": 1, "rank_pi1_U_omega": 2, "differ": True}
    with pytest.raises(ValueError):
        ktheory.k_theory(2)
    with pytest.raises(ValueError):
        ktheory.homotopy_group(-1)


# colimit matrices ------------------------------------------------------------------

@pytest.mark.parametrize("ni, nj", [(2, 8), (5, 5), (3, 12), (1, 7)])
def test_colimit_examples(ni, nj):
    assert ktheory.colimit_matrix_check(ni, nj)


@given(st.integers(1, 500), st.integers(1, 500))
def test_colimit_random(ni, k):
    assert ktheory.colimit_matrix_check(ni, ni * k)


def test_colimit_not_divisible():
    with pytest.raises(NotDivisible):
        ktheory.colimit_matrix_check(3, 8)
