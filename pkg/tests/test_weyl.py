from math import factorial

import pytest
from hypothesis import given, strategies as st

from iwahori_h1.weyl import (Root, WeylElt, W_beta_prime, act, all_elements, bruhat_leq,
                             length, longest_element, min_coset_reps, omega_bar, omega_bar_inv,
                             parabolic_elements, positive_roots, reduced_word, simple_root,
                             violation_profile)


def perms(n):
    return st.permutations(list(range(1, n + 1))).map(lambda p: WeylElt(tuple(p)))


def s(n, *word):
    return WeylElt.from_word(n, word)


def test_act_examples():
    assert act(WeylElt.identity(2), Root(1, 2)) == Root(1, 2)
    assert act(s(2, 1), Root(1, 2)) == Root(2, 1)
    assert act(s(3, 2, 1), Root(1, 2)) == Root(3, 1)
    assert s(3, 2, 1) == omega_bar(3)


def test_lengths():
    assert length(WeylElt.identity(4)) == 0
    w, word = omega_bar_inv(3, 1)
    assert length(w) == 2
    assert length(longest_element(4)) == 6


def test_longest_element():
    assert longest_element(3, []) == WeylElt.identity(3)
    assert longest_element(3, [1, 2]) == WeylElt((3, 2, 1))
    assert longest_element(4, [1, 3]) == s(4, 1, 3)
    J = [1, 3]
    brute = max(parabolic_elements(4, J), key=length)
    assert brute == longest_element(4, J)


def test_min_coset_reps_counts():
    assert min_coset_reps(3, [1, 2]) == [WeylElt.identity(3)]
    assert len(min_coset_reps(3, [1])) == 3
    assert len(min_coset_reps(4, [1, 2])) == 4


def test_omega_bar_words():
    assert omega_bar_inv(3, 1)[1] == (1, 2)
    w, word = omega_bar_inv(4, 2)
    assert word == (2, 1, 3, 2) and length(w) == 4
    for n in range(2, 6):
        for i in range(1, n):
            assert omega_bar_inv(n, i)[0] == omega_bar_inv(n, 1)[0] ** i
    with pytest.raises(ValueError):
        omega_bar_inv(3, 3)


def test_violation_profile_examples():
    assert violation_profile(WeylElt.identity(3), 1) == []
    for n in (3, 4):
        for i in range(1, n):
            assert len(violation_profile(WeylElt.simple(n, i), i)) == 1
    assert len(violation_profile(s(3, 2, 1), 1)) >= 2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_violation_profile_characterizes_cosets(n):
    for i in range(1, n):
        Wi = set(parabolic_elements(n, set(range(1, n)) - {i}))
        siWi = {WeylElt.simple(n, i) * u for u in Wi}
        _, word = omega_bar_inv(n, i)
        for w in all_elements(n):
            prof = violation_profile(w, i)
            assert (not prof) == (w in Wi)
            if w in siWi:
                assert len(prof) == 1
                j = prof[0]
                pre = WeylElt.from_word(n, word[:j - 1])
                assert act(w * pre, simple_root(word[j - 1])) == Root(i + 1, i)


def test_W_beta_prime_examples():
    assert len(W_beta_prime(3, Root(1, 2))) == 6
    wo = longest_element(3)
    ob = omega_bar(3)
    assert set(W_beta_prime(3, Root(1, 3))) == {wo, wo * ob, wo * ob * ob}
    assert len(W_beta_prime(4, Root(1, 4))) == 8


@given(st.integers(2, 6).flatmap(lambda n: st.tuples(perms(n), st.integers(1, n - 1))))
def test_exchange_condition(data):
    w, i = data
    ws = w * WeylElt.simple(w.n, i)
    up = act(w, simple_root(i)).positive
    assert length(ws) == length(w) + (1 if up else -1)


@given(st.integers(2, 6).flatmap(perms))
def test_reduced_word_is_reduced(w):
    word = reduced_word(w)
    assert len(word) == length(w) and WeylElt.from_word(w.n, word) == w


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(perms(n), perms(n))))
def test_bruhat_identity_and_top(data):
    u, w = data
    n = w.n
    assert bruhat_leq(WeylElt.identity(n), w) and bruhat_leq(w, longest_element(n))
    if bruhat_leq(u, w):
        assert length(u) <= length(w)


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n - 1)))))
def test_parabolic_factorization(data):
    n, J = data
    WJ = parabolic_elements(n, J)
    reps = min_coset_reps(n, J)
    assert len(reps) * len(WJ) == factorial(n)
    seen = set()
    for u in WJ:
        for v in reps:
            w = u * v
            assert length(w) == length(u) + length(v)
            seen.add(w)
    assert len(seen) == factorial(n)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_omega_bar_negative_set(n):
    for i in range(1, n):
        neg = {a for a in positive_roots(n) if not act(omega_bar(n) ** i, a).positive}
        assert neg == {a for a in positive_roots(n) if a.j <= i < a.k}


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_omega_bar_power_is_longest_quotient(n):
    for i in range(1, n):
        omega_bar_inv(n, i)
