import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from doublepoisson import (ARROW, DERIVATION, Element, Tensor, apply_permutation,
                           commutator, necklace_normal_form, parse_element, parse_tensor,
                           quiver)
from doublepoisson.brackets import evaluate_double_bracket
from doublepoisson.polyvectors import (apply_derivation, bracket_from_polyvector,
                                       check_moment, derivation_to_polyvector,
                                       gauge_element, hamiltonian_field,
                                       schouten_double_bracket, schouten_single,
                                       schouten_triple, total_gauge)
from doublepoisson.samples import random_element, random_word
from doublepoisson.structures import doubled, one_pair_quasi, standard_hamiltonian

seeds = st.integers(0, 2**32 - 1)


def el(s, q):
    return parse_element(s, q)


def test_schouten_generators(dP2):
    Da, a = el("D(a)", dP2), el("a", dP2)
    assert schouten_double_bracket(Da, a) == parse_tensor("e(1) ⊗ e(2)", dP2)
    assert not schouten_double_bracket(Da, Da)
    assert not schouten_double_bracket(Da, el("a*", dP2))


def test_gauge_bracket_with_loop(L):
    E = gauge_element(L, 1)
    assert E == el("D(t) t - t D(t)", L)
    t = el("t", L)
    assert schouten_double_bracket(E, t) == parse_tensor("t ⊗ e(1) - e(1) ⊗ t", L)


def test_gauge_elements(dP2):
    assert gauge_element(dP2, 1) == el("D(a*) a* - a D(a)", dP2)
    assert not gauge_element(quiver([1, 2], [("t", 1, 1)]), 2)
    with pytest.raises(Exception):
        gauge_element(dP2, 3)


def test_single_with_standard_p(dP2):
    P = standard_hamiltonian(dP2).P
    assert schouten_single(P, el("a", dP2)) == -el("D(a*)", dP2)
    assert schouten_single(P, el("a*", dP2)) == el("D(a)", dP2)


def test_gauge_self_bracket(L):
    E = gauge_element(L, 1)
    e = Element.idem(L, 1)
    assert not necklace_normal_form(schouten_single(E, E) - (E * e + e * E))


def test_mu_map_examples(L, dP2):
    Q = el("t D(t) D(t)", L)
    t = el("t", L)
    assert bracket_from_polyvector(Q)(t, t) == parse_tensor("t ⊗ e(1) - e(1) ⊗ t", L)
    br = bracket_from_polyvector(el("D(a) D(a*)", dP2))
    a, s = el("a", dP2), el("a*", dP2)
    assert br(a, s) == parse_tensor("e(2) ⊗ e(1)", dP2)
    assert br(s, a) == -parse_tensor("e(1) ⊗ e(2)", dP2)
    assert not br(a, a) and not br(s, s)
    D = el("D(a)", dP2)
    assert not bracket_from_polyvector(D * el("a D(a*)", dP2) + el("a D(a*)", dP2) * D)(a, s)


def test_mu_map_rejects_bad_input(dP2):
    with pytest.raises(ValueError):
        bracket_from_polyvector(el("D(a) D(a*) + D(a) a", dP2))
    with pytest.raises(ValueError):
        bracket_from_polyvector(el("D(a) D(a*)", dP2))(el("a", dP2))


def test_derivation_to_polyvector(dP2):
    assert derivation_to_polyvector(dP2, {"a": parse_tensor("e(1) ⊗ e(2)", dP2)}) == \
        el("D(a)", dP2)
    vals = {}
    for arrow in dP2.arrows:
        x = el(arrow.id, dP2)
        vals[arrow.id] = apply_derivation(gauge_element(dP2, 1), x)
    assert derivation_to_polyvector(dP2, vals) == gauge_element(dP2, 1)
    assert not derivation_to_polyvector(dP2, {})
    with pytest.raises(ValueError):
        derivation_to_polyvector(dP2, {"a": parse_tensor("e(2) ⊗ e(2)", dP2)})


def test_hamiltonian_fields(L, T_lie, dP2):
    assert hamiltonian_field(T_lie, el("t", L)) == el("D(t) t - t D(t)", L)
    assert not hamiltonian_field(T_lie, Element.idem(L, 1))
    T = standard_hamiltonian(dP2).table()
    assert hamiltonian_field(T, el("a", dP2)) == el("D(a*)", dP2)
    assert hamiltonian_field(T, el("a*", dP2)) == -el("D(a)", dP2)


def test_hamiltonian_fields_bracket(dL):
    # {{H_a, H_b}} = H_{{a,b}} with H_{x' (x) x''} = H_x' (x) x'' + x' (x) H_x''
    T = standard_hamiltonian(dL).table()
    gens = [el("t", dL), el("t*", dL), el("t t*", dL)]
    for a in gens:
        for b in gens:
            lhs = schouten_double_bracket(hamiltonian_field(T, a), hamiltonian_field(T, b))
            rhs = Tensor.zero(dL, 2)
            for (u, v), c in evaluate_double_bracket(T, a, b).terms.items():
                U, V = Element.word(dL, u, c), Element.word(dL, v)
                rhs = rhs + Tensor.of(hamiltonian_field(T, U), V) + \
                    Tensor.of(U, hamiltonian_field(T, V))
            assert lhs == rhs


def test_moment_checks(dP2):
    S = standard_hamiltonian(dP2)
    assert check_moment(S.P, S.moment, "additive").status == "PROVED"
    res = check_moment(S.P, Element.zero(dP2), "additive", fallback=False)
    assert res.status == "FAIL"
    Q = one_pair_quasi()
    assert check_moment(Q.P, Q.moment, "multiplicative", fallback=False).status == "PROVED"
    with pytest.raises(ValueError):
        check_moment(S.P, S.moment, "other")


QV_QUIVER = doubled(quiver([1, 2], [("a", 1, 2), ("b", 2, 2)]))


def _polyvector(rng, grade, terms=2):
    q = QV_QUIVER
    out = Element.zero(q)
    for _ in range(terms):
        n = rng.randint(grade, grade + 2)
        for _ in range(50):
            w = random_word(q, rng, n, (ARROW, DERIVATION))
            if w and sum(l[0] == DERIVATION for l in w) == grade:
                out = out + Element.word(q, w, rng.choice((1, -1, 2)))
                break
    return out


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_schouten_graded_antisymmetry_and_jacobi(seed):
    rng = random.Random(seed)
    P, Q, R = (_polyvector(rng, rng.randint(0, 2), 1) for _ in range(3))
    for x in (P, Q, R):
        if not x:
            return
    dp, dq = P.degree(), Q.degree()
    sign = -1 if (dp - 1) * (dq - 1) % 2 else 1
    assert schouten_double_bracket(P, Q) == \
        apply_permutation((1, 0), schouten_double_bracket(Q, P), True).scale(-sign)
    assert not schouten_triple(P, Q, R)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_gauge_universal_property(seed):
    # {{E_i, D}} = D e_i (x) e_i - e_i (x) e_i D
    rng = random.Random(seed)
    D = _polyvector(rng, rng.randint(0, 2))
    q = QV_QUIVER
    for v in q.vertices:
        e = Element.idem(q, v)
        assert schouten_double_bracket(gauge_element(q, v), D) == \
            Tensor.of(D * e, e) - Tensor.of(e, e * D)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_mu_map_on_necklace_classes(seed):
    rng = random.Random(seed)
    q = QV_QUIVER
    Qv = _polyvector(rng, 2)
    U, V = _polyvector(rng, 1, 1), _polyvector(rng, 1, 1)
    a, b = (random_element(q, rng, 2, 3) for _ in range(2))
    shifted = Qv + commutator(U, V)
    if not Qv or shifted.grades() != {2}:
        return
    assert bracket_from_polyvector(Qv)(a, b) == bracket_from_polyvector(shifted)(a, b)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_mu_map_two_bracket_via_schouten(seed):
    # {{a,b}}_Q = -{{a, {Q, b}}}_L for Q of grade 2
    rng = random.Random(seed)
    q = QV_QUIVER
    Qv = _polyvector(rng, 2)
    a, b = (random_element(q, rng, 2, 3) for _ in range(2))
    if not Qv:
        return
    lhs = bracket_from_polyvector(Qv)(a, b)
    rhs = schouten_double_bracket(a, schouten_single(Qv, b))
    assert lhs == -rhs


@pytest.mark.parametrize("which", ["standard", "random"])
def test_induced_triple_from_half_schouten_square(which):
    # {{a,b,c}}_P = {{a,b,c}}_{1/2 {P,P}} on generators
    q = QV_QUIVER
    if which == "standard":
        P = standard_hamiltonian(q).P
    else:
        P = _polyvector(random.Random(7), 2, 3)
    br = bracket_from_polyvector(P).table()
    half = schouten_single(P, P).scale(Fraction(1, 2))
    tri = bracket_from_polyvector(half) if half else None
    gens = [el(a.id, q) for a in q.arrows]
    nonzero = False
    for a in gens:
        for b in gens:
            for c in gens:
                from doublepoisson.brackets import triple_bracket
                lhs = triple_bracket(br, a, b, c)
                rhs = tri(a, b, c) if tri else Tensor.zero(q, 3)
                assert lhs == rhs
                nonzero = nonzero or bool(lhs)
    assert nonzero == (which == "random")


def test_total_gauge(dP2):
    assert total_gauge(dP2) == gauge_element(dP2, 1) + gauge_element(dP2, 2)
