"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line; the
terminal summary (see conftest) repeats them after the run."""

import random
import time
from fractions import Fraction

from doublepoisson import (ARROW, DERIVATION, Element, apply_permutation,
                           localize_normal_form, necklace_normal_form, parse_element)
from doublepoisson.brackets import (DoubleBracketTable, check_double_poisson, check_loday,
                                    check_quasi_poisson, evaluate_double_bracket,
                                    loday_tensor_residual)
from doublepoisson.forms import (cartan_residual, check_bisymplectic_equivalence,
                                 contraction_antisymmetry_residual, contraction_lie_residual,
                                 standard_bisymplectic)
from doublepoisson.fusion import fold_separated
from doublepoisson.polyvectors import check_moment, gauge_element, schouten_single
from doublepoisson.repspace import (evaluate_element, evaluate_tensor, gauge_action_check,
                                    induced_bracket_tensor, is_zero, jacobi_residual,
                                    lie_poisson_tensor, quasi_structures_eval, random_point,
                                    trace_checks, vector_field_commutator_residual)
from doublepoisson.samples import random_element, random_word
from doublepoisson.structures import (doubled, general_quasi, loop_quiver, one_pair_quasi,
                                      pair_quiver, quiver_corpus, standard_hamiltonian)

from conftest import ACCEPTANCE, cubic_table, lie_table
from test_forms import FORM_QUIVERS, _field, _form
from test_repspace import _random_bracket_value

D_LOOP, D_PAIR = doubled(loop_quiver()), doubled(pair_quiver())


def record(n, ok, seconds, limit, detail=""):
    within = limit is None or seconds < limit
    status = "PASS" if ok and within else "FAIL"
    bound = f" (limit {limit:g}s)" if limit else ""
    line = f"criterion {n:2d}: {status}  {seconds:.2f}s{bound}  {detail}".rstrip()
    ACCEPTANCE[n] = line
    print(line)
    assert ok, detail
    assert within, f"took {seconds:.2f}s, limit {limit}s"


def test_criterion_01_polynomial_brackets():
    t0 = time.perf_counter()
    L = loop_quiver()
    ok = all(check_double_poisson(T).status == "PROVED" for T in (lie_table(L), cubic_table(L)))
    record(1, ok, time.perf_counter() - t0, 1, "t(x)1-1(x)t and t^2(x)t-t(x)t^2")


def test_criterion_02_standard_structure_corpus():
    t0 = time.perf_counter()
    corpus = quiver_corpus(3) + [loop_quiver(), pair_quiver()]
    bad = []
    for q in corpus:
        S = standard_hamiltonian(doubled(q))
        if necklace_normal_form(schouten_single(S.P, S.P)):
            bad.append(repr(q))
        elif check_moment(S.P, S.moment, fallback=False).status != "PROVED":
            bad.append(repr(q))
    record(2, not bad, time.perf_counter() - t0, 10,
           f"{len(corpus)} quivers" + (f", failing {bad[0]}" if bad else ""))


def test_criterion_03_one_pair_quasi():
    t0 = time.perf_counter()
    S = one_pair_quasi()
    q = S.quiver
    E1, E2 = gauge_element(q, 1), gauge_element(q, 2)
    resid = schouten_single(S.P, S.P) - (E1 * E1 * E1 + E2 * E2 * E2).scale(Fraction(1, 6))
    ok = not necklace_normal_form(localize_normal_form(resid))
    ok = ok and check_moment(S.P, S.moment, "multiplicative", fallback=False).status == "PROVED"
    # Phi_2 is the inverse of e_2 + a* a
    inv2 = localize_normal_form(parse_element("e(2) + a* a", q) * S.component(2))
    ok = ok and inv2 == Element.idem(q, 2)
    ok = ok and S.component(1) == parse_element("e(1) + a a*", q)
    record(3, ok, time.perf_counter() - t0, 30, "rewriting only, no oracle")


ORDERS = {"L": (D_LOOP, [["t", "t*"], ["t*", "t"]]),
          "P2": (D_PAIR, [["a", "a*"], ["a*", "a"]])}


def test_criterion_04_general_quasi():
    t0 = time.perf_counter()
    ok, n = True, 0
    for q, orders in ORDERS.values():
        for order in orders:
            S = general_quasi(q, order)
            ok = ok and check_quasi_poisson(S.table(), fallback=False).status == "PROVED"
            ok = ok and check_moment(S.P, S.moment, "multiplicative",
                                     fallback=False).status == "PROVED"
            n += 1
    record(4, ok, time.perf_counter() - t0, 120, f"{n} (quiver, ordering) cases")


def test_criterion_05_fusion_coherence():
    t0 = time.perf_counter()
    ok, n = True, 0
    for q, orders in ORDERS.values():
        for order in orders:
            G = general_quasi(q, order)
            F = fold_separated(q, order)
            P = Element._raw(G.quiver, dict(F.P.terms))
            Phi = Element._raw(G.quiver, dict(F.moment.terms))
            ok = ok and not necklace_normal_form(localize_normal_form(P - G.P))
            ok = ok and Phi == G.moment
            n += 1
    record(5, ok, time.perf_counter() - t0, 120, f"{n} foldings of Q^sep")


def _word_triples(q, rng, n):
    out = []
    while len(out) < n:
        ws = [random_word(q, rng, rng.randint(1, 3)) for _ in range(3)]
        if all(ws):
            out.append(tuple(Element.word(q, w) for w in ws))
    return out


def test_criterion_06_loday():
    t0 = time.perf_counter()
    rng = random.Random(6)
    L = loop_quiver()
    cases = [(lie_table(L), 50), (standard_hamiltonian(D_PAIR).table(), 50),
             (standard_hamiltonian(D_LOOP).table(), 50)]
    ok = all(check_loday(T, _word_triples(T.quiver, rng, n)).status == "PROVED"
             for T, n in cases)
    record(6, ok, time.perf_counter() - t0, None, "150 word triples")


def test_criterion_07_representation_spaces():
    t0 = time.perf_counter()
    rng = random.Random(7)
    parts = {}
    # (a) random tables, words and points
    ok = True
    for k in range(8):
        q = D_PAIR
        vals = {(a, b): _random_bracket_value(q, rng, a, b)
                for a, b in (("a", "a"), ("a", "a*"), ("a*", "a*"))}
        T = DoubleBracketTable(q, vals)
        x, y, z = (random_element(q, rng, 1, 2) for _ in range(3))
        R, _ = jacobi_residual(T, x, y, z, random_point(q, (1, 2), seed=k))
        ok = ok and is_zero(R)
    parts["a"] = ok
    # (b) Lie-Poisson
    L = loop_quiver()
    T = lie_table(L)
    t = parse_element("t", L)
    parts["b"] = all(
        (induced_bracket_tensor(T, t, t, p) == lie_poisson_tensor(p, t)).all()
        for p in (random_point(L, (n,), seed=n) for n in (1, 2, 3)))
    # (c) trace compatibility on 20 samples
    Ts = standard_hamiltonian(D_PAIR).table()
    ok = True
    for k in range(20):
        a = random_element(D_PAIR, rng, 2, 3, closed=True)
        b = random_element(D_PAIR, rng, 2, 3, closed=True)
        ok = ok and trace_checks(Ts, a, b, random_point(D_PAIR, (2, 1), seed=k)).status == "PROVED"
    parts["c"] = ok
    # (d) gauge action
    parts["d"] = all(gauge_action_check(q, random_point(q, dims, seed=1)).status == "PROVED"
                     for q, dims in ((D_PAIR, (2, 1)), (D_LOOP, (2,)), (D_PAIR, (1, 3))))
    detail = " ".join(f"({k}) {'ok' if v else 'FAIL'}" for k, v in parts.items())
    record(7, all(parts.values()), time.perf_counter() - t0, None, detail)


def test_criterion_08_quasi_moment_on_rep():
    t0 = time.perf_counter()
    S = one_pair_quasi()
    ok = all(quasi_structures_eval(S, random_point(S.quiver, dims, seed=s)).status == "PROVED"
             for dims in ((1, 1), (2, 1)) for s in range(5))
    record(8, ok, time.perf_counter() - t0, None, "alpha in {(1,1), (2,1)}, 5 points each")


def test_criterion_09_forms():
    t0 = time.perf_counter()
    rng = random.Random(9)
    ok = True
    for k in range(60):
        q = FORM_QUIVERS[k % 3]
        delta, Delta = _field(q, rng), _field(q, rng)
        x = _form(q, rng, rng.randint(0, 2))
        ok = ok and not cartan_residual(delta, x)
        ok = ok and not contraction_antisymmetry_residual(delta, Delta, x)
        ok = ok and not contraction_lie_residual(delta, Delta, x)
    for q in (D_LOOP, D_PAIR):
        ok = ok and check_bisymplectic_equivalence(standard_bisymplectic(q)).status == "PROVED"
    record(9, ok, time.perf_counter() - t0, 60, "60 random triples, standard form on L and P2")


def _grade1(q, rng):
    while True:
        w = random_word(q, rng, rng.randint(1, 3), (ARROW, DERIVATION))
        if w and sum(l[0] == DERIVATION for l in w) == 1:
            return Element.word(q, w, rng.choice((1, -1, 2)))


def test_criterion_10_consistency_oracle():
    t0 = time.perf_counter()
    rng = random.Random(10)
    q = D_PAIR
    T = standard_hamiltonian(q).table()
    bad = []
    for k in range(1000):
        p = random_point(q, (rng.randint(1, 2), rng.randint(1, 2)), seed=k)
        kind = k % 4
        if kind == 0:
            x, y, z = (random_element(q, rng, 2, 3) for _ in range(3))
            r = evaluate_element((x * y) * z - x * (y * z), p)
        elif kind == 1:
            a, b = random_element(q, rng, 2, 3), random_element(q, rng, 2, 3)
            r = evaluate_tensor(evaluate_double_bracket(T, a, b) +
                                apply_permutation((1, 0), evaluate_double_bracket(T, b, a)), p)
        elif kind == 2:
            a, b, c = (random_element(q, rng, 1, 2) for _ in range(3))
            r = evaluate_tensor(loday_tensor_residual(T, a, b, c), p)
        else:
            r = vector_field_commutator_residual(_grade1(q, rng), _grade1(q, rng),
                                                 random_element(q, rng, 1, 2), p)
        if not is_zero(r):
            bad.append((k, kind))
    record(10, not bad, time.perf_counter() - t0, None,
           "1000 identities" + (f", first nonzero {bad[0]}" if bad else ""))
