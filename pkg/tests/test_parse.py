import json
import random

import pytest
from hypothesis import given, strategies as st

from doublepoisson import (ARROW, DERIVATION, DIFFERENTIAL, INVERSE, Element, ParseError,
                           QuiverError, Tensor, parse_element, parse_tensor, quiver)
from doublepoisson.parse import (dump_document, format_element, format_tensor,
                                 load_document, load_quiver, quiver_from_dict,
                                 quiver_to_dict)
from doublepoisson.samples import random_element
from doublepoisson.structures import one_pair_quiver

KINDS = (ARROW, INVERSE, DERIVATION, DIFFERENTIAL)


@given(st.integers(0, 10**9))
def test_element_round_trip(seed):
    rng = random.Random(seed)
    q = one_pair_quiver()
    x = random_element(q, rng, 4, 4, KINDS).scale(rng.choice([1, -2, "3/5"]))
    assert parse_element(format_element(x), q) == x


@given(st.integers(0, 10**9))
def test_tensor_round_trip(seed):
    rng = random.Random(seed)
    q = one_pair_quiver()
    t = Tensor.zero(q, 2)
    for _ in range(3):
        t = t + Tensor.of(random_element(q, rng, 1, 3, KINDS),
                          random_element(q, rng, 1, 3, KINDS))
    assert parse_tensor(format_tensor(t), q) == t


def test_star_suffix_versus_product(dP2):
    assert parse_element("a*", dP2) == Element.letter(dP2, "a*")
    # a star directly followed by an identifier is the product symbol
    assert parse_element("a*a", dP2) == Element.letter(dP2, "a") * Element.letter(dP2, "a")
    assert parse_element("a* a", dP2) == parse_element("a*·a", dP2)
    assert parse_element("a * a*", dP2) == parse_element("a·a*", dP2)


def test_grammar_pieces(dP2):
    x = parse_element("1/2 (a + 2 a) a* - e(2)", dP2)
    assert x == parse_element("3/2 a a* - e(2)", dP2)
    assert parse_element("3", dP2) == Element.one(dP2).scale(3)
    assert parse_element("D(a) d(a)", dP2).degree() == 2
    assert parse_tensor("a (x) a* + a ⊗ a*", dP2) == parse_tensor("2 a ⊗ a*", dP2)


def test_errors_carry_position(dP2):
    with pytest.raises(ParseError) as err:
        parse_element("a +\n  (a* ", dP2)
    assert err.value.line == 2
    with pytest.raises(ParseError) as err:
        parse_element("a $ a*", dP2)
    assert (err.value.line, err.value.column) == (1, 3)
    with pytest.raises((ParseError, QuiverError)):
        parse_element("b", dP2)


def test_quiver_document_round_trip(tmp_path):
    docs = [
        {"vertices": [1], "arrows": [{"id": "t", "tail": 1, "head": 1}], "double": True},
        {"vertices": ["x", "y"], "arrows": [{"id": "a", "tail": "x", "head": "y"}],
         "double": True, "order": ["a*", "a"], "invert": ["a"]},
        {"vertices": [1, 2, 3], "arrows": [{"id": "a", "tail": 1, "head": 2},
                                           {"id": "b", "tail": 2, "head": 3}]},
    ]
    for d in docs:
        q = quiver_from_dict(d)
        out = quiver_to_dict(q)
        assert quiver_from_dict(out) == q
        assert quiver_to_dict(quiver_from_dict(out)) == out
        path = tmp_path / "q.json"
        path.write_text(dump_document(out))
        assert load_quiver(path) == q
        assert json.loads(path.read_text()) == out


def test_yaml_input(tmp_path):
    path = tmp_path / "q.yaml"
    path.write_text("vertices: [1, 2]\narrows:\n  - {id: a, tail: 1, head: 2}\ndouble: true\n")
    q = load_quiver(path)
    assert [a.id for a in q.arrows] == ["a", "a*"]
    bad = tmp_path / "bad.yaml"
    bad.write_text("vertices: [1\narrows: }\n")
    with pytest.raises(ParseError):
        load_document(bad)


def test_malformed_quiver_documents():
    with pytest.raises(QuiverError):
        quiver_from_dict({"arrows": []})
    with pytest.raises(QuiverError):
        quiver_from_dict({"vertices": [1], "arrows": [{"id": "t", "tail": 1, "head": 9}]})
    with pytest.raises(QuiverError):
        quiver([1], [("t", 1, 1)]).with_order(["s"])
