import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from voa.fock import FockState, Gen, Wick, get_system, state_of, weight_basis
from voa.sexpr import ParseError, elaborate, from_expr, parse, to_text
from voa.serial import (
    dumps, nopoly_from_json, nopoly_to_json, state_from_json, state_to_json,
)
from voa.w1inf import NOPoly


@pytest.mark.parametrize("text", [
    "(J 0)", "(Om 1 2)", "(d 2 (J 1))", "(w (J 0) (J 1) (J 2))", "(circ 1 (J 0) (J 0))",
    '(+ (J 0) (* "-1/2" (d 1 (J 0))))', "(beta 0)", "(vac)", "(circ -1 (gamma 1) (beta 0))",
])
def test_print_parse_identity(text):
    assert to_text(parse(text)) == text


@pytest.mark.parametrize("text,pos", [
    ("(J 0", 4), ("(J x)", 3), ("(Q 1)", 1), ("(J 0))", 5), ("", 0), ("(J 0 1)", 0),
    ("(d -1 (J 0))", 3), ('(* "1/0" (J 0))', 3), ("(w)", 0), (")", 0),
])
def test_parse_errors_have_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.pos == pos


def test_elaborate_by_system():
    bg = get_system("betagamma", 1)
    v = state_of(bg, elaborate(parse("(circ 1 (J 0) (J 0))"), bg))
    assert v == -1 * FockState.vacuum(bg)
    M = get_system("current", -1)
    assert state_of(M, elaborate(parse("(J 2)"), M)).terms == {((2, -1),): 1}
    with pytest.raises(ValueError):
        elaborate(parse("(beta 0)"), M)
    with pytest.raises(ValueError):
        elaborate(parse("(beta 3)"), bg)


def test_from_expr_round_trip():
    M = get_system("current", -1)
    e = Wick(Gen("J", 0), Wick(Gen("J", 1), Gen("J", 2)))
    text = to_text(from_expr(e))
    assert text == "(w (J 0) (J 1) (J 2))"
    assert state_of(M, elaborate(parse(text), M)) == state_of(M, e)


SYSTEMS = [("current", -1), ("current", Fraction(1, 2)), ("betagamma", 2), ("bc", 1)]
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def random_states(draw):
    kind, param = draw(st.sampled_from(SYSTEMS))
    sysm = get_system(kind, param)
    w = draw(st.integers(0, 3))
    words = weight_basis(sysm, w, 3)
    chosen = draw(st.lists(st.sampled_from(words), max_size=4)) if words else []
    return FockState(sysm, {x: draw(coeffs) for x in chosen})


@given(random_states())
def test_state_json_round_trip(v):
    data = state_to_json(v)
    text = dumps(data)
    back = state_from_json(json.loads(text))
    assert back == v
    assert dumps(state_to_json(back)) == text
    for t in data["terms"]:
        assert isinstance(t["coeff"], str)


def test_nopoly_json_round_trip():
    P = NOPoly.omega(0, 0) + Fraction(-1, 3) * NOPoly.J(3, 1)
    assert nopoly_from_json(nopoly_to_json(P)) == P
