"""Grammar, symbolic differentiation, and evaluation of the expression kernel."""

import math

import hypothesis.strategies as st
import pytest
from hypothesis import given

from pqnverify.expr import (
    Add,
    Chart,
    Coord,
    Exp,
    ExprError,
    Mul,
    Sub,
    add,
    constant,
    derive,
    evaluate,
    intpow,
    mul,
    neg,
    parse,
    sub,
    to_string,
)

CHART = Chart(("x", "y", "z"))
X, Y, Z = Coord(0), Coord(1), Coord(2)


def test_parse_builds_the_expected_tree():
    e = parse("x*y + exp(z)", CHART)
    assert isinstance(e, Add)
    assert isinstance(e.a, Mul)
    assert isinstance(e.b, Exp)
    assert e.b.arg.index == 2


def test_parse_resolves_identifiers_by_chart_position():
    e = parse("q1-q2", Chart(("p1", "p2", "q1", "q2")))
    assert isinstance(e, Sub)
    assert (e.a.index, e.b.index) == (2, 3)


def test_negative_exponent_is_a_syntax_error():
    with pytest.raises(ExprError) as err:
        parse("x^-1", CHART)
    assert err.value.offset == 2


@pytest.mark.parametrize(
    "text,offset,fragment",
    [
        ("1 + * z", 4, "unexpected token '*'"),
        ("x + foo", 4, "unknown identifier"),
        ("2..5", 0, "malformed number"),
        ("1e+ x", 0, "exponent"),
        ("(x", 2, "expected ')'"),
    ],
)
def test_errors_carry_byte_offsets(text, offset, fragment):
    with pytest.raises(ExprError) as err:
        parse(text, CHART)
    assert err.value.offset == offset
    assert fragment in str(err.value)


def test_chart_rejects_bad_coordinate_names():
    with pytest.raises(ExprError):
        Chart(("x", "sin"))
    with pytest.raises(ExprError):
        Chart(("x", "x"))
    with pytest.raises(ExprError):
        Chart(("x", "2y"))


def test_chart_lookup():
    assert CHART.dim == 3
    assert CHART.index("z") == 2


def test_power_binds_tighter_than_unary_minus():
    assert evaluate(parse("-x^2", CHART), (2.0, 0.0, 0.0)) == -4.0


def test_whitespace_is_insignificant():
    a = parse("x * y+ exp( z )", CHART)
    b = parse("x*y+exp(z)", CHART)
    p = (0.3, -1.2, 0.5)
    assert evaluate(a, p) == evaluate(b, p)


def test_product_rule():
    assert evaluate(derive(mul(X, Y), 0), (5.0, 7.0, 0.0)) == 7.0


def test_chain_rule_through_exp():
    lattice = Chart(("p1", "p2", "q1", "q2"))
    e = parse("exp(q1-q2)", lattice)
    p = (0.0, 0.0, 0.4, -0.3)
    assert evaluate(derive(e, 3), p) == pytest.approx(-math.exp(0.7), rel=1e-12)


def test_power_rule():
    assert evaluate(derive(intpow(X, 3), 0), (2.0, 0.0, 0.0)) == 12.0


def test_evaluate_basics():
    assert evaluate(parse("x*y+1", CHART), (2.0, 3.0, 0.0)) == 7.0
    assert evaluate(parse("exp(x-y)", CHART), (0.0, 0.0, 0.0)) == 1.0


def test_domain_failures_become_nan():
    assert math.isnan(evaluate(parse("1/x", CHART), (0.0, 0.0, 0.0)))
    assert math.isnan(evaluate(parse("log(x)", CHART), (-1.0, 0.0, 0.0)))
    assert math.isnan(evaluate(parse("sqrt(x)", CHART), (-4.0, 0.0, 0.0)))


def _polynomials():
    base = st.one_of(
        st.integers(-2, 2).map(lambda v: constant(float(v))),
        st.integers(0, CHART.dim - 1).map(Coord),
    )

    def compound(children):
        two = st.tuples(children, children)
        return st.one_of(
            two.map(lambda t: add(*t)),
            two.map(lambda t: sub(*t)),
            two.map(lambda t: mul(*t)),
            children.map(neg),
            st.tuples(children, st.integers(0, 2)).map(lambda t: intpow(*t)),
        )

    return st.recursive(base, compound, max_leaves=6)


_points = st.tuples(
    st.floats(-1, 1, allow_nan=False),
    st.floats(-1, 1, allow_nan=False),
    st.floats(-1, 1, allow_nan=False),
)


@given(_polynomials(), _points, st.integers(0, 2))
def test_derivative_matches_central_differences(e, p, i):
    h = 1e-5
    up = list(p)
    dn = list(p)
    up[i] += h
    dn[i] -= h
    fd = (evaluate(e, tuple(up)) - evaluate(e, tuple(dn))) / (2 * h)
    exact = evaluate(derive(e, i), p)
    assert abs(exact - fd) <= 1e-6 * (1 + abs(exact))


@given(_polynomials(), _points, st.integers(0, 2), st.integers(0, 2))
def test_mixed_partials_commute(e, p, i, j):
    """Schwarz symmetry holds exactly up to float roundoff."""
    a = evaluate(derive(derive(e, i), j), p)
    b = evaluate(derive(derive(e, j), i), p)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))


@given(_polynomials(), _points)
def test_print_parse_round_trip(e, p):
    text = to_string(e, CHART)
    assert evaluate(parse(text, CHART), p) == evaluate(e, p)


@given(_points)
def test_printed_functions_round_trip(p):
    e = parse("exp(x) + sin(y)*cos(z) - sqrt(x^2 + 1)", CHART)
    again = parse(to_string(e, CHART), CHART)
    assert evaluate(again, p) == evaluate(e, p)
