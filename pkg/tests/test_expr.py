import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mulcalc import expr as ex
from mulcalc.errors import EvaluationError, ExpressionSyntaxError, NotHolomorphicError, UnboundNameError

Z, C = ex.Var("z"), ex.Param("c")


def test_parse_examples():
    assert ex.parse("exp(c*z)") == ex.Func("exp", ex.Mul(C, Z))
    assert ex.parse("1/z") == ex.Div(ex.Lit(1), Z)
    assert ex.parse("exp(z*Log(z))") == ex.Func("exp", ex.Mul(Z, ex.Func("Log", Z)))


def test_precedence_and_associativity():
    assert ex.parse("2-3-4") == ex.Sub(ex.Sub(ex.Lit(2), ex.Lit(3)), ex.Lit(4))
    assert ex.parse("a/b/c") == ex.Div(ex.Div(ex.Param("a"), ex.Param("b")), C)
    assert ex.parse("1+2*z^3") == ex.Add(ex.Lit(1), ex.Mul(ex.Lit(2), ex.Pow(Z, 3)))
    # unary minus binds to the atom, so the power applies to (-z)
    assert ex.parse("-z^2") == ex.Pow(ex.Neg(Z), 2)


def test_constants_and_params():
    assert ex.evaluate(ex.parse("i*pi"), 0) == pytest.approx(1j * math.pi)
    assert ex.parse("e") == ex.Lit(math.e)
    assert ex.free_params(ex.parse("a*z+b")) == {"a", "b"}


@pytest.mark.parametrize("source, offset", [("z+", 2), ("z+*2", 2), ("(z", 2), ("exp z", 4), ("1 $ 2", 2)])
def test_syntax_errors_carry_offset(source, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        ex.parse(source)
    assert info.value.offset == offset
    assert info.value.expected


def test_offsets_are_utf8_bytes():
    with pytest.raises(ExpressionSyntaxError) as info:
        ex.parse("z+é")
    assert info.value.offset == 2
    with pytest.raises(ExpressionSyntaxError) as info:
        ex.parse("é+")  # two-byte character before the error
    assert info.value.offset == 0


@pytest.mark.parametrize("source", ["foo(z)", "sinh(z)", "zz", "exp"])
def test_unknown_names(source):
    with pytest.raises(ExpressionSyntaxError):
        ex.parse(source)


def test_evaluate_examples():
    assert ex.evaluate(ex.parse("exp(1/z)"), 1) == pytest.approx(2.718281828459045, abs=0)
    assert ex.evaluate(ex.parse("1/z"), 2j) == -0.5j
    assert ex.evaluate(ex.parse("Log(z)"), -1) == complex(0, math.pi)


def test_principal_log_on_the_cut():
    # -1 - 0j would give -pi from numpy; the principal branch is (-pi, pi]
    assert ex.evaluate(ex.parse("Log(z)"), complex(-1, -0.0)).imag == math.pi


def test_evaluate_errors():
    with pytest.raises(EvaluationError):
        ex.evaluate(ex.parse("1/z"), 0)
    with pytest.raises(EvaluationError):
        ex.evaluate(ex.parse("Log(z)"), 0)
    with pytest.raises(UnboundNameError):
        ex.evaluate(ex.parse("c*z"), 1)


def test_evaluate_vectorized():
    zs = np.array([1, 2j, -1 + 1j])
    out = ex.evaluate(ex.parse("z^2 + c"), zs, {"c": 1})
    np.testing.assert_allclose(out, zs ** 2 + 1)


def test_differentiate_examples():
    assert ex.simplify(ex.differentiate(ex.parse("z*z"))) == ex.Mul(ex.Lit(2), Z)
    assert ex.differentiate(ex.parse("exp(c*z)")) == ex.Mul(C, ex.Func("exp", ex.Mul(C, Z)))
    with pytest.raises(NotHolomorphicError) as info:
        ex.differentiate(ex.parse("conj(z)"))
    assert info.value.node_name == "conj"


def test_differentiate_wrt_parameter():
    d = ex.differentiate(ex.parse("exp(c*z)"), wrt="c")
    assert ex.evaluate(d, 2, {"c": 0.5}) == pytest.approx(2 * cmath.exp(1))


def test_simplify_examples():
    assert ex.simplify(ex.parse("0*z + 1*w")) == ex.Param("w")
    assert ex.simplify(ex.parse("2+3")) == ex.Lit(5)
    assert ex.simplify(ex.parse("exp(z)")) == ex.parse("exp(z)")


# ------------------------------------------------------------ generated corpus

PARAM_NAMES = st.sampled_from(list("abcdfgkw"))
FUNC_NAMES = st.sampled_from(ex.FUNCTIONS)
HOLO_NAMES = st.sampled_from(ex.HOLOMORPHIC_FUNCS)

leaves = st.one_of(
    st.just(Z),
    st.builds(ex.Lit, st.floats(0, 1e6, allow_nan=False, allow_infinity=False)),
    st.just(ex.Lit(1j)),
    st.builds(ex.Param, PARAM_NAMES),
)


def _extend(children):
    return st.one_of(
        st.builds(ex.Add, children, children),
        st.builds(ex.Sub, children, children),
        st.builds(ex.Mul, children, children),
        st.builds(ex.Div, children, children),
        st.builds(ex.Neg, children),
        st.builds(ex.Func, FUNC_NAMES, children),
        st.builds(ex.Pow, children, st.integers(-4, 4)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_render_parse_round_trip(tree):
    assert ex.parse(ex.render(tree)) == tree


def _holo_extend(children):
    return st.one_of(
        st.builds(ex.Add, children, children),
        st.builds(ex.Mul, children, children),
        st.builds(ex.Sub, children, children),
        st.builds(ex.Func, st.sampled_from(["exp", "sin", "cos"]), children),
        st.builds(ex.Pow, children, st.integers(0, 3)),
    )


holo_trees = st.recursive(
    st.one_of(st.just(Z), st.builds(ex.Lit, st.complex_numbers(max_magnitude=2, allow_nan=False))),
    _holo_extend, max_leaves=6)
points = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def _fd(f, z, h=1e-6):
    dx = (ex.evaluate(f, z + h) - ex.evaluate(f, z - h)) / (2 * h)
    dy = (ex.evaluate(f, z + 1j * h) - ex.evaluate(f, z - 1j * h)) / (2j * h)
    return 0.5 * (dx + dy)


@settings(max_examples=200, deadline=None)
@given(holo_trees, points)
def test_derivative_matches_finite_difference(f, z):
    value = ex.evaluate(f, z)
    if abs(value) > 1e6:
        return  # FD cancellation dominates for huge values
    fd = _fd(f, z)
    assert abs(ex.evaluate(ex.differentiate(f), z) - fd) <= 1e-5 * (1 + abs(fd))


@pytest.mark.parametrize("source", ["1/z", "Log(z)", "z^-3", "exp(1/z)", "sin(z)/cos(z)"])
def test_derivative_with_poles_matches_fd(source):
    f = ex.parse(source)
    rng = np.random.default_rng(7)
    for _ in range(100):
        z = complex(*rng.uniform(-2, 2, 2))
        if abs(z) < 0.1 or abs(cmath.cos(z)) < 0.1 or (abs(z.imag) < 0.1 and z.real < 0):
            continue  # near poles or the Log cut
        fd = _fd(f, z)
        assert abs(ex.evaluate(ex.differentiate(f), z) - fd) <= 1e-5 * (1 + abs(fd))


@settings(max_examples=200, deadline=None)
@given(trees, points, st.complex_numbers(max_magnitude=3, allow_nan=False))
def test_simplify_preserves_values(tree, z, p):
    params = {n: p for n in "abcdfgkw"}
    try:
        before = ex.evaluate(tree, z, params)
    except (EvaluationError, OverflowError, ZeroDivisionError):
        return
    after = ex.evaluate(ex.simplify(tree), z, params)
    assert abs(after - before) <= 1e-9 * max(1.0, abs(before))
