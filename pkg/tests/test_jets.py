import numpy as np
import pytest

from tanlift import expr, jets
from tanlift.jets import DomainError

from _corpus import corpus, fd_gradient, fd_hessian, max_relative_error, plain


def conformal(x):
    return 4.0 / (1.0 + jets.einsum("i,i->", x, x)) ** 2


def test_seeded_variable():
    j = jets.lift_vars([2.0])
    assert j.value[0] == 2.0
    assert np.array_equal(j.grad, [[1.0]])
    assert np.array_equal(j.hess, [[[0.0]]])


def test_square_and_product():
    j = jets.eval_jet(lambda x: x[0] ** 2, [3.0])
    assert (float(j.value), j.grad[0], j.hess[0, 0]) == (9.0, 6.0, 2.0)
    j = jets.eval_jet(lambda x: x[0] * x[1], [2.0, 5.0])
    assert np.array_equal(j.grad, [5.0, 2.0])
    assert np.array_equal(j.hess, [[0.0, 1.0], [1.0, 0.0]])


def test_conformal_factor_at_origin():
    j = jets.eval_jet(conformal, np.zeros(2))
    assert float(j.value) == 4.0
    assert np.array_equal(j.grad, [0.0, 0.0])


def test_norm_gradient():
    j = jets.eval_jet(lambda x: jets.sqrt(x[0] ** 2 + x[1] ** 2), [3.0, 4.0])
    assert float(j.value) == pytest.approx(5.0, abs=1e-15)
    assert np.allclose(j.grad, [0.6, 0.8], atol=1e-15)


def test_conformal_gradient_matches_finite_differences():
    # -16 x1 / (1 + |x|^2)^3 = -2 at (1, 0); central differences agree
    x = np.array([1.0, 0.0])
    f = lambda v: 4.0 / (1.0 + v @ v) ** 2
    fd = fd_gradient(f, x)
    j = jets.eval_jet(conformal, x)
    assert fd[0] == pytest.approx(-2.0, rel=1e-8)
    assert j.grad[0] == pytest.approx(fd[0], rel=1e-8)
    assert np.allclose(j.hess, fd_hessian(f, x), rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("case", range(100))
def test_corpus_against_finite_differences(case):
    source, x = corpus()[case]
    assert max_relative_error(source, x) <= 1e-6, source


def test_quadratics_are_exact():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        A = rng.normal(size=(n, n))
        b = rng.normal(size=n)
        x = rng.normal(size=n)
        j = jets.eval_jet(lambda v: jets.einsum("i,i->", v, jets.einsum("ij,j->i", A, v)) + jets.einsum("i,i->", b, v) + 1.5, x)
        assert np.allclose(j.grad, (A + A.T) @ x + b, rtol=0, atol=1e-13)
        assert np.allclose(j.hess, A + A.T, rtol=0, atol=1e-14)


def test_hessian_symmetric_on_corpus():
    for source, x in corpus(20, seed=11):
        j = jets.eval_jet(lambda v: expr.evaluate(source, v), x)
        assert np.abs(j.hess - j.hess.T).max() <= 1e-12


def test_transcendental_primitives():
    x = np.array([0.3, 0.7])
    f = lambda v: jets.exp(v[0]) * jets.sin(v[1]) + jets.log(1 + v[0] ** 2) * jets.cos(v[0] * v[1])
    g = lambda v: np.exp(v[0]) * np.sin(v[1]) + np.log(1 + v[0] ** 2) * np.cos(v[0] * v[1])
    j = jets.eval_jet(f, x)
    assert np.allclose(j.grad, fd_gradient(g, x), rtol=1e-8, atol=1e-9)
    assert np.allclose(j.hess, fd_hessian(g, x), rtol=1e-6, atol=1e-6)


def test_matrix_inverse_jet():
    rng = np.random.default_rng(1)
    A0, A1 = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    A0 += 3 * np.eye(3)
    f = lambda t: np.linalg.inv(A0 + t * A1)
    t = jets.lift_vars([0.2])
    inv = jets.inv(A0 + t[0] * A1)
    assert np.allclose(inv.value, f(0.2), atol=1e-14)
    h = 1e-5
    assert np.allclose(inv.grad[..., 0], (f(0.2 + h) - f(0.2 - h)) / (2 * h), atol=1e-8)


@pytest.mark.parametrize(
    "fn, primitive",
    [
        (lambda x: jets.sqrt(x[0] - 2.0), "sqrt"),
        (lambda x: 1.0 / (x[0] - 1.0), "division"),
        (lambda x: jets.log(x[0] - 1.0), "log"),
    ],
)
def test_domain_errors_name_the_primitive(fn, primitive):
    with pytest.raises(DomainError) as info:
        jets.eval_jet(fn, [1.0])
    assert info.value.primitive == primitive
    assert primitive in str(info.value)


def test_expression_rejects_unknown_names():
    with pytest.raises(expr.ExpressionError):
        expr.evaluate("__import__('os')", np.zeros(2))
    with pytest.raises(expr.ExpressionError):
        expr.evaluate("x3", np.zeros(2))
    with pytest.raises(expr.ExpressionError):
        expr.evaluate("x1.real", np.zeros(2))


def test_expression_plain_and_jet_agree():
    src = "sqrt(x1**2+x2**2)/(1+x1*x1)"
    x = np.array([3.0, 4.0])
    assert plain(src)(x) == pytest.approx(0.5)
    assert float(jets.eval_jet(lambda v: expr.evaluate(src, v), x).value) == pytest.approx(0.5)
