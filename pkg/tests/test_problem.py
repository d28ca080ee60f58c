import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import grid_argmin
from sr2fista import prox
from sr2fista.exceptions import ArgumentError, IllPosedProxError
from sr2fista.problem import (Optimum, ProblemSpec, ProxOracle, check_gradient,
                              diagonal_quadratic, evaluate_f, quadratic,
                              reformulate_convex, zero_regularizer)


def half_norm():
    return diagonal_quadratic(np.ones(3), np.zeros(3))


def test_evaluate_centered_quadratic_at_minimum():
    p = ProblemSpec(half_norm(), zero_regularizer(), 3)
    assert evaluate_f(p, np.zeros(3)) == 0.0


def test_evaluate_paper6_at_optimum(paper6):
    # g(x*) = 0 on the first block; MCP(10; 2, 3) = 6 on 5000 coordinates
    # and the second block contributes g = sum a_i 1e-8 / 2
    second = 0.5 * 1e-8 * sum(range(1, 5001))
    assert paper6.optimum.f == pytest.approx(30000.0 + second, rel=1e-15)
    assert np.sum(prox.mcp_value(paper6.optimum.x[:5000], prox.McpParams(2, 3))) == 30000.0


def test_indicator_outside_box_is_infinite():
    p = ProblemSpec(half_norm(), prox.box(np.zeros(3), np.ones(3)), 3)
    assert evaluate_f(p, np.array([0.5, 2.0, 0.5])) == np.inf
    assert np.isfinite(evaluate_f(p, np.full(3, 0.5)))


def test_dimension_mismatch():
    p = ProblemSpec(half_norm(), zero_regularizer(), 3)
    with pytest.raises(ArgumentError):
        evaluate_f(p, np.zeros(4))


def test_negative_mu_rejected():
    g = diagonal_quadratic(np.full(2, 0.5), np.zeros(2))
    with pytest.raises(ArgumentError):
        ProblemSpec(g, prox.mcp(1.0, 1.5), 2)


def test_wrong_optimum_rejected():
    with pytest.raises(ArgumentError):
        ProblemSpec(half_norm(), zero_regularizer(), 3, Optimum(np.zeros(3), 1.0))


def test_reformulate_identity_for_zero_shift():
    p = ProblemSpec(half_norm(), prox.l1(1.0), 3)
    assert reformulate_convex(p) is p


def test_reformulate_paper6_constants(paper6):
    q = reformulate_convex(paper6)
    assert q.smooth.lipschitz_L == pytest.approx(5000 - 1 / 3, rel=1e-15)
    assert q.smooth.strong_mu == pytest.approx(2 / 3, rel=1e-15)
    assert q.nonsmooth.strong_mu == 0.0
    assert q.mu == pytest.approx(paper6.mu)


def test_shifted_prox_scalar_example():
    # h = |.| declared with mu_h = -1/3: h_hat(u) = |u| + u^2/6
    h = ProxOracle(lambda x: float(np.sum(np.abs(x))),
                   lambda x, eta: prox.prox_l1(x, eta, 1.0), strong_mu=-1 / 3)
    g = diagonal_quadratic(np.ones(1), np.zeros(1))
    q = reformulate_convex(ProblemSpec(g, h, 1))
    got = q.nonsmooth.prox(np.array([2.0]), 1.0)[0]
    ref, _ = grid_argmin(lambda u: np.abs(u) + u ** 2 / 6 + 0.5 * (u - 2.0) ** 2, -5, 5)
    assert ref == pytest.approx(0.75, abs=1e-5)
    assert got == pytest.approx(ref, abs=1e-5)


def test_shifted_prox_rejects_bad_step():
    g = diagonal_quadratic(np.full(1, 2.0), np.zeros(1))
    h = ProxOracle(lambda x: float(np.sum(x * x)), lambda x, eta: x / (1 + 2 * eta),
                   strong_mu=2.0)
    q = reformulate_convex(ProblemSpec(g, h, 1))
    with pytest.raises(IllPosedProxError):
        q.nonsmooth.prox(np.ones(1), 0.5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-20, 20), min_size=4, max_size=4))
def test_reformulation_preserves_objective(xs):
    p = ProblemSpec(diagonal_quadratic([1.0, 2.0, 3.0, 4.0], [1.0, 0.0, -1.0, 2.0]),
                    prox.mcp(1.0, 2.0), 4)
    q = reformulate_convex(p)
    x = np.array(xs)
    fx = p.f(x)
    assert abs(fx - q.f(x)) <= 1e-12 * (1 + abs(fx))


@settings(max_examples=40, deadline=None)
@given(y=st.floats(-12, 12), frac=st.floats(0.05, 3.0),
       lam=st.floats(0.2, 3.0), gamma=st.floats(1.2, 5.0))
def test_shifted_prox_matches_grid(y, frac, lam, gamma):
    h = prox.mcp(lam, gamma)
    mu_h = h.strong_mu
    g = diagonal_quadratic(np.ones(1), np.zeros(1))
    q = reformulate_convex(ProblemSpec(g, h, 1))
    eta = frac
    got = q.nonsmooth.prox(np.array([y]), eta)[0]
    obj = lambda u: eta * (prox.mcp_value(u, prox.McpParams(lam, gamma)) - 0.5 * mu_h * u ** 2) \
        + 0.5 * (u - y) ** 2
    width = abs(y) + 5
    ref, best = grid_argmin(obj, -width, width)
    assert obj(np.array(got)) <= best + 1e-6
    assert got == pytest.approx(ref, abs=1e-4)


def test_check_gradient_exact_quadratic():
    p = ProblemSpec(quadratic(np.array([[2.0, 0.5], [0.5, 1.0]]), [1.0, 2.0]),
                    zero_regularizer(), 2)
    assert check_gradient(p, 5, 0).max_deviation <= 1e-7


def test_check_gradient_detects_corruption():
    g = half_norm()
    bad = type(g)(g.value, lambda x: x + np.array([1.0, 0.0, 0.0]), 1.0, 1.0)
    p = ProblemSpec(bad, zero_regularizer(), 3)
    assert check_gradient(p, 2, 0).max_deviation >= 0.5


def test_check_gradient_paper6(paper6):
    assert check_gradient(paper6, 1, 0).max_deviation <= 1e-5


def test_check_gradient_deterministic():
    p = ProblemSpec(half_norm(), zero_regularizer(), 3)
    assert check_gradient(p, 3, 7) == check_gradient(p, 3, 7)


def test_gap_termwise_matches_direct(paper6, paper6_x0):
    direct = paper6.f(paper6_x0) - paper6.optimum.f
    assert paper6.gap(paper6_x0) == pytest.approx(direct, rel=1e-12)


def test_gap_uses_cancellation_free_differences(paper6):
    # one ulp off x* on a flat MCP coordinate: f moves by d^2/2 ~ 1e-30,
    # far below the roundoff of f itself (~3e4)
    x = paper6.optimum.x.copy()
    x[0] = np.nextafter(10.0, 11.0)
    d = x[0] - 10.0
    assert paper6.gap(x) == pytest.approx(0.5 * d * d, rel=1e-14)


def test_dense_quadratic_diff():
    Q = np.array([[3.0, 1.0], [1.0, 2.0]])
    c = np.array([1.0, -2.0])
    g = quadratic(Q, c)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x, r = rng.standard_normal((2, 2))
        assert g.diff(x, r) == pytest.approx(g.value(x) - g.value(r), rel=1e-12, abs=1e-14)
