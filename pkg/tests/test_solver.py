import math

import numpy as np
import pytest

from conftest import mu_zero_l1, pure_quadratic, small_l1, small_mcp
from sr2fista import solver
from sr2fista.diagnostics import momentum_identity_residual
from sr2fista.exceptions import ArgumentError, DivergenceError, SR2Error
from sr2fista.problem import ProblemSpec, SmoothOracle, quadratic, zero_regularizer
from sr2fista.schedule import ScheduleParams
from sr2fista.solver import Backtracking, SolverConfig, initial_state, solve


def test_first_interpolation_point_is_x0(paper6, paper6_x0):
    cfg = SolverConfig()
    sp = ScheduleParams.from_problem(paper6, "compromised")
    st = solver.sr2fista_step(initial_state(paper6_x0), paper6, cfg, sp)
    np.testing.assert_array_equal(st.last.z, paper6_x0)


def test_first_step_is_gradient_step():
    Q = np.array([[4.0, 1.0], [1.0, 3.0]])
    p = ProblemSpec(quadratic(Q, np.array([1.0, -1.0])), zero_regularizer(), 2)
    sp = ScheduleParams(p.smooth.lipschitz_L, 0.0, 0.0)
    x0 = np.array([2.0, 5.0])
    st = solver.sr2fista_step(initial_state(x0), p, SolverConfig(), sp)
    expected = x0 - p.smooth.gradient(x0) / sp.alpha
    np.testing.assert_allclose(st.x, expected, rtol=0, atol=1e-12)


def test_first_step_decreases_objective(paper6, paper6_x0):
    res = solve(paper6, SolverConfig(max_iters=1), paper6_x0)
    assert paper6.f(res.state.x) < paper6.f(paper6_x0)


def test_ista_fixed_point_quadratic():
    p = pure_quadratic()
    x = solve(p, SolverConfig(max_iters=1), p.optimum.x, "ista").state.x
    np.testing.assert_allclose(x, p.optimum.x, atol=1e-15)
    x = solve(p, SolverConfig(max_iters=1), np.zeros(2), "ista", eta=0.1).state.x
    g = p.smooth.gradient(np.zeros(2))
    np.testing.assert_allclose(x, -0.1 * g)


def test_ista_fixed_point_paper6(paper6):
    x_star = paper6.optimum.x
    x = solve(paper6, SolverConfig(max_iters=1), x_star, "ista", eta=1e-4).state.x
    np.testing.assert_allclose(x, x_star, atol=1e-12)


@pytest.mark.parametrize("make", [small_l1, small_mcp, pure_quadratic])
def test_ista_monotone(make):
    p = make()
    res = solve(p, SolverConfig(max_iters=200), np.ones(p.dimension), "ista")
    gaps = [r.f_gap for r in res.trace]
    assert all(b <= a + 1e-12 * max(1.0, abs(a)) for a, b in zip(gaps, gaps[1:]))


def test_initial_lyapunov_is_squared_distance(paper6, paper6_x0):
    res = solve(paper6, SolverConfig(max_iters=0), paper6_x0)
    d = paper6_x0 - paper6.optimum.x
    assert res.trace[0].lyapunov == pytest.approx(float(d @ d), rel=1e-15)
    assert res.state.k == 0 and res.stop_reason == "max_iters"


def test_target_gap_stops_immediately(paper6, paper6_x0):
    res = solve(paper6, SolverConfig(max_iters=50, target_gap=math.inf), paper6_x0)
    assert res.state.k == 0 and res.stop_reason == "target_gap"


def test_target_gap_reached():
    p = small_l1()
    res = solve(p, SolverConfig(max_iters=5000, target_gap=1e-8), np.ones(p.dimension))
    assert res.stop_reason == "target_gap"
    assert res.trace[-1].f_gap <= 1e-8


def test_target_gap_needs_optimum():
    p = ProblemSpec(quadratic(np.eye(2), np.zeros(2)), zero_regularizer(), 2)
    with pytest.raises(ArgumentError):
        solve(p, SolverConfig(target_gap=1.0), np.zeros(2))


def test_result_unpacks():
    p = pure_quadratic()
    state, trace = solve(p, SolverConfig(max_iters=3), np.zeros(2))
    assert state.k == 3 and [r.k for r in trace] == [0, 1, 2, 3]


def test_trace_every_keeps_last_row():
    p = pure_quadratic()
    res = solve(p, SolverConfig(max_iters=10, trace_every=4), np.zeros(2))
    assert [r.k for r in res.trace] == [0, 4, 8, 10]


def test_divergence_annotated_with_iteration():
    calls = {"n": 0}

    def grad(x):
        calls["n"] += 1
        return np.full_like(x, np.inf) if calls["n"] > 3 else x.copy()

    g = SmoothOracle(lambda x: 0.5 * float(x @ x), grad, 1.0, 1.0)
    p = ProblemSpec(g, zero_regularizer(), 2)
    with pytest.raises(DivergenceError) as info:
        solve(p, SolverConfig(max_iters=10), np.ones(2))
    assert info.value.iteration == 3
    assert "iteration 3" in str(info.value)
    assert isinstance(info.value, SR2Error)


def test_wrong_dimension_rejected(paper6):
    with pytest.raises(ArgumentError):
        solve(paper6, SolverConfig(), np.ones(3))


def test_unknown_algorithm(paper6, paper6_x0):
    with pytest.raises(ArgumentError):
        solve(paper6, SolverConfig(), paper6_x0, algorithm="newton")


@pytest.mark.parametrize("bad", [dict(beta_mode="x"), dict(max_iters=-1),
                                 dict(trace_every=0), dict(target_gap=-1.0)])
def test_config_validation(bad):
    with pytest.raises(ArgumentError):
        SolverConfig(**bad)


def test_backtracking_parse():
    assert Backtracking.parse("1,2") == Backtracking(1.0, 2.0)
    assert Backtracking.parse("3.5") == Backtracking(3.5, 2.0)
    for bad in ("", "a,b", "1,2,3", "1,1", "0,2"):
        with pytest.raises(ArgumentError):
            Backtracking.parse(bad)


def test_backtracking_no_retries_when_L0_large(paper6, paper6_x0):
    cfg = SolverConfig(max_iters=20, backtracking=Backtracking(5000.0, 2.0))
    st = initial_state(paper6_x0, 5000.0)
    for _ in range(20):
        st = solver.sr2fista_backtracking_step(st, paper6, cfg)
        assert st.last.retries == 0
        assert st.L_current == 5000.0


def test_backtracking_retry_count_bounded(paper6, paper6_x0):
    L = 5000.0
    cfg = SolverConfig(backtracking=Backtracking(L / 1024, 2.0))
    st = solver.sr2fista_backtracking_step(initial_state(paper6_x0, L / 1024), paper6, cfg)
    assert st.last.retries <= 10
    assert st.L_current <= L


def test_backtracking_matches_fixed_when_exact(paper6, paper6_x0):
    a = solve(paper6, SolverConfig(max_iters=30), paper6_x0).state.x
    b = solve(paper6, SolverConfig(max_iters=30, backtracking=Backtracking(5000.0)),
              paper6_x0).state.x
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("mode", ["compromised", "plain"])
def test_momentum_identity_along_run(mode):
    p = small_mcp()
    cfg = SolverConfig(beta_mode=mode)
    sp = ScheduleParams.from_problem(p, mode)
    st = initial_state(np.ones(p.dimension))
    for _ in range(50):
        new = solver.sr2fista_step(st, p, cfg, sp)
        r = momentum_identity_residual(st.x, new.x, new.last.z, st.A, new.A)
        scale = new.A * float((new.x - new.last.z) @ (new.x - new.last.z)) + 1.0
        assert abs(r) <= 1e-10 * scale
        st = new


def test_converges_on_mu_zero_instance():
    p = mu_zero_l1()
    assert p.mu == 0.0
    res = solve(p, SolverConfig(max_iters=2000), np.ones(p.dimension))
    assert res.trace[-1].f_gap < 1e-6


def test_linear_rate_on_quadratic():
    p = pure_quadratic()
    res = solve(p, SolverConfig(max_iters=300), np.array([5.0, 5.0]))
    assert res.trace[-1].f_gap < 1e-20 or res.stop_reason == "saturated"


def _precision_floor_prefix(p, trace, rtol=1e-9):
    """Traced rows before ``A_k ulp(x*)^2`` could exceed the monotonicity tolerance.

    Past that point an iterate one ulp away from ``x*`` already moves E_k by
    more than the tolerance, so double precision cannot resolve the decrease.
    """
    ulp2 = float(np.sum(np.spacing(np.abs(p.optimum.x)) ** 2))
    tol = rtol * max(1.0, trace[0].lyapunov)
    return [r for r in trace if r.A * ulp2 * max(1.0, p.smooth.lipschitz_L) <= tol]


@pytest.mark.parametrize("make", [small_l1, small_mcp, pure_quadratic])
@pytest.mark.parametrize("mode", ["compromised", "plain"])
def test_lyapunov_monotone_above_precision_floor(make, mode):
    from sr2fista.diagnostics import check_lyapunov_monotone
    p = make()
    res = solve(p, SolverConfig(beta_mode=mode, max_iters=2000), np.ones(p.dimension))
    rows = _precision_floor_prefix(p, res.trace)
    assert len(rows) > 30
    cert = check_lyapunov_monotone([r.lyapunov for r in rows], [r.k for r in rows])
    assert cert.passed, str(cert)


@pytest.mark.parametrize("mode", ["compromised", "plain"])
def test_runs_cleanly_into_saturation(mode):
    p = small_mcp()
    res = solve(p, SolverConfig(beta_mode=mode, max_iters=100000, trace_every=50),
                np.ones(p.dimension))
    assert res.stop_reason == "saturated"
    assert res.state.A > 1e300
    assert all(math.isfinite(s.eta) and s.eta > 0 for s in res.steps)
    assert max(abs(r.schedule_residual) for r in res.trace[1:]) <= 1e-9
