import numpy as np
import pytest

from oracles import explicit_rk_step
from rowdae.conditions import stability_function
from rowdae.errors import (
    InconsistentInitialState,
    MissingDenseCoefficients,
    NonFiniteState,
    SingularIterationMatrix,
    StepUnderflow,
)
from rowdae.problems import prob1
from rowdae.steppers import (
    IntegrationStats,
    MassMatrixProblem,
    SemiExplicitDAE,
    fd_jacobian,
    fd_time_derivative,
    half_explicit_step,
    integrate_adaptive,
    integrate_fixed,
    interpolate,
    row_step,
)
from rowdae.tableau import linearly_implicit_euler, ros2, tsit5da


def _decay(lam=-1.0):
    return MassMatrixProblem(
        mass=np.eye(1),
        f=lambda t, y: lam * y,
        t0=0.0,
        y0=np.array([1.0]),
        jac=lambda t, y: np.array([[lam]]),
        f_t=lambda t, y: np.zeros(1),
    )


# -- finite differences -------------------------------------------------------


def test_fd_jacobian_exact_on_linear_rhs():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(4, 4))
    y = rng.normal(size=4)
    jac = fd_jacobian(lambda t, y: a @ y, 0.0, y, args=(y,))
    assert np.max(np.abs(jac - a)) < 1e-7


def test_fd_jacobian_argument_selection():
    y = np.array([1.0, 2.0])
    z = np.array([3.0])

    def g(t, y, z):
        return np.array([y[0] * z[0] + y[1] ** 2])

    gy = fd_jacobian(g, 0.0, y, argindex=1, args=(y, z))
    gz = fd_jacobian(g, 0.0, z, argindex=2, args=(y, z))
    assert np.allclose(gy, [[3.0, 4.0]], atol=1e-6)
    assert np.allclose(gz, [[1.0]], atol=1e-6)


def test_fd_time_derivative():
    out = fd_time_derivative(lambda t, y: np.array([np.sin(t), 0.0]), 0.3, args=(None,))
    assert abs(out[0] - np.cos(0.3)) < 1e-7
    assert out[1] == 0.0  # autonomous component differences to exactly zero


def test_fd_nonfinite_detection():
    with pytest.raises(NonFiniteState):
        fd_jacobian(lambda t, y: np.array([np.nan]), 0.0, np.ones(1), args=(np.ones(1),))
    with np.errstate(invalid="ignore"), pytest.raises(NonFiniteState):
        fd_time_derivative(lambda t: np.array([np.inf]), 0.0)


# -- single implicit steps ----------------------------------------------------


def test_euler_step_closed_form():
    # (1 - h*gamma*lam) k = h*lam*y  =>  y1 = y (1 + h lam / (1 - h lam)),
    # with lam = -1, h = 1/2: y1 = 2/3
    out = row_step(_decay(), linearly_implicit_euler(), 0.0, np.array([1.0]), 0.5)
    assert out.y1[0] == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert out.z1 is None and out.yhat1 is None


def test_constant_solution_is_exact():
    prob = MassMatrixProblem(
        mass=np.eye(2),
        f=lambda t, y: np.zeros(2),
        t0=0.0,
        y0=np.array([3.0, -4.0]),
        jac=lambda t, y: np.zeros((2, 2)),
        f_t=lambda t, y: np.zeros(2),
    )
    traj = integrate_fixed(prob, ros2(), 0.25, 2.0)
    assert np.array_equal(traj.states[-1], prob.y0)


def test_row_step_matches_stability_function():
    lams = np.array([-1.0, -2.0])
    prob = MassMatrixProblem(
        mass=np.eye(2),
        f=lambda t, y: lams * y,
        t0=0.0,
        y0=np.array([1.0, 1.0]),
        jac=lambda t, y: np.diag(lams),
        f_t=lambda t, y: np.zeros(2),
    )
    h = 0.3
    tab = ros2()
    out = row_step(prob, tab, 0.0, prob.y0, h)
    for i, lam in enumerate(lams):
        assert out.y1[i] == pytest.approx(
            float(np.real(stability_function(tab, h * lam))), abs=1e-12
        )


def test_row_step_singular_iteration_matrix():
    tab = ros2()
    prob = _decay(lam=1.0)
    h = 1.0 / tab.gamma  # makes 1 - h*gamma*lam vanish
    with pytest.raises(SingularIterationMatrix):
        row_step(prob, tab, 0.0, np.array([1.0]), h)


def test_step_kind_pairing_enforced():
    with pytest.raises(ValueError, match="'row'"):
        row_step(_decay(), tsit5da(), 0.0, np.array([1.0]), 0.1)
    ode = SemiExplicitDAE(f=lambda t, y, z: -y, g=None, t0=0.0, y0=np.array([1.0]))
    with pytest.raises(ValueError, match="half_explicit"):
        half_explicit_step(ode, ros2(), 0.0, ode.y0, ode.z0, 0.1)
    with pytest.raises(ValueError, match="tableau"):
        integrate_fixed(ode, ros2(), 0.1, 1.0)
    with pytest.raises(ValueError, match="tableau"):
        integrate_fixed(_decay(), tsit5da(), 0.1, 1.0)


def test_row_step_counts_evaluations():
    stats = IntegrationStats()
    row_step(_decay(), ros2(), 0.0, np.array([1.0]), 0.1, stats)
    assert stats.nf == 2  # one evaluation per distinct stage
    assert stats.njac == 1 and stats.nlu == 1
    assert stats.nf_jac == 0  # analytic derivatives supplied


def test_row_step_fd_fallback_counts():
    prob = MassMatrixProblem(
        mass=np.eye(1), f=lambda t, y: -y, t0=0.0, y0=np.array([1.0])
    )
    stats = IntegrationStats()
    row_step(prob, ros2(), 0.0, np.array([1.0]), 0.1, stats)
    assert stats.nf_jac == 2  # one column plus the time derivative


# -- explicit path of the half-explicit scheme --------------------------------


def test_pure_ode_reduces_to_explicit_runge_kutta():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(3, 3))
    a = a - 1.5 * np.eye(3)

    def f(t, y, z):
        return a @ y + np.sin(t)

    ode = SemiExplicitDAE(f=f, g=None, t0=0.0, y0=rng.normal(size=3))
    tab = tsit5da()
    stats = IntegrationStats()
    out = half_explicit_step(ode, tab, 0.2, ode.y0, ode.z0, 0.05, stats)
    ref = explicit_rk_step(
        tab.alpha, tab.b, lambda t, y: f(t, y, None), 0.2, ode.y0, 0.05
    )
    assert np.max(np.abs(out.y1 - ref)) < 1e-14 * max(1.0, np.max(np.abs(ref)))
    assert out.z1.size == 0
    assert stats.nlu == 0 and stats.ng == 0 and stats.njac == 0


def test_explicit_path_never_factorizes():
    ode = SemiExplicitDAE(
        f=lambda t, y, z: -y, g=None, t0=0.0, y0=np.array([1.0])
    )
    traj = integrate_adaptive(ode, tsit5da(), 1e-8, 1e-8, 5.0)
    assert traj.stats.nlu == 0
    assert traj.stats.ng == 0
    assert abs(traj.states[-1, 0] - np.exp(-5.0)) < 1e-6


def test_half_explicit_stability_polynomial():
    # on a pure ODE the scheme is the explicit method of the alpha rows, so
    # the amplification factor is 1 + z b (I - z alpha)^(-1) 1
    lam = -0.7
    ode = SemiExplicitDAE(
        f=lambda t, y, z: lam * y, g=None, t0=0.0, y0=np.array([1.0])
    )
    tab = tsit5da()
    h = 0.2
    out = half_explicit_step(ode, tab, 0.0, ode.y0, ode.z0, h)
    z = h * lam
    expect = 1.0 + z * (tab.b @ np.linalg.solve(np.eye(tab.s) - z * tab.alpha,
                                                np.ones(tab.s)))
    assert out.y1[0] == pytest.approx(expect, rel=1e-13)


# -- algebraic stages ----------------------------------------------------------


def test_duplicate_stage_reuse_keeps_eval_count_low():
    bench = prob1()
    dae = bench.semi_explicit
    tab = tsit5da()
    traj = integrate_fixed(dae, tab, (bench.t_end - dae.t0) / 8, bench.t_end)
    # one alpha row repeats, so 12 stages cost 11 fresh f and g evaluations
    assert traj.stats.nf == 8 * 11
    assert traj.stats.ng == 8 * 11
    assert traj.stats.nlu == 8
    assert traj.stats.njac == 8


def test_inconsistent_initial_state_rejected():
    with pytest.raises(InconsistentInitialState):
        SemiExplicitDAE(
            f=lambda t, y, z: -y,
            g=lambda t, y, z: y - z - 1.0,
            t0=0.0,
            y0=np.array([1.0]),
            z0=np.array([1.0]),
        )


def test_half_explicit_converges_on_dae():
    bench = prob1()
    dae = bench.semi_explicit
    tab = tsit5da()
    errs = []
    for h in (0.1, 0.05):
        traj = integrate_fixed(dae, tab, h, dae.t0 + 1.0)
        exact = bench.exact_states(dae.t0 + 1.0)[0]
        errs.append(np.max(np.abs(traj.states[-1] - exact)))
    order = np.log2(errs[0] / errs[1])
    assert order > 4.5


def test_stiffly_accurate_row_keeps_constraint_small():
    bench = prob1()
    prob = bench.mass_matrix
    h = 0.01
    traj = integrate_fixed(prob, linearly_implicit_euler(), h, prob.t0 + 1.0)
    # second equation of the mass form is the constraint y/z - t = 0; a
    # stiffly accurate method drags the linearization error along but keeps
    # the defect on the step scale
    ys, zs = traj.states[-1]
    defect = abs(ys / zs - traj.ts[-1])
    assert defect < 10 * h**2


# -- fixed-step driver ----------------------------------------------------------


def test_fixed_step_count_validation():
    prob = _decay()
    with pytest.raises(ValueError, match="whole number"):
        integrate_fixed(prob, ros2(), 0.3, 1.0)
    traj = integrate_fixed(prob, ros2(), 0.25, 1.0)
    assert len(traj.ts) == 5
    assert traj.ts[-1] == 1.0


def test_fixed_step_requires_embedded_for_use_embedded():
    with pytest.raises(ValueError, match="embedded"):
        integrate_fixed(_decay(), linearly_implicit_euler(), 0.25, 1.0, use_embedded=True)


def test_use_embedded_propagates_embedded_weights():
    prob = _decay()
    tab = ros2()
    out = row_step(prob, tab, 0.0, prob.y0, 0.25)
    traj_main = integrate_fixed(prob, tab, 0.25, 0.25)
    traj_emb = integrate_fixed(prob, tab, 0.25, 0.25, use_embedded=True)
    assert np.array_equal(traj_main.states[-1], out.y1)
    assert np.array_equal(traj_emb.states[-1], out.yhat1)
    assert not np.array_equal(traj_main.states[-1], traj_emb.states[-1])


# -- adaptive driver -------------------------------------------------------------


def test_adaptive_argument_validation():
    prob = _decay()
    with pytest.raises(ValueError, match="embedded"):
        integrate_adaptive(prob, linearly_implicit_euler(), 1e-6, 1e-6, 1.0)
    with pytest.raises(ValueError, match="positive"):
        integrate_adaptive(prob, ros2(), 0.0, 1e-6, 1.0)
    with pytest.raises(ValueError, match="exceed"):
        integrate_adaptive(prob, ros2(), 1e-6, 1e-6, -1.0)


def test_adaptive_decay_accuracy_and_counters():
    traj = integrate_adaptive(_decay(), ros2(), 1e-8, 1e-8, 1.0)
    assert abs(traj.states[-1, 0] - np.exp(-1.0)) < 1e-6
    assert traj.ts[-1] == 1.0
    assert np.all(np.diff(traj.ts) > 0)
    st = traj.stats
    assert st.nsucc == len(traj.ts) - 1
    # the implicit scheme factorizes once per attempted step
    assert st.nlu == st.nsucc + st.nfail


def test_adaptive_on_semi_explicit_dae():
    bench = prob1()
    traj = integrate_adaptive(bench.semi_explicit, tsit5da(), 1e-9, 1e-9, bench.t_end)
    exact = bench.exact_states(bench.t_end)[0]
    assert np.max(np.abs(traj.states[-1] - exact)) < 1e-7
    assert traj.stats.nlu == traj.stats.nsucc + traj.stats.nfail
    assert traj.n_diff == 1


def test_adaptive_tightening_tolerance_reduces_error():
    bench = prob1()
    errs = []
    for rtol in (1e-5, 1e-9):
        traj = integrate_adaptive(bench.semi_explicit, tsit5da(), rtol, rtol, bench.t_end)
        exact = bench.exact_states(bench.t_end)[0]
        errs.append(np.max(np.abs(traj.states[-1] - exact)))
    assert errs[1] < errs[0]


def test_nan_rhs_underflows_step_size():
    prob = MassMatrixProblem(
        mass=np.eye(1),
        f=lambda t, y: np.array([np.nan]),
        t0=0.0,
        y0=np.array([1.0]),
        jac=lambda t, y: np.zeros((1, 1)),
        f_t=lambda t, y: np.zeros(1),
    )
    with pytest.raises(StepUnderflow):
        integrate_adaptive(prob, ros2(), 1e-6, 1e-6, 1.0)


def test_max_steps_cap():
    with pytest.raises(StepUnderflow, match="attempted steps"):
        integrate_adaptive(_decay(), ros2(), 1e-10, 1e-10, 1.0, max_steps=2)


# -- dense output -----------------------------------------------------------------


def test_interpolate_requires_dense_flag():
    traj = integrate_fixed(_decay(), ros2(), 0.25, 1.0)
    with pytest.raises(MissingDenseCoefficients):
        interpolate(traj, 0.5)


def test_interpolate_range_check():
    traj = integrate_fixed(_decay(), ros2(), 0.25, 1.0, dense=True)
    with pytest.raises(ValueError, match="outside"):
        interpolate(traj, -0.1)
    with pytest.raises(ValueError, match="outside"):
        interpolate(traj, 1.1)


def test_interpolate_without_dense_coefficients():
    tab = ros2().with_updates(dense_c=None)
    assert not tab.has_dense
    traj = integrate_fixed(_decay(), tab, 0.25, 1.0, dense=True)
    with pytest.raises(MissingDenseCoefficients, match="coefficients"):
        interpolate(traj, 0.5)


def test_interpolation_hits_grid_points_exactly():
    bench = prob1()
    traj = integrate_adaptive(bench.semi_explicit, tsit5da(), 1e-7, 1e-7,
                              bench.t_end, dense=True)
    got = interpolate(traj, traj.ts)
    assert np.max(np.abs(got - traj.states)) == 0.0


def test_interpolation_is_continuous_at_segment_joins():
    bench = prob1()
    traj = integrate_adaptive(bench.semi_explicit, tsit5da(), 1e-7, 1e-7,
                              bench.t_end, dense=True)
    for seg_prev, seg_next in zip(traj.segments[:-2], traj.segments[1:-1]):
        t_join = seg_next.t0
        left = seg_prev.eval(t_join)
        right = seg_next.eval(t_join)
        assert np.max(np.abs(left - right)) < 1e-13


def test_interpolation_scalar_and_array_shapes():
    traj = integrate_fixed(_decay(), ros2(), 0.25, 1.0, dense=True)
    one = interpolate(traj, 0.4)
    assert one.shape == (1,)
    many = interpolate(traj, np.array([0.1, 0.6, 0.9]))
    assert many.shape == (3, 1)


def test_dense_output_accuracy_between_nodes():
    bench = prob1()
    dae = bench.semi_explicit
    errs = []
    for h in (0.05, 0.025):
        traj = integrate_fixed(dae, tsit5da(), h, dae.t0 + 1.0, dense=True)
        mids = traj.ts[:-1] + h / 2
        got = interpolate(traj, mids)
        errs.append(np.max(np.abs(got - bench.exact_states(mids))))
    assert errs[0] < 1e-4
    # the interpolant is one order below the step: error drops ~2**4
    assert errs[0] / errs[1] > 12.0
