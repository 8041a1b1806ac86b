"""Discretization method tests: closed forms, cross-method agreement,
invariant certificates, and failure modes."""

import math

import numpy as np
import pytest

from sdedisc.errors import (MatrixOverflowError, MethodNotApplicableError,
                            NilpotencyError, UnsupportedSpectrumError)
from sdedisc.models import ContinuousModel, Method, EXACT_METHODS
from sdedisc.modelgen import (EnsembleSpec, gen_random_system,
                              constant_velocity, observer_canonical)
from sdedisc.discretize import (discretize_lyap_p, discretize_lyap_q,
                                discretize_proposed, discretize_vanloan,
                                naive_q_a, naive_q_b, q_oracle, q_nilpotent,
                                run_method, lemma2_residual,
                                semigroup_residual)
from sdedisc.linalg import mat_exp, solve_lyapunov, spectral_norm


SCALAR = ContinuousModel(np.array([[-1.0]]), np.array([[2.0]]))


def rel_err(got, want):
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    return spectral_norm(got - want) / max(spectral_norm(want), 1e-300)


def cv_reference(t):
    f = np.array([[1.0, t], [0.0, 1.0]])
    q = np.array([[t ** 3 / 3, t ** 2 / 2], [t ** 2 / 2, t]])
    return f, q


# --------------------------------------------------------- scalar golden


@pytest.mark.parametrize("method", list(EXACT_METHODS))
def test_scalar_closed_form(method):
    # A = -1, S = 2: Q_T = 1 - exp(-2T)
    t = 1.0
    report = run_method(SCALAR, t, method)
    assert report.model.q[0, 0] == pytest.approx(1.0 - math.exp(-2.0),
                                                 rel=1e-11)
    assert report.model.f[0, 0] == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_scalar_unstable_lyap_q():
    m = ContinuousModel(np.array([[1.0]]), np.array([[2.0]]))
    report = discretize_lyap_q(m, 1.0)
    assert report.model.q[0, 0] == pytest.approx(math.exp(2.0) - 1.0,
                                                 rel=1e-12)


def test_scalar_unstable_lyap_p_not_applicable():
    m = ContinuousModel(np.array([[1.0]]), np.array([[2.0]]))
    with pytest.raises(MethodNotApplicableError):
        discretize_lyap_p(m, 1.0)


# --------------------------------------------------- constant velocity


@pytest.mark.parametrize("t", [0.1, 1.0, 2.0, 10.0])
def test_constant_velocity_closed_form(t):
    cv = constant_velocity()
    fref, qref = cv_reference(t)
    for method in (Method.PROPOSED, Method.VANLOAN, Method.ORACLE):
        report = run_method(cv, t, method)
        assert rel_err(report.model.q, qref) < 1e-12
        assert rel_err(report.model.f, fref) < 1e-12


def test_constant_velocity_lyap_methods_not_applicable():
    cv = constant_velocity()
    with pytest.raises(MethodNotApplicableError):
        discretize_lyap_p(cv, 1.0)
    with pytest.raises(MethodNotApplicableError):
        discretize_lyap_q(cv, 1.0)


def test_proposed_reports_integrator_count():
    report = discretize_proposed(constant_velocity(), 1.0)
    assert report.diagnostics["integrator_count"] == 2.0
    assert report.diagnostics["split_index"] == 0.0


# ---------------------------------------------------------- t = 0 and t


@pytest.mark.parametrize("method", list(Method))
def test_zero_horizon_is_identity_and_zero(method):
    if method is Method.NAIVE_A:
        return  # naive_q_a divides by t; dispatcher handles t=0 below
    report = run_method(SCALAR, 0.0, method)
    assert np.array_equal(report.model.f, np.eye(1))
    assert np.array_equal(report.model.q, np.zeros((1, 1)))


def test_negative_horizon_rejected():
    with pytest.raises(ValueError):
        discretize_proposed(SCALAR, -1.0)


# ------------------------------------------------------------ nilpotent


def test_q_nilpotent_single_integrator():
    got = q_nilpotent(np.array([[0.0]]), np.array([[3.0]]), 2.0)
    assert got[0, 0] == pytest.approx(6.0)


def test_q_nilpotent_two_chain_matches_closed_form():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    s = np.array([[0.0, 0.0], [0.0, 1.0]])
    t = 1.7
    _, qref = cv_reference(t)
    assert rel_err(q_nilpotent(a, s, t), qref) < 1e-15


def test_q_nilpotent_rejects_non_nilpotent():
    with pytest.raises(NilpotencyError):
        q_nilpotent(np.array([[1.0]]), np.array([[1.0]]), 1.0)


# -------------------------------------------------- cross-method checks


def stable_system(stream):
    return gen_random_system(EnsembleSpec(n=6, m=6, p=0, seed=100),
                             stream=stream)


def mixed_system(stream):
    return gen_random_system(EnsembleSpec(n=6, m=4, p=2, seed=100),
                             stream=stream)


@pytest.mark.parametrize("stream", range(5))
def test_stable_methods_agree(stream):
    m = stable_system(stream)
    t = 0.8
    qs = {meth: run_method(m, t, meth).model.q
          for meth in (Method.LYAP_P, Method.LYAP_Q, Method.PROPOSED,
                       Method.VANLOAN)}
    q_ref = q_oracle(m, t, rel_tol=1e-12)
    for meth, q in qs.items():
        assert rel_err(q, q_ref) < 1e-9, meth


@pytest.mark.parametrize("stream", range(5))
def test_integrator_proposed_matches_oracle(stream):
    m = mixed_system(stream)
    for t in (0.1, 1.0, 10.0):
        report = discretize_proposed(m, t)
        assert rel_err(report.model.q, q_oracle(m, t)) < 1e-8
        assert rel_err(report.model.f, mat_exp(m.a, t)) < 1e-10


def test_integrator_lyap_q_not_applicable():
    with pytest.raises(MethodNotApplicableError):
        discretize_lyap_q(mixed_system(0), 1.0)


def test_observer_canonical_proposed_matches_oracle():
    m = observer_canonical([3.0, 2.0], [1.0, 0.5], p=2)
    report = discretize_proposed(m, 1.5)
    assert report.diagnostics["integrator_count"] == 2.0
    assert rel_err(report.model.q, q_oracle(m, 1.5)) < 1e-9


def test_mirrored_poles_unsupported_by_proposed():
    a = np.diag([1.0, -1.0])
    m = ContinuousModel(a, np.eye(2))
    with pytest.raises((UnsupportedSpectrumError, MethodNotApplicableError)):
        discretize_proposed(m, 1.0)
    # the quadrature oracle still works there
    q = q_oracle(m, 1.0)
    assert q[0, 0] == pytest.approx((math.exp(2.0) - 1.0) / 2.0, rel=1e-10)


# ----------------------------------------------------------- stationary


def test_lyap_p_reaches_stationary_covariance():
    m = stable_system(7)
    p = solve_lyapunov(m.a, -m.s)
    t = 150.0  # exp(A t) is negligible here
    report = discretize_lyap_p(m, t)
    assert rel_err(report.model.q, p) < 1e-9


# ------------------------------------------------------------ van loan


def test_vanloan_float32_overflows_at_large_horizon():
    m = stable_system(3).astype(np.float32)
    with pytest.raises(MatrixOverflowError):
        discretize_vanloan(m, 100.0)


# ---------------------------------------------------------------- foils


def test_naive_b_is_linear_in_t():
    got = naive_q_b(SCALAR, 2.5)
    assert got[0, 0] == pytest.approx(5.0)


def test_naive_foils_violate_semigroup():
    assert semigroup_residual(SCALAR, Method.NAIVE_B, 1.0, 1.0) > 0.1
    assert semigroup_residual(SCALAR, Method.NAIVE_A, 1.0, 1.0) > 0.01


def test_exact_methods_satisfy_semigroup():
    m = mixed_system(2)
    for meth in (Method.PROPOSED, Method.VANLOAN):
        assert semigroup_residual(m, meth, 0.7, 0.7) < 1e-9


def test_naive_a_between_endpoints():
    # the held-noise foil is wrong but finite and PSD
    q = naive_q_a(SCALAR, 1.0)
    assert 0.0 < q[0, 0] < 2.0


# --------------------------------------------------------------- oracle


def test_q_oracle_scalar_closed_form():
    for t in (0.01, 1.0, 25.0):
        got = q_oracle(SCALAR, t)[0, 0]
        assert got == pytest.approx(1.0 - math.exp(-2.0 * t), rel=1e-11)


def test_q_oracle_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        q_oracle(SCALAR, 1.0, rel_tol=0.0)


def test_q_oracle_symmetric_output():
    m = mixed_system(4)
    q = q_oracle(m, 3.0)
    assert np.array_equal(q, q.T)


# ----------------------------------------------------------- residuals


def test_lemma2_residual_detects_wrong_q():
    f, qref = cv_reference(1.0)
    cv = constant_velocity()
    assert lemma2_residual(cv, f, qref) < 1e-14
    assert lemma2_residual(cv, f, 2.0 * qref) > 1e-3


def test_reports_carry_lemma2_residual():
    for meth in EXACT_METHODS:
        report = run_method(SCALAR, 1.0, meth)
        assert report.diagnostics["lemma2_residual"] < 1e-12


# -------------------------------------------------------------- widths


def test_proposed_float32_pipeline():
    m = mixed_system(1).astype(np.float32)
    report = discretize_proposed(m, 1.0)
    assert report.model.q.dtype == np.float32
    assert report.model.f.dtype == np.float32
    q64 = discretize_proposed(mixed_system(1), 1.0).model.q
    assert rel_err(report.model.q, q64) < 5e-3


def test_proposed_float32_error_flat_in_horizon():
    m = mixed_system(6)
    m32 = m.astype(np.float32)
    errs = {}
    for t in (1.0, 100.0):
        q32 = discretize_proposed(m32, t).model.q
        errs[t] = rel_err(q32, q_oracle(m, t))
    assert errs[100.0] < 50.0 * errs[1.0]
    assert errs[100.0] < 1e-3


# ------------------------------------------------------------ dispatch


def test_run_method_accepts_string_names():
    report = run_method(SCALAR, 1.0, "proposed")
    assert report.method is Method.PROPOSED


def test_run_method_unknown_name():
    with pytest.raises(ValueError):
        run_method(SCALAR, 1.0, "simpson")
