"""Discretization methods for linear stochastic systems.

Given a continuous-time model (A, S) and a sampling interval T, every
method here produces the transition matrix F = exp(A T) and an estimate of
the process-noise covariance Q = int_0^T exp(A tau) S exp(A^T tau) dtau:

* ``discretize_lyap_p``   -- stationary-covariance route (stable A only).
* ``discretize_lyap_q``   -- direct Lyapunov route (needs no eigenvalue
  pair of A summing to zero; stability not required).
* ``discretize_proposed`` -- Schur reordering splits off the integrator
  (zero-eigenvalue) block, whose covariance has a finite closed-form sum;
  the remaining blocks come from Sylvester/Lyapunov solves.
* ``discretize_vanloan``  -- exponential of the 2n x 2n augmented matrix.
* ``naive_q_a``/``naive_q_b`` -- common approximations that are *not*
  consistent under interval splitting; kept as foils.
* ``q_oracle``            -- self-certifying Romberg quadrature reference,
  always computed in binary64.
"""

import math

import numpy as np

from . import _kernels
from .errors import (
    ConvergenceError,
    MethodNotApplicableError,
    NearSingularError,
    NilpotencyError,
    UnsupportedSpectrumError,
)
from .linalg import (
    check_square,
    eps_of,
    mat_exp,
    order_schur_zeros_last,
    quasi_tri_eigvalues,
    real_schur,
    solve_lyapunov,
    solve_sylvester,
    spectral_norm,
    tau_zero_default,
)
from .models import ContinuousModel, DiscreteModel, Method, MethodReport

_TINY = 1e-300


def _sym(x: np.ndarray) -> np.ndarray:
    return (x + x.T) / x.dtype.type(2)


def _check_horizon(t: float) -> float:
    t = float(t)
    if not t >= 0.0:
        raise ValueError(f"sampling interval must be >= 0, got {t}")
    return t


def _trivial_report(m: ContinuousModel, method: Method) -> MethodReport:
    n = m.n
    model = DiscreteModel(f=np.eye(n, dtype=m.dtype),
                          q=np.zeros((n, n), dtype=m.dtype), horizon=0.0)
    return MethodReport(model=model, method=method,
                        diagnostics={"sylvester_residual": 0.0,
                                     "lemma2_residual": 0.0})


def _drift_eigvalues(m: ContinuousModel) -> np.ndarray:
    _, tt = real_schur(m.a)
    return quasi_tri_eigvalues(tt)


def _lyap_residual(a, x, rhs) -> float:
    num = np.linalg.norm(a @ x + x @ a.T - rhs)
    den = 2.0 * np.linalg.norm(a) * np.linalg.norm(x) + _TINY
    return float(num / den)


def discretize_lyap_p(m: ContinuousModel, t: float) -> MethodReport:
    """Stationary-covariance method: A P + P A^T = -S, then
    Q = P - F P F^T.  Requires a strictly stable drift."""
    t = _check_horizon(t)
    if t == 0.0:
        return _trivial_report(m, Method.LYAP_P)
    evs = _drift_eigvalues(m)
    if float(evs.real.max()) >= -tau_zero_default(m.a):
        raise MethodNotApplicableError(
            "lyap-p requires a strictly stable drift; max Re(lambda) = "
            f"{evs.real.max():.3e}")
    try:
        p = solve_lyapunov(m.a, -m.s)
    except NearSingularError as exc:
        raise MethodNotApplicableError(
            f"lyap-p not applicable: {exc}") from exc
    f = mat_exp(m.a, t)
    q = _sym(p - f @ p @ f.T)
    diag = {
        "sylvester_residual": _lyap_residual(m.a, p, -m.s),
        "lemma2_residual": lemma2_residual(m, f, q),
    }
    return MethodReport(DiscreteModel(f, q, t), Method.LYAP_P, diag)


def discretize_lyap_q(m: ContinuousModel, t: float) -> MethodReport:
    """Direct Lyapunov method: A Q + Q A^T = -(S - F S F^T).

    Applicable whenever no two eigenvalues of A sum to zero (at working
    precision); the drift need not be stable."""
    t = _check_horizon(t)
    if t == 0.0:
        return _trivial_report(m, Method.LYAP_Q)
    evs = _drift_eigvalues(m)
    sums = np.abs(evs[:, None] + evs[None, :])
    if float(sums.min()) <= 2.0 * tau_zero_default(m.a):
        i, j = np.unravel_index(np.argmin(sums), sums.shape)
        raise MethodNotApplicableError(
            "lyap-q not applicable: eigenvalue pair "
            f"({evs[i]:.3e}, {evs[j]:.3e}) sums to ~0 (integrator or "
            "mirrored poles); unique-solution condition violated")
    f = mat_exp(m.a, t)
    v = _sym(m.s - f @ m.s @ f.T)
    try:
        q = solve_lyapunov(m.a, -v)
    except NearSingularError as exc:
        raise MethodNotApplicableError(
            f"lyap-q not applicable: {exc}") from exc
    q = _sym(q)
    diag = {
        "sylvester_residual": _lyap_residual(m.a, q, -v),
        "lemma2_residual": lemma2_residual(m, f, q),
    }
    return MethodReport(DiscreteModel(f, q, t), Method.LYAP_Q, diag)


def q_nilpotent(a22: np.ndarray, s22: np.ndarray, t: float,
                nil_tol: float | None = None) -> np.ndarray:
    """Closed-form noise covariance for a nilpotent drift block:
    sum_{i,j<p} T^(i+j+1) / (i! j! (i+j+1)) * A^i S (A^j)^T."""
    a22 = check_square(a22, "nilpotent block")
    s22 = check_square(s22, "nilpotent noise block")
    if s22.shape != a22.shape:
        raise ValueError("drift and noise blocks must have equal shape")
    t = float(t)
    p = a22.shape[0]
    powers = [np.eye(p, dtype=a22.dtype)]
    for _ in range(p):
        powers.append(powers[-1] @ a22)
    anorm = float(np.linalg.norm(a22))
    if nil_tol is None:
        nil_tol = math.sqrt(100.0 * p * eps_of(a22)) * max(anorm, 1.0) ** p
    if float(np.linalg.norm(powers[p])) > nil_tol:
        raise NilpotencyError(
            f"block is not nilpotent of index {p}: |A^p| = "
            f"{np.linalg.norm(powers[p]):.3e} > {nil_tol:.3e}")
    q = np.zeros((p, p), dtype=a22.dtype)
    for i in range(p):
        for j in range(p):
            coef = t ** (i + j + 1) / (
                math.factorial(i) * math.factorial(j) * (i + j + 1))
            q = q + coef * (powers[i] @ s22 @ powers[j].T)
    return _sym(q)


def _nilpotent_exp(a22: np.ndarray, t: float) -> np.ndarray:
    """exp(A t) for a nilpotent block as the terminating power series."""
    p = a22.shape[0]
    term = np.eye(p, dtype=a22.dtype)
    acc = term
    for i in range(1, p):
        term = (term @ a22) * (t / i)
        acc = acc + term
    return acc


def discretize_proposed(m: ContinuousModel, t: float,
                        tau_zero: float | None = None) -> MethodReport:
    """Combined method: Schur-reorder integrators into the trailing block,
    solve that block in closed form, the rest via Sylvester/Lyapunov
    equations, and transform back."""
    t = _check_horizon(t)
    if t == 0.0:
        return _trivial_report(m, Method.PROPOSED)
    n = m.n
    u0, t0 = real_schur(m.a)
    if tau_zero is None:
        tau_zero = tau_zero_default(m.a)
    u, at, k = order_schur_zeros_last(u0, t0, tau_zero)
    p = n - k
    # mirrored non-zero poles make the leading Lyapunov/Sylvester solves
    # singular; fail fast with a spectrum diagnosis
    ev1 = quasi_tri_eigvalues(at[:k, :k])
    if k > 0:
        sums = np.abs(ev1[:, None] + ev1[None, :])
        i, j = np.unravel_index(np.argmin(sums), sums.shape)
        if float(sums[i, j]) <= 200.0 * eps_of(m.a) * float(np.linalg.norm(m.a)):
            raise UnsupportedSpectrumError(
                f"non-zero poles mirrored in the imaginary axis: "
                f"{ev1[i]:.3e} and {ev1[j]:.3e}")
    # computed inverse rather than transpose: u is only orthogonal to
    # rounding, and the back-transform error is smaller with the inverse
    u_inv = np.linalg.inv(u)
    st = _sym(u_inv @ m.s @ u_inv.T)
    sylvester_residual = float("nan")
    if p == 0:
        ft = mat_exp(at, t)
        vt = _sym(st - ft @ st @ ft.T)
        try:
            qt = solve_lyapunov(at, -vt)
        except NearSingularError as exc:
            raise UnsupportedSpectrumError(
                f"proposed method not applicable: {exc}") from exc
        sylvester_residual = _lyap_residual(at, qt, -vt)
    elif k == 0:
        ft = _nilpotent_exp(at, t)
        qt = q_nilpotent(at, st, t)
    else:
        a11 = np.ascontiguousarray(at[:k, :k])
        a12 = at[:k, k:]
        a22 = np.ascontiguousarray(at[k:, k:])
        # assemble exp(at * t) blockwise: the whole-matrix exponential
        # loses accuracy for large t * |A| through repeated squaring,
        # while the leading block decays and the trailing block has a
        # terminating series; the coupling block follows from the
        # commutation identity A f - f A = 0 of f = exp(A t)
        f11 = mat_exp(a11, t)
        f22 = _nilpotent_exp(a22, t)
        try:
            f12 = solve_sylvester(a11, -a22, f11 @ a12 - a12 @ f22)
        except NearSingularError as exc:
            raise UnsupportedSpectrumError(
                f"proposed method not applicable: {exc}") from exc
        ft = np.zeros((n, n), dtype=m.dtype)
        ft[:k, :k] = f11
        ft[:k, k:] = f12
        ft[k:, k:] = f22
        vt = _sym(st - ft @ st @ ft.T)
        q22 = q_nilpotent(a22, np.ascontiguousarray(st[k:, k:]), t)
        rhs12 = -vt[:k, k:] - a12 @ q22
        try:
            q12 = solve_sylvester(a11, a22.T, rhs12)
            q11 = solve_lyapunov(
                a11, -vt[:k, :k] - a12 @ q12.T - q12 @ a12.T)
        except NearSingularError as exc:
            raise UnsupportedSpectrumError(
                f"proposed method not applicable: {exc}") from exc
        num = np.linalg.norm(a11 @ q12 + q12 @ a22.T - rhs12)
        den = ((np.linalg.norm(a11) + np.linalg.norm(a22))
               * np.linalg.norm(q12) + _TINY)
        sylvester_residual = float(num / den)
        qt = np.empty((n, n), dtype=m.dtype)
        qt[:k, :k] = q11
        qt[:k, k:] = q12
        qt[k:, :k] = q12.T
        qt[k:, k:] = q22
    f = u @ ft @ u_inv
    q = _sym(u @ qt @ u.T)
    diag = {
        "split_index": float(k),
        "integrator_count": float(p),
        "sylvester_residual": sylvester_residual,
        "lemma2_residual": lemma2_residual(m, f, q),
    }
    return MethodReport(DiscreteModel(f, q, t), Method.PROPOSED, diag)


def discretize_vanloan(m: ContinuousModel, t: float) -> MethodReport:
    """Van Loan's method: one exponential of [[A, S], [0, -A^T]].

    For large t * |Re(lambda)| the lower-right block grows like
    exp(+|lambda| t); the exponential then loses all accuracy or
    overflows, which is surfaced as MatrixOverflowError."""
    t = _check_horizon(t)
    if t == 0.0:
        return _trivial_report(m, Method.VANLOAN)
    n = m.n
    h = np.zeros((2 * n, 2 * n), dtype=m.dtype)
    h[:n, :n] = m.a
    h[:n, n:] = m.s
    h[n:, n:] = -m.a.T
    big = mat_exp(h, t)
    f = np.ascontiguousarray(big[:n, :n])
    q = _sym(big[:n, n:] @ f.T)
    diag = {"lemma2_residual": lemma2_residual(m, f, q)}
    return MethodReport(DiscreteModel(f, q, t), Method.VANLOAN, diag)


def naive_q_a(m: ContinuousModel, t: float) -> np.ndarray:
    """Foil: noise held constant over the interval,
    Q = (1/T) G S G^T with G = int_0^T exp(A tau) dtau."""
    t = _check_horizon(t)
    if t == 0.0:
        raise ValueError("naive_q_a requires t > 0")
    n = m.n
    aug = np.zeros((2 * n, 2 * n), dtype=m.dtype)
    aug[:n, :n] = m.a
    aug[:n, n:] = np.eye(n, dtype=m.dtype)
    g = mat_exp(aug, t)[:n, n:]
    return _sym((g @ m.s @ g.T) / m.dtype.type(t))


def naive_q_b(m: ContinuousModel, t: float) -> np.ndarray:
    """Foil: continuous-time intensity rescaled by the interval, Q = T S."""
    t = _check_horizon(t)
    return m.s * m.dtype.type(t)


def q_oracle(m: ContinuousModel, t: float, rel_tol: float = 1e-12,
             max_depth: int = 24) -> np.ndarray:
    """Reference covariance by composite-trapezoid quadrature of
    exp(A tau) S exp(A^T tau) with interval doubling and Richardson
    extrapolation, always in binary64."""
    t = _check_horizon(t)
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    a = np.ascontiguousarray(m.a, dtype=np.float64)
    s = np.ascontiguousarray(m.s, dtype=np.float64)
    n = m.n
    if t == 0.0:
        return np.zeros((n, n))
    e_t = mat_exp(a, t)
    row = [0.5 * t * (s + e_t @ s @ e_t.T)]
    e_step = e_t  # the step matrix at each level is the previous half-step
    # rounding noise in the propagated nodes eventually dominates the
    # diagonal differences; past that point the best estimate so far is
    # the achievable answer, acceptable down to this relative level
    noise_floor = 1e-10
    best_diff, best_est, worse_streak = math.inf, None, 0
    for level in range(1, max_depth + 1):
        h = t / 2.0 ** level
        e_half = mat_exp(a, h)
        acc = _kernels.propagated_outer_sum(e_half, e_step, s,
                                            2 ** (level - 1))
        e_step = e_half
        new_row = [0.5 * row[0] + h * acc]
        weight = 1.0
        for prev in row:
            weight *= 4.0
            new_row.append((weight * new_row[-1] - prev) / (weight - 1.0))
        est, prev_est = new_row[-1], row[-1]
        row = new_row
        if level >= 2:
            scale = max(float(np.linalg.norm(est)), _TINY)
            diff = float(np.linalg.norm(est - prev_est)) / scale
            if diff <= rel_tol:
                return _sym(est)
            if diff < best_diff:
                best_diff, best_est, worse_streak = diff, est, 0
            elif diff > 2.0 * best_diff:
                worse_streak += 1
                if (worse_streak >= 2 and level >= 6
                        and best_diff <= noise_floor):
                    return _sym(best_est)
    if best_diff <= noise_floor:
        return _sym(best_est)
    raise ConvergenceError(
        f"quadrature did not reach rel_tol={rel_tol:g} within "
        f"{max_depth} doublings (best {best_diff:.2e})", sweeps=max_depth)


def transform_model(m: ContinuousModel, u: np.ndarray,
                    u_inv: np.ndarray) -> ContinuousModel:
    """State transformation x = U z: drift U^-1 A U, noise U^-1 S U^-T."""
    u = check_square(u, "transform u")
    u_inv = check_square(u_inv, "transform u_inv")
    if u.shape != m.a.shape or u_inv.shape != m.a.shape:
        raise ValueError("transform dimensions must match the model")
    return ContinuousModel(u_inv @ m.a @ u, _sym(u_inv @ m.s @ u_inv.T))


def transform_result(d: DiscreteModel, u: np.ndarray,
                     u_inv: np.ndarray) -> DiscreteModel:
    """Back-transform of a discretization computed in z coordinates:
    F = U F~ U^-1 (similarity), Q = U Q~ U^T (congruence)."""
    u = check_square(u, "transform u")
    u_inv = check_square(u_inv, "transform u_inv")
    if u.shape != d.f.shape or u_inv.shape != d.f.shape:
        raise ValueError("transform dimensions must match the model")
    return DiscreteModel(u @ d.f @ u_inv, _sym(u @ d.q @ u.T), d.horizon)


def lemma2_residual(m: ContinuousModel, f: np.ndarray,
                    q: np.ndarray) -> float:
    """Universal correctness certificate: the exact covariance satisfies
    A Q + Q A^T = -S + F S F^T for any A (stable or not).  Returns the
    relative spectral-norm defect."""
    if f.shape != m.a.shape or q.shape != m.a.shape:
        raise ValueError("shape mismatch in lemma2_residual")
    a = m.a.astype(np.float64)
    s = m.s.astype(np.float64)
    f = f.astype(np.float64)
    q = q.astype(np.float64)
    defect = a @ q + q @ a.T + s - f @ s @ f.T
    snorm = spectral_norm(s)
    scale = 1.0 + spectral_norm(f) ** 2
    floor = eps_of(np.float64) * snorm + _TINY
    return float(spectral_norm(defect) / max(snorm * scale, floor))


def run_method(m: ContinuousModel, t: float, method: Method,
               oracle_tol: float = 1e-12,
               tau_zero: float | None = None) -> MethodReport:
    """Uniform dispatcher.  Foils and the oracle are wrapped into a
    MethodReport using the true transition matrix F = exp(A t)."""
    if not isinstance(method, Method):
        method = Method(method)
    if method is Method.LYAP_P:
        return discretize_lyap_p(m, t)
    if method is Method.LYAP_Q:
        return discretize_lyap_q(m, t)
    if method is Method.PROPOSED:
        return discretize_proposed(m, t, tau_zero=tau_zero)
    if method is Method.VANLOAN:
        return discretize_vanloan(m, t)
    t = _check_horizon(t)
    if method in (Method.NAIVE_A, Method.NAIVE_B):
        if t == 0.0:
            return _trivial_report(m, method)
        q = naive_q_a(m, t) if method is Method.NAIVE_A else naive_q_b(m, t)
        f = mat_exp(m.a, t)
        diag = {"lemma2_residual": lemma2_residual(m, f, q)}
        return MethodReport(DiscreteModel(f, q, t), method, diag)
    if method is Method.ORACLE:
        if t == 0.0:
            return _trivial_report(m, method)
        q = q_oracle(m, t, rel_tol=oracle_tol)
        f = mat_exp(m.a.astype(np.float64), t)
        diag = {"lemma2_residual": lemma2_residual(m, f, q)}
        return MethodReport(DiscreteModel(f, q, t), method, diag)
    raise ValueError(f"unknown method {method!r}")


def semigroup_residual(m: ContinuousModel, method: Method,
                       t1: float, t2: float) -> float:
    """Consistency under interval splitting:
    Q_{t1+t2} = F_{t2} Q_{t1} F_{t2}^T + Q_{t2} holds for every exact
    method; the naive foils violate it.  Returns the relative defect."""
    t1 = _check_horizon(t1)
    t2 = _check_horizon(t2)
    r1 = run_method(m, t1, method)
    r2 = run_method(m, t2, method)
    r12 = run_method(m, t1 + t2, method)
    q1 = r1.model.q.astype(np.float64)
    q2 = r2.model.q.astype(np.float64)
    q12 = r12.model.q.astype(np.float64)
    f2 = r2.model.f.astype(np.float64)
    defect = q12 - (f2 @ q1 @ f2.T + q2)
    floor = eps_of(np.float64) * spectral_norm(m.s) + _TINY
    return float(spectral_norm(defect) / max(spectral_norm(q12), floor))
