"""Dense real linear-algebra layer: matrix exponential, real Schur form
with eigenvalue reordering, Sylvester/Lyapunov solvers, and norms.

Everything is parameterized by float width: pass float32 arrays and the
whole computation stays in binary32, pass float64 and it stays in binary64.
"""

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    ClassificationError,
    ConvergenceError,
    DimensionError,
    MatrixOverflowError,
    NearSingularError,
    NonFiniteError,
)

# Pade-13 scaling threshold (Higham's theta_13 for double precision; also a
# valid, conservative choice for single precision).
_THETA13 = 5.371920351148152

_MAX_QR_SWEEPS = 60
_MAX_JACOBI_SWEEPS = 60


class OrderedSchur(NamedTuple):
    """Real Schur factorization u @ t @ u.T with the eigenvalues classified
    as zero collected in the trailing (n - split) x (n - split) block."""

    u: np.ndarray
    t: np.ndarray
    split: int


def eps_of(arr_or_dtype) -> float:
    dtype = arr_or_dtype.dtype if isinstance(arr_or_dtype, np.ndarray) \
        else np.dtype(arr_or_dtype)
    return float(np.finfo(dtype).eps)


def tau_zero_default(a: np.ndarray) -> float:
    """Default threshold below which a computed eigenvalue modulus is
    classified as an integrator (zero) eigenvalue.

    Computed eigenvalues of a nilpotent block of index p carry rounding
    noise on the order of ||A|| * eps^(1/p), so a threshold linear in eps
    would misclassify every transformed integrator chain.  The square-root
    scaling covers chains up to index 2 with a wide margin and keeps well
    below any physical pole of magnitude >> sqrt(eps).  Override per call
    for deeper chains.
    """
    n = a.shape[0]
    return float(np.sqrt(100.0 * n * eps_of(a)) * np.linalg.norm(a))


def check_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise NonFiniteError(f"{name} contains non-finite entries")
    return a


def check_finite(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.size and not np.isfinite(a).all():
        raise NonFiniteError(f"{name} contains non-finite entries")
    return a


def mat_exp(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(a * t) by scaling and squaring with a degree-13 diagonal Pade
    approximant.  Raises MatrixOverflowError if the result overflows the
    float width of ``a``."""
    a = check_square(a, "mat_exp input")
    if not np.isfinite(t):
        raise NonFiniteError("time scalar must be finite")
    dtype = np.dtype(a.dtype if a.dtype in (np.float32, np.float64)
                     else np.float64)
    at = np.ascontiguousarray(np.asarray(a, dtype=dtype) * dtype.type(t))
    if not np.isfinite(at).all():
        raise MatrixOverflowError("a * t overflows the working precision")
    norm1 = float(np.abs(at).sum(axis=0).max()) if at.size else 0.0
    squarings = 0
    if norm1 > _THETA13:
        squarings = int(np.ceil(np.log2(norm1 / _THETA13)))
        at = at / dtype.type(2.0) ** squarings
    result = _kernels.pade13_expm(at, squarings)
    if not np.isfinite(result).all():
        raise MatrixOverflowError(
            f"matrix exponential overflowed (|a*t|_1 = {norm1:.3g}, "
            f"width {np.dtype(dtype).name})")
    return result


def real_schur(a: np.ndarray, max_sweeps: int = _MAX_QR_SWEEPS):
    """Real Schur decomposition a = u @ t @ u.T with u orthogonal and t
    quasi-upper triangular (standardized 1x1/2x2 diagonal blocks)."""
    a = check_square(a, "real_schur input")
    dtype = a.dtype if a.dtype in (np.float32, np.float64) else np.float64
    t = np.array(a, dtype=dtype, order="C", copy=True)
    n = t.shape[0]
    u = np.eye(n, dtype=dtype)
    anorm = float(np.linalg.norm(t))
    _kernels.hessenberg(t, u)
    sweeps, ok = _kernels.francis_qr(t, u, eps_of(dtype), anorm, max_sweeps)
    if not ok:
        raise ConvergenceError(
            f"QR iteration did not converge within {sweeps} sweeps",
            sweeps=sweeps)
    _kernels.standardize_quasi_triangular(t, u)
    return u, t


def quasi_tri_eigvalues(t: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real quasi-upper-triangular matrix, block by block."""
    n = t.shape[0]
    out = np.empty(n, dtype=np.complex128)
    i = 0
    while i < n:
        if i < n - 1 and t[i + 1, i] != 0.0:
            a, b = float(t[i, i]), float(t[i, i + 1])
            c, d = float(t[i + 1, i]), float(t[i + 1, i + 1])
            half = 0.5 * (a - d)
            mid = 0.5 * (a + d)
            disc = half * half + b * c
            if disc < 0.0:
                im = np.sqrt(-disc)
                out[i] = mid + 1j * im
                out[i + 1] = mid - 1j * im
            else:
                rt = np.sqrt(disc)
                out[i] = mid + rt
                out[i + 1] = mid - rt
            i += 2
        else:
            out[i] = t[i, i]
            i += 1
    return out


def _diag_blocks(t: np.ndarray):
    """(start, size) pairs for the diagonal blocks of a quasi-triangular t."""
    n = t.shape[0]
    blocks = []
    i = 0
    while i < n:
        size = 2 if (i < n - 1 and t[i + 1, i] != 0.0) else 1
        blocks.append((i, size))
        i += size
    return blocks


def _swap_adjacent_blocks(u, t, i, p1, p2):
    """Exchange the adjacent diagonal blocks of sizes p1, p2 starting at
    row i via the direct (Bai-Demmel) orthogonal swap."""
    dtype = t.dtype
    b1 = t[i:i + p1, i:i + p1]
    b2 = t[i + p1:i + p1 + p2, i + p1:i + p1 + p2]
    t12 = t[i:i + p1, i + p1:i + p1 + p2]
    # b1 @ X - X @ b2 = t12, via the (<=4x4) Kronecker system
    m = np.kron(np.eye(p2, dtype=dtype), b1) - np.kron(b2.T, np.eye(p1, dtype=dtype))
    x = np.linalg.solve(m, t12.reshape(-1, order="F")).reshape((p1, p2), order="F")
    q, _ = np.linalg.qr(np.vstack([-x, np.eye(p2, dtype=dtype)]), mode="complete")
    sl = slice(i, i + p1 + p2)
    t[:, sl] = t[:, sl] @ q
    t[sl, :] = q.T @ t[sl, :]
    u[:, sl] = u[:, sl] @ q
    # enforce the block-triangular zero pattern restored by the swap
    t[i + p2:i + p1 + p2, i:i + p2] = 0.0


def order_schur_zeros_last(u: np.ndarray, t: np.ndarray,
                           tau_zero: float) -> OrderedSchur:
    """Reorder a real Schur pair so all eigenvalues with modulus <= tau_zero
    trail, returning the reordered factors and the split index."""
    u = np.array(u, copy=True)
    t = np.array(t, copy=True)

    def classify():
        flags = []
        for start, size in _diag_blocks(t):
            evs = quasi_tri_eigvalues(t[start:start + size, start:start + size])
            zero = np.abs(evs) <= tau_zero
            if size == 2 and zero[0] != zero[1]:
                raise ClassificationError(
                    f"2x2 block at {start} straddles tau_zero={tau_zero:.3g}: "
                    f"|ev| = {np.abs(evs)}")
            flags.append((start, size, bool(zero.all())))
        return flags

    changed = True
    while changed:
        changed = False
        flags = classify()
        for b in range(len(flags) - 1):
            s1, p1, z1 = flags[b]
            _, p2, z2 = flags[b + 1]
            if z1 and not z2:
                _swap_adjacent_blocks(u, t, s1, p1, p2)
                changed = True
                break
    _kernels.standardize_quasi_triangular(t, u)
    flags = classify()
    split = 0
    for _, size, zero in flags:
        if zero:
            break
        split += size
    # all zero blocks must now trail
    for start, size, zero in flags:
        if start >= split and not zero:
            raise ClassificationError(
                "eigenvalue reordering failed to cluster the zero block")
    return OrderedSchur(u=u, t=t, split=split)


def is_quasi_upper_triangular(a: np.ndarray) -> bool:
    """True if a already has real Schur zero structure (entries below the
    first subdiagonal all zero, no two consecutive nonzero subdiagonals)."""
    n = a.shape[0]
    for i in range(2, n):
        if np.any(a[i, :i - 1] != 0.0):
            return False
    sub = np.diagonal(a, -1) != 0.0
    return not np.any(sub[:-1] & sub[1:])


def _schur_or_passthrough(a: np.ndarray):
    if is_quasi_upper_triangular(a):
        return np.eye(a.shape[0], dtype=a.dtype), np.array(a, copy=True)
    return real_schur(a)


def _eig_sum_guard(ev_a, ev_b, threshold):
    sums = np.abs(ev_a[:, None] + ev_b[None, :])
    i, j = np.unravel_index(np.argmin(sums), sums.shape)
    if sums[i, j] <= threshold:
        raise NearSingularError(
            f"eigenvalue sum {ev_a[i] + ev_b[j]:.3e} (|.| = {sums[i, j]:.3e}) "
            f"below singularity threshold {threshold:.3e}: no unique "
            "Sylvester/Lyapunov solution",
            pair=(complex(ev_a[i]), complex(ev_b[j])))


def solve_sylvester(a: np.ndarray, b: np.ndarray, c: np.ndarray,
                    sing_threshold: float | None = None) -> np.ndarray:
    """Solve a @ X + X @ b = c by Bartels-Stewart.

    Inputs that are already quasi-upper triangular (a, or b transposed) are
    used as-is without re-factorization.  Raises NearSingularError when
    min |lambda_i(a) + lambda_j(b)| falls below the singularity threshold.
    """
    a = check_square(a, "sylvester a")
    b = check_square(b, "sylvester b")
    c = check_finite(np.asarray(c), "sylvester c")
    if c.shape != (a.shape[0], b.shape[0]):
        raise DimensionError(
            f"rhs shape {c.shape} incompatible with ({a.shape[0]}, {b.shape[0]})")
    ua, ta = _schur_or_passthrough(a)
    ub, tb = _schur_or_passthrough(b.T)  # b = ub @ tb.T @ ub.T
    ev_a = quasi_tri_eigvalues(ta)
    ev_b = quasi_tri_eigvalues(tb)
    if sing_threshold is None:
        sing_threshold = 100.0 * eps_of(a) * float(
            np.linalg.norm(a) + np.linalg.norm(b))
    _eig_sum_guard(ev_a, ev_b, sing_threshold)
    cc = np.ascontiguousarray(ua.T @ c @ ub)
    y = _kernels.trsylv(np.ascontiguousarray(ta),
                        np.ascontiguousarray(tb.T), cc)
    return ua @ y @ ub.T


def solve_lyapunov(a: np.ndarray, c: np.ndarray,
                   sing_threshold: float | None = None) -> np.ndarray:
    """Solve a @ X + X @ a.T = c for symmetric c; the result is explicitly
    symmetrized.  Shares a single Schur factorization between both sides."""
    a = check_square(a, "lyapunov a")
    c = check_finite(np.asarray(c), "lyapunov c")
    if c.shape != a.shape:
        raise DimensionError(f"rhs shape {c.shape} != {a.shape}")
    ua, ta = _schur_or_passthrough(a)
    ev = quasi_tri_eigvalues(ta)
    if sing_threshold is None:
        sing_threshold = 100.0 * eps_of(a) * 2.0 * float(np.linalg.norm(a))
    _eig_sum_guard(ev, ev, sing_threshold)
    cc = np.ascontiguousarray(ua.T @ c @ ua)
    ta = np.ascontiguousarray(ta)
    y = _kernels.trsylv(ta, np.ascontiguousarray(ta.T), cc)
    x = ua @ y @ ua.T
    return (x + x.T) / x.dtype.type(2)


def symmetric_eigvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix (ascending), via cyclic Jacobi."""
    m = check_square(m, "symmetric matrix")
    dtype = m.dtype if m.dtype in (np.float32, np.float64) else np.float64
    work = np.array(m, dtype=dtype, copy=True)
    vals = _kernels.jacobi_symm_eigvals(work, eps_of(dtype), _MAX_JACOBI_SWEEPS)
    return np.sort(vals)


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value, from the Jacobi eigenvalues of m.T @ m."""
    m = check_finite(np.asarray(m), "spectral_norm input")
    if m.size == 0:
        return 0.0
    if m.ndim == 1:
        m = m[:, None]
    gram = m.T @ m if m.shape[0] >= m.shape[1] else m @ m.T
    vals = symmetric_eigvalues(gram)
    return float(np.sqrt(max(float(vals[-1]), 0.0)))
