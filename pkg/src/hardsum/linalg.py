"""Dense linear-algebra primitives: validated vector/matrix constructors,
symmetric eigendecomposition, orthonormal-column sampling, and
finite-difference differentiation.

Everything here is pure and deterministic; random sampling takes an explicit
seed or generator (no global RNG state is ever touched).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Vector",
    "SymMatrix",
    "TallOrthogonal",
    "as_vector",
    "sym_matrix",
    "as_rng",
    "sample_orthonormal_columns",
    "eig_sym",
    "finite_diff_gradient",
    "finite_diff_jacobian",
    "finite_diff_hessian",
    "default_fd_step",
]

# Plain ndarrays are the working representation; the aliases document intent
# and the constructors below enforce the invariants at API boundaries.
Vector = np.ndarray
SymMatrix = np.ndarray

SYMMETRY_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-10


def as_rng(seed) -> np.random.Generator:
    """Normalize an int seed / Generator / SeedSequence into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_vector(x, dim: int | None = None) -> Vector:
    """Validate and return a finite 1-D float vector."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def sym_matrix(a, tol: float = SYMMETRY_TOL) -> SymMatrix:
    """Validate symmetry of a square matrix (relative max-norm test) and
    return the exactly symmetrized copy (A + A^T)/2."""
    A = np.asarray(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = np.abs(A).max()
    # the absolute floor keeps tol * scale from underflowing to zero when
    # every entry is subnormal (one-ulp asymmetry is still symmetry there)
    if np.abs(A - A.T).max() > max(tol * scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric within tolerance")
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class TallOrthogonal:
    """A d x k matrix with orthonormal columns (d >= k).

    Orthonormality is checked on construction to ``ORTHONORMALITY_TOL`` in
    max-norm; instances are immutable and freely shareable.
    """

    columns: np.ndarray = field(repr=False)

    def __post_init__(self):
        Q = np.asarray(self.columns, dtype=float)
        if Q.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {Q.shape}")
        d, k = Q.shape
        if k > d:
            raise ValueError(f"more columns than rows: {k} > {d}")
        err = np.abs(Q.T @ Q - np.eye(k)).max()
        if err > ORTHONORMALITY_TOL:
            raise ValueError(f"columns not orthonormal: max deviation {err:.3e}")
        object.__setattr__(self, "columns", Q)

    @property
    def d(self) -> int:
        return self.columns.shape[0]

    @property
    def k(self) -> int:
        return self.columns.shape[1]


def sample_orthonormal_columns(d: int, k: int, seed) -> TallOrthogonal:
    """Draw a d x k matrix with orthonormal columns, uniformly w.r.t.
    left-rotation (Haar on the Stiefel manifold).

    QR of a standard Gaussian matrix, with the sign ambiguity fixed by
    forcing the diagonal of the triangular factor positive -- this makes the
    factorization unique and the resulting Q exactly Haar-distributed.
    """
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got d={d}, k={k}")
    rng = as_rng(seed)
    G = rng.standard_normal((d, k))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return TallOrthogonal(Q * signs)


def eig_sym(A: SymMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvectors as columns).
    Raises ValueError on non-symmetric input; LAPACK failures propagate as
    ``np.linalg.LinAlgError``.
    """
    A = sym_matrix(A)
    w, V = np.linalg.eigh(A)
    return w, V


def default_fd_step(x: Vector) -> float:
    # Balances truncation against cancellation at double precision.
    return 1e-5 * max(1.0, float(np.linalg.norm(x)))


def _central_diff_gradient(f, x: Vector, h: float) -> Vector:
    g = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        g[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def finite_diff_gradient(f, x: Vector, step: float | None = None) -> Vector:
    """Componentwise central-difference gradient of a scalar function,
    Richardson-extrapolated to fourth order (the chain bumps have fourth
    derivatives large enough that a plain second-order stencil cannot reach
    1e-6 relative accuracy)."""
    x = np.asarray(x, dtype=float)
    h = default_fd_step(x) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    coarse = _central_diff_gradient(f, x, h)
    fine = _central_diff_gradient(f, x, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _central_diff_jacobian(g, x: Vector, h: float) -> np.ndarray:
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((np.asarray(g(x + e)) - np.asarray(g(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def finite_diff_jacobian(g, x: Vector, step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of a vector-valued function, Richardson-
    extrapolated to fourth order.

    Useful for checking an analytic Hessian against the analytic gradient:
    differencing the gradient keeps one order of accuracy in hand compared
    with double-differencing values.
    """
    x = np.asarray(x, dtype=float)
    h = default_fd_step(x) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    coarse = _central_diff_jacobian(g, x, h)
    fine = _central_diff_jacobian(g, x, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def finite_diff_hessian(f, x: Vector, step: float | None = None) -> SymMatrix:
    """Central-difference Hessian of a scalar function (4-point stencil)."""
    x = np.asarray(x, dtype=float)
    h = default_fd_step(x) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    d = x.size
    H = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        for j in range(i, d):
            ej = np.zeros(d)
            ej[j] = h
            val = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h * h)
            H[i, j] = val
            H[j, i] = val
    return H
