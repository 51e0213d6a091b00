"""Dense complex linear algebra used by the frame layer.

Thin wrappers over LAPACK (through numpy) that add the explicit tolerance
checks and error types the rest of the package relies on, plus the two
primitives numpy does not ship: a deterministic orthonormal basis for the
orthogonal complement of a column space, and the numerical radius.

Every function is pure; inputs are never modified.  Functions whose name
starts with ``batch_`` accept stacks of square matrices of shape
``(..., n, n)``.
"""

import numpy as np

from .errors import InvalidDimensions, NoConvergence, NotHermitian

DEFAULT_TOL = 1e-10

# seed angles and bracket tolerance for the numerical-radius search
NR_GRID = 64
NR_TOL = 1e-10

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def as_cmatrix(A):
    """Return ``A`` as a finite 2-D complex128 array."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise InvalidDimensions(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidDimensions("matrix has non-finite entries")
    return A


def _square(A):
    A = as_cmatrix(A)
    if A.shape[0] != A.shape[1]:
        raise InvalidDimensions(f"expected a square matrix, got shape {A.shape}")
    return A


def frobenius_norm(A):
    A = np.asarray(A, dtype=np.complex128)
    return float(np.linalg.norm(A))


def hermitian_eigenvalues(A, tol=DEFAULT_TOL):
    """Eigenvalues of a Hermitian matrix in ascending order.

    Raises :class:`NotHermitian` when ``||A - A^*||_F > tol * ||A||_F``.
    """
    A = _square(A)
    scale = frobenius_norm(A)
    if frobenius_norm(A - A.conj().T) > tol * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    try:
        w = np.linalg.eigvalsh((A + A.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return [float(x) for x in w]


def general_eigenvalues(A, tol=DEFAULT_TOL):
    """All eigenvalues of a square matrix, with algebraic multiplicity.

    Sorted by descending modulus, then by real and imaginary part, so the
    output order is reproducible.  ``tol`` is accepted for interface symmetry
    with :func:`hermitian_eigenvalues`; LAPACK's own convergence test applies.
    """
    A = _square(A)
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.lexsort((w.imag, w.real, -np.abs(w)))
    return [complex(x) for x in w[order]]


def batch_spectral_radius(A):
    A = np.asarray(A, dtype=np.complex128)
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return np.abs(w).max(axis=-1)


def spectral_radius(A):
    return float(batch_spectral_radius(_square(A)))


def _top_eig_rotated(A, theta):
    # largest eigenvalue of the Hermitian part of e^{i theta} A, for each angle
    z = np.exp(1j * theta)[..., None, None]
    Ah = np.conj(np.swapaxes(A, -1, -2))
    H = (z * A[:, None] + np.conj(z) * Ah[:, None]) / 2
    return np.linalg.eigvalsh(H)[..., -1]


def batch_numerical_radius(A, grid=NR_GRID, tol=NR_TOL):
    """Numerical radius ``sup |<Ax, x>|`` over unit ``x`` for a stack of matrices.

    Uses ``w(A) = max_theta lambda_max((e^{i theta} A + e^{-i theta} A^*) / 2)``:
    the angle is seeded on a uniform grid and the best seed's bracket is refined
    by golden-section search until it is narrower than ``tol``.
    """
    A = np.asarray(A, dtype=np.complex128)
    lead = A.shape[:-2]
    n = A.shape[-1]
    A = A.reshape(-1, n, n)
    b = A.shape[0]
    if b == 0:
        return np.zeros(lead)
    try:
        seeds = 2 * np.pi * np.arange(grid) / grid
        vals = _top_eig_rotated(A, np.broadcast_to(seeds, (b, grid)))
        k = np.argmax(vals, axis=1)
        best = vals[np.arange(b), k]
        h = 2 * np.pi / grid
        lo = seeds[k] - h
        hi = seeds[k] + h
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        fc, fd = _top_eig_rotated(A, np.stack([c, d], axis=1)).T
        while hi[0] - lo[0] > tol:
            left = fc >= fd
            # f(c) wins: keep [lo, d]; otherwise keep [c, hi]
            hi = np.where(left, d, hi)
            lo = np.where(left, lo, c)
            probe = np.where(left, hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo))
            fp = _top_eig_rotated(A, probe[:, None])[:, 0]
            c, d = np.where(left, probe, d), np.where(left, c, probe)
            fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        best = np.maximum(best, np.maximum(fc, fd))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return np.maximum(best, 0.0).reshape(lead)


def numerical_radius(A, grid=NR_GRID, tol=NR_TOL):
    return float(batch_numerical_radius(_square(A), grid=grid, tol=tol))


def numerical_rank(A, tol=DEFAULT_TOL):
    """Number of singular values above ``tol * sigma_max``."""
    A = as_cmatrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def orthonormal_complement_basis(A, tol=DEFAULT_TOL):
    """Orthonormal basis of ``range(A)^perp`` as the columns of an N x (N-r) matrix.

    The basis depends only on the subspace, not on LAPACK's choice of singular
    vectors: the orthogonal projector onto the complement is formed first and
    its columns are orthonormalised by column-pivoted Gram-Schmidt (largest
    residual first, lowest index on ties).  Each column is then rotated so
    that its first non-negligible entry is real and positive.
    """
    A = as_cmatrix(A)
    N = A.shape[0]
    r = numerical_rank(A, tol)
    if r == 0:
        Q = np.eye(N, dtype=np.complex128)
    else:
        U = np.linalg.svd(A, full_matrices=False)[0][:, :r]
        Q = np.eye(N, dtype=np.complex128) - U @ U.conj().T
    k = N - r
    basis = np.zeros((N, k), dtype=np.complex128)
    R = Q.copy()
    for j in range(k):
        norms = np.linalg.norm(R, axis=0)
        top = norms.max()
        pick = int(np.flatnonzero(norms >= top * (1 - 1e-12))[0])
        v = R[:, pick].copy()
        # second pass keeps the columns orthogonal to working precision
        v -= basis[:, :j] @ (basis[:, :j].conj().T @ v)
        v /= np.linalg.norm(v)
        lead = np.flatnonzero(np.abs(v) > 1e-8)[0]
        v *= np.conj(v[lead]) / abs(v[lead])
        basis[:, j] = v
        R -= np.outer(v, v.conj() @ R)
    return basis
