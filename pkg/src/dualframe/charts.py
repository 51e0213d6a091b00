"""Affine coordinates on the set of all duals of a fixed frame.

Every dual of ``F`` has analysis matrix ``T_G = T_canonical + P B`` where the
columns of ``P`` (N x (N-n)) are an orthonormal basis of ``range(T_F)^perp``
and ``B`` is an arbitrary complex ``(N-n) x n`` matrix.  Because
``T_F^* P = 0`` the reconstruction identity holds for every ``B``, so the
search space for optimal duals is unconstrained.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import numerics
from .errors import DimensionMismatch, NotADual
from .frames import DUALITY_TOL, DualPair, Frame, analysis_matrix, as_frame, canonical_dual


@dataclass(frozen=True, eq=False)
class DualChart:
    frame: Frame
    base: np.ndarray  # analysis matrix of the canonical dual, N x n
    P: np.ndarray  # N x (N - n)

    @property
    def shape(self):
        """Shape of a parameter matrix ``B``."""
        return (self.P.shape[1], self.frame.n)

    @property
    def dim(self):
        """Complex dimension of the dual set."""
        r, c = self.shape
        return r * c

    def zero(self):
        return np.zeros(self.shape, dtype=np.complex128)

    def analysis(self, B):
        """``T_G`` for the parameter ``B``; no validation."""
        return self.base + self.P @ B


def make_chart(F):
    F = as_frame(F)
    canon = canonical_dual(F)
    base = analysis_matrix(canon.dual)
    P = numerics.orthonormal_complement_basis(analysis_matrix(F))
    for a in (base, P):
        a.setflags(write=False)
    return DualChart(frame=F, base=base, P=P)


def _check_shape(chart, B):
    B = np.asarray(B, dtype=np.complex128)
    if B.shape != chart.shape:
        raise DimensionMismatch(f"parameter has shape {B.shape}, chart expects {chart.shape}")
    return B


def dual_from_parameter(chart, B):
    B = _check_shape(chart, B)
    return DualPair(chart.frame, Frame(chart.analysis(B).conj()))


def parameter_from_dual(chart, G, tol=DUALITY_TOL):
    """Inverse chart map ``B = P^* (T_G - T_canonical)``.

    Raises :class:`NotADual` when ``G`` fails the reconstruction identity by
    more than ``tol * sqrt(n)``.
    """
    V = G.vectors if isinstance(G, Frame) else np.asarray(G, dtype=np.complex128)
    if V.shape != chart.frame.vectors.shape:
        raise DimensionMismatch(f"dual has shape {V.shape}, frame has {chart.frame.vectors.shape}")
    TG = V.conj()
    TF = analysis_matrix(chart.frame)
    res = numerics.frobenius_norm(TG.conj().T @ TF - np.eye(chart.frame.n))
    if not res <= tol * math.sqrt(chart.frame.n):
        raise NotADual(f"not a dual frame: ||T_G^* T_F - I||_F = {res:.3e}", residual=res)
    return chart.P.conj().T @ (TG - chart.base)


def random_parameter(chart, rng, radius=1.0):
    """Entrywise complex Gaussian parameter with scale ``radius / sqrt(dim)``."""
    if chart.dim == 0:
        return chart.zero()
    s = radius / math.sqrt(chart.dim)
    Z = rng.standard_normal(chart.shape) + 1j * rng.standard_normal(chart.shape)
    return s * Z / math.sqrt(2)


def diagonal_map(chart):
    """Affine map ``B -> (<f_i, g_i>)_i`` as ``(L, c0)`` with ``L`` acting on ``B.ravel()``."""
    # <f_i, g_i> = c0_i + sum_{j,k} P[i,j] conj(T_F[i,k]) B[j,k]
    TF = analysis_matrix(chart.frame)
    L = np.einsum("ij,ik->ijk", chart.P, TF.conj()).reshape(chart.frame.N, -1)
    c0 = np.sum(TF.conj() * chart.base, axis=1)
    return L, c0


@dataclass(frozen=True, eq=False)
class UniformDualFamily:
    """Affine set ``{B0 + sum_k t_k D_k}`` of parameters giving 1-uniform duals."""

    chart: DualChart
    particular: np.ndarray
    directions: np.ndarray  # (k, N - n, n)

    def sample(self, rng, radius=1.0):
        k = len(self.directions)
        if k == 0:
            return self.particular.copy()
        t = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) * radius / math.sqrt(2 * k)
        return self.particular + np.tensordot(t, self.directions, axes=1)


def one_uniform_family(chart, tol=1e-10):
    """All parameters whose dual has ``<f_i, g_i> = n/N`` for every ``i``.

    Returns ``None`` when the frame has no 1-uniform dual at all.
    """
    F = chart.frame
    target = np.full(F.N, F.n / F.N, dtype=np.complex128)
    if chart.dim == 0:
        c0 = np.sum(analysis_matrix(F).conj() * chart.base, axis=1)
        if np.abs(c0 - target).max() <= tol:
            return UniformDualFamily(chart, chart.zero(), np.zeros((0,) + chart.shape, complex))
        return None
    L, c0 = diagonal_map(chart)
    rhs = target - c0
    b, *_ = np.linalg.lstsq(L, rhs, rcond=None)
    if np.abs(L @ b - rhs).max() > tol:
        return None
    _, s, Vh = np.linalg.svd(L)
    rank = int(np.sum(s > numerics.DEFAULT_TOL * max(s[0], 1e-300))) if s.size else 0
    null = Vh[rank:].conj()
    return UniformDualFamily(
        chart,
        b.reshape(chart.shape),
        null.reshape((-1,) + chart.shape),
    )
