"""Finite frames, their operators, canonical duals and structural predicates.

A frame ``F = {f_i}`` of ``N`` vectors in ``C^n`` is stored as an ``N x n``
complex array whose row ``i`` holds the coordinates of ``f_i``.  Inner
products conjugate the second argument, ``<x, y> = sum_k x_k conj(y_k)``, so
the analysis matrix (row ``i`` = ``conj(f_i)``) maps coordinates of ``x`` to
the coefficient vector ``(<x, f_i>)_i``.

Indices are 0-based here; user-facing I/O converts to 1-based.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import numerics
from .errors import (
    InvalidDimensions,
    NotADual,
    NotOneUniform,
    SingularFrameOperator,
)

DUALITY_TOL = 1e-8
DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Frame:
    vectors: np.ndarray

    def __post_init__(self):
        V = numerics.as_cmatrix(self.vectors).copy()
        N, n = V.shape
        if n < 1 or N < n:
            raise InvalidDimensions(f"need N >= n >= 1, got N={N}, n={n}")
        if numerics.numerical_rank(V) < n:
            raise InvalidDimensions("vectors do not span the space (rank < n)")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    @property
    def N(self):
        return self.vectors.shape[0]

    @property
    def n(self):
        return self.vectors.shape[1]

    @property
    def norms(self):
        return np.linalg.norm(self.vectors, axis=1)

    def __len__(self):
        return self.N

    def __repr__(self):
        return f"Frame(N={self.N}, n={self.n})"


@dataclass(frozen=True)
class FrameOperatorInfo:
    S: np.ndarray
    lower_bound: float
    upper_bound: float


@dataclass(frozen=True, eq=False)
class DualPair:
    """A frame together with one of its duals.

    Construction checks ``||T_G^* T_F - I||_F <= 1e-8 sqrt(n)`` and raises
    :class:`NotADual` otherwise.
    """

    frame: Frame
    dual: Frame
    residual: float = field(init=False)

    def __post_init__(self):
        if self.frame.vectors.shape != self.dual.vectors.shape:
            raise InvalidDimensions(
                f"frame {self.frame.vectors.shape} and dual {self.dual.vectors.shape} differ in shape"
            )
        res = duality_residual(self.frame, self.dual)
        object.__setattr__(self, "residual", res)
        if not res <= DUALITY_TOL * math.sqrt(self.frame.n):
            raise NotADual(f"not a dual frame: ||T_G^* T_F - I||_F = {res:.3e}", residual=res)

    @property
    def N(self):
        return self.frame.N

    @property
    def n(self):
        return self.frame.n

    def diagonal_products(self):
        """``<f_i, g_i>`` for every ``i``."""
        return np.sum(self.frame.vectors * self.dual.vectors.conj(), axis=1)

    def cross_gram(self):
        """Matrix of ``<f_i, g_j>``."""
        return self.frame.vectors @ self.dual.vectors.conj().T


def as_frame(F):
    return F if isinstance(F, Frame) else Frame(F)


def analysis_matrix(F):
    return as_frame(F).vectors.conj()


def synthesis_matrix(F):
    return as_frame(F).vectors.T.copy()


def frame_operator(F):
    F = as_frame(F)
    T = analysis_matrix(F)
    S = T.conj().T @ T
    S = (S + S.conj().T) / 2
    w = numerics.hermitian_eigenvalues(S)
    return FrameOperatorInfo(S=S, lower_bound=w[0], upper_bound=w[-1])


def duality_residual(F, G):
    """``||T_G^* T_F - I||_F``."""
    TF = analysis_matrix(F)
    TG = np.asarray(G.vectors if isinstance(G, Frame) else G, dtype=np.complex128).conj()
    return numerics.frobenius_norm(TG.conj().T @ TF - np.eye(TF.shape[1]))


def canonical_dual(F):
    F = as_frame(F)
    info = frame_operator(F)
    if info.lower_bound <= numerics.DEFAULT_TOL * info.upper_bound:
        raise SingularFrameOperator("frame operator is numerically singular")
    # g_i = S^{-1} f_i, i.e. rows of G are (S^{-1} f_i)^T
    G = np.linalg.solve(info.S, F.vectors.T).T
    return DualPair(F, Frame(G))


def frame_operator_power(F, power):
    """``S_F^power`` via the eigendecomposition (``power=-0.5`` gives ``S^{-1/2}``)."""
    S = frame_operator(F).S
    w, V = np.linalg.eigh(S)
    return (V * w**power) @ V.conj().T


# -- predicates ------------------------------------------------------------


def is_tight(F, tol=DEFAULT_TOL):
    info = frame_operator(F)
    return info.upper_bound - info.lower_bound <= tol * info.upper_bound


def is_parseval(F, tol=DEFAULT_TOL):
    info = frame_operator(F)
    return abs(info.lower_bound - 1) <= tol and abs(info.upper_bound - 1) <= tol


def is_uniform(F, tol=DEFAULT_TOL):
    """All frame vectors share one norm (relative spread at most ``tol``)."""
    r = as_frame(F).norms
    return r.max() - r.min() <= tol * r.max()


def is_equiangular(F, tol=DEFAULT_TOL):
    """Uniform, and ``|<f_i, f_j>|`` is the same for every ``i != j``."""
    F = as_frame(F)
    if not is_uniform(F, tol):
        return False
    if F.N < 2:
        return True
    A = np.abs(F.vectors @ F.vectors.conj().T)
    off = A[~np.eye(F.N, dtype=bool)]
    return off.max() - off.min() <= tol * F.norms.max() ** 2


def is_one_uniform_dual(pair, tol=DEFAULT_TOL):
    c = pair.diagonal_products()
    return bool(np.all(np.abs(c - pair.n / pair.N) <= tol))


def two_uniform_products(pair):
    """Off-diagonal products ``<f_i, g_j> <f_j, g_i>`` for ``i != j``."""
    C = pair.cross_gram()
    prod = C * C.T
    return prod[~np.eye(pair.N, dtype=bool)]


def is_two_uniform_dual(pair, tol=DEFAULT_TOL):
    """1-uniform, and the cross products all lie in one disc of diameter ``tol``."""
    if not is_one_uniform_dual(pair, tol):
        return False
    if pair.N < 2:
        return True
    x = two_uniform_products(pair)
    return bool(np.abs(x - x.mean()).max() <= tol / 2)


def one_uniform_gap(pair, tol=1e-9):
    """``sum_{i != j} |<f_i, g_j>|^2 - (n - n^2/N)`` for a 1-uniform dual pair.

    The value is never negative; callers use it as a testable invariant.
    """
    if not is_one_uniform_dual(pair, tol):
        raise NotOneUniform("the gap bound needs a 1-uniform dual pair")
    C = np.abs(pair.cross_gram()) ** 2
    off = C.sum() - np.trace(C)
    n, N = pair.n, pair.N
    return float(off - (n - n * n / N))


# -- constructors ----------------------------------------------------------


def mercedes_benz():
    """Three unit vectors in R^2 at 90, 210 and 330 degrees."""
    angles = np.deg2rad([90.0, 210.0, 330.0])
    return Frame(np.stack([np.cos(angles), np.sin(angles)], axis=1))


def simplex(n):
    """``n + 1`` unit vectors pointing at the vertices of a regular simplex.

    The centred standard basis of ``R^{n+1}`` is written in the orthonormal
    Helmert basis of the hyperplane ``sum x = 0`` and normalised.  Pairwise
    inner products are all ``-1/n``.
    """
    if n < 1:
        raise InvalidDimensions("simplex needs n >= 1")
    m = n + 1
    H = np.zeros((m, n))
    for k in range(1, m):
        H[:k, k - 1] = 1.0
        H[k, k - 1] = -k
        H[:, k - 1] /= math.sqrt(k * (k + 1))
    V = H / np.linalg.norm(H, axis=1, keepdims=True)
    return Frame(V)


def harmonic(N, n, columns=None):
    """Parseval harmonic frame: rows of ``n`` columns of the N-point DFT over ``sqrt(N)``.

    ``columns`` selects which DFT columns to keep (default ``0 .. n-1``);
    ``f_i[k] = exp(2 pi i * i * columns[k] / N) / sqrt(N)``.
    """
    cols = np.arange(n) if columns is None else np.asarray(columns, dtype=int)
    if len(cols) != n or N < n or n < 1 or len(set(cols % N)) != n:
        raise InvalidDimensions(f"invalid harmonic frame parameters N={N}, n={n}, columns={columns}")
    idx = np.arange(N)[:, None] * cols[None, :]
    return Frame(np.exp(2j * np.pi * idx / N) / math.sqrt(N))


def random_frame(N, n, seed):
    """i.i.d. standard complex Gaussian frame from numpy's PCG64 generator.

    Entries are ``(x + i y) / sqrt(2)`` with ``x, y ~ N(0, 1)``; draws that do
    not span are discarded and redrawn from the same stream.
    """
    if n < 1 or N < n:
        raise InvalidDimensions(f"need N >= n >= 1, got N={N}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    while True:
        V = (rng.standard_normal((N, n)) + 1j * rng.standard_normal((N, n))) / math.sqrt(2)
        if numerics.numerical_rank(V) == n:
            return Frame(V)


def explicit(vectors):
    V = np.asarray(vectors, dtype=np.complex128)
    if V.ndim == 1:
        V = V[:, None]
    return Frame(V)


def random_unitary(n, rng):
    """Haar-distributed unitary from a complex Gaussian QR, phases fixed."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def transformed(F, U):
    """The frame ``{U f_i}``."""
    F = as_frame(F)
    return Frame(F.vectors @ np.asarray(U).T)


def scaled(F, a):
    return Frame(as_frame(F).vectors * a)


KINDS = ("mercedes_benz", "simplex", "harmonic", "random", "explicit")


def construct(kind, n=None, N=None, seed=0, vectors=None, columns=None):
    """Build a frame by name; see :data:`KINDS`."""
    kind = {"mb": "mercedes_benz"}.get(kind, kind)
    if kind == "mercedes_benz":
        return mercedes_benz()
    if kind == "simplex":
        if n is None:
            raise InvalidDimensions("simplex needs n")
        return simplex(n)
    if kind == "harmonic":
        if n is None or N is None:
            raise InvalidDimensions("harmonic needs N and n")
        return harmonic(N, n, columns)
    if kind == "random":
        if n is None or N is None:
            raise InvalidDimensions("random needs N and n")
        return random_frame(N, n, seed)
    if kind == "explicit":
        if vectors is None:
            raise InvalidDimensions("explicit needs vectors")
        return explicit(vectors)
    raise InvalidDimensions(f"unknown frame kind {kind!r}")
