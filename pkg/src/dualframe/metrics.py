"""Erasure error operators, their three measures, and l^p averages over patterns.

For a dual pair ``(F, G)`` and an erased index set ``Lambda`` the error
operator is ``E = T_G^* D T_F = sum_{i in Lambda} g_i <., f_i>``.  Averages
run over all ``C(N, m)`` patterns of size ``m`` in lexicographic order.

Measures are evaluated for all patterns at once: the Frobenius norm from the
Gram matrices of ``F`` and ``G``, the spectral radius from the small
``m x m`` companion product when ``m < n``, and the numerical radius from the
rotated-Hermitian-part search in :mod:`dualframe.numerics`.  Single-erasure
values use the rank-one closed forms.
"""

from dataclasses import dataclass, field
import enum
from itertools import combinations
import math

import numpy as np

from . import numerics
from .errors import HypothesisViolated, InvalidDimensions, PatternBudgetExceeded
from .frames import as_frame, is_equiangular, is_tight

PATTERN_CAP = 10**6
_CHUNK = 2048


class Measure(str, enum.Enum):
    FROBENIUS = "frobenius"
    SPECTRAL = "spectral"
    NUMERICAL = "numerical"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        aliases = {
            "fro": cls.FROBENIUS,
            "frobenius": cls.FROBENIUS,
            "spec": cls.SPECTRAL,
            "spectral": cls.SPECTRAL,
            "spectral_radius": cls.SPECTRAL,
            "rho": cls.SPECTRAL,
            "num": cls.NUMERICAL,
            "numerical": cls.NUMERICAL,
            "numerical_radius": cls.NUMERICAL,
            "omega": cls.NUMERICAL,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown measure {value!r}") from None


@dataclass(frozen=True)
class ErasurePattern:
    """Sorted 0-based erased indices; ``label`` gives the 1-based ``i1;i2;...`` form."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0 or len(set(idx)) != len(idx) or min(idx) < 0:
            raise InvalidDimensions(f"invalid erasure pattern {self.indices!r}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @property
    def m(self):
        return len(self.indices)

    @property
    def label(self):
        return ";".join(str(i + 1) for i in self.indices)

    @classmethod
    def from_label(cls, text):
        return cls(tuple(int(t) - 1 for t in text.split(";")))


@dataclass(frozen=True)
class AverageErrorSpec:
    measure: Measure
    m: int
    p: float

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure.parse(self.measure))
        if int(self.m) != self.m or self.m < 1:
            raise InvalidDimensions(f"erasure count must be a positive integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        p = float(self.p)
        if not (math.isfinite(p) and p > 1):
            raise ValueError(f"the averaging exponent must be a finite number > 1, got {self.p}")
        object.__setattr__(self, "p", p)

    def as_dict(self):
        return {"measure": self.measure.value, "m": self.m, "p": self.p}


@dataclass(frozen=True, eq=False)
class ErrorReport:
    spec: AverageErrorSpec
    patterns: np.ndarray  # (C, m) 0-based, lexicographic
    values: np.ndarray
    average: float
    lower_bound: float = None
    n: int = field(default=None)
    N: int = field(default=None)

    @property
    def worst_case(self):
        """Maximum over patterns (the p = infinity diagnostic, not an l^p average)."""
        return float(self.values.max())

    def rows(self):
        for idx, v in zip(self.patterns, self.values):
            yield ErasurePattern(tuple(idx)).label, float(v)


def _pattern_index(pattern):
    if isinstance(pattern, ErasurePattern):
        return pattern.indices
    return ErasurePattern(tuple(pattern)).indices


def _check_pattern(pair, idx):
    if max(idx) >= pair.N:
        raise InvalidDimensions(f"pattern index {max(idx) + 1} exceeds N={pair.N}")


def error_operator(pair, pattern):
    idx = list(_pattern_index(pattern))
    _check_pattern(pair, idx)
    Fv = pair.frame.vectors[idx]
    Gv = pair.dual.vectors[idx]
    return Gv.T @ Fv.conj()


def measure_frobenius(pair, pattern):
    """Frobenius norm of the error operator from Gram-matrix entries.

    One erasure gives ``||f_i|| ||g_i||``; in general
    ``||E||_F^2 = sum_{j,k in Lambda} <g_k, g_j> <f_j, f_k>``.
    """
    idx = _pattern_index(pattern)
    _check_pattern(pair, idx)
    return float(_frobenius_batch(pair.frame.vectors, pair.dual.vectors, np.array([idx]))[0])


def measure_spectral_radius(pair, pattern):
    idx = _pattern_index(pattern)
    _check_pattern(pair, idx)
    return float(_spectral_batch(pair.frame.vectors, pair.dual.vectors, np.array([idx]))[0])


def measure_numerical_radius(pair, pattern):
    idx = _pattern_index(pattern)
    _check_pattern(pair, idx)
    return float(_numerical_batch(pair.frame.vectors, pair.dual.vectors, np.array([idx]))[0])


def measure(pair, pattern, which):
    which = Measure.parse(which)
    return {
        Measure.FROBENIUS: measure_frobenius,
        Measure.SPECTRAL: measure_spectral_radius,
        Measure.NUMERICAL: measure_numerical_radius,
    }[which](pair, pattern)


def _frobenius_batch(Fv, Gv, patterns):
    if patterns.shape[1] == 1:
        i = patterns[:, 0]
        return np.linalg.norm(Fv[i], axis=1) * np.linalg.norm(Gv[i], axis=1)
    gram_f = Fv @ Fv.conj().T
    gram_g = Gv @ Gv.conj().T
    rows = patterns[:, :, None]
    cols = patterns[:, None, :]
    sub_f = gram_f[rows, cols]
    sub_g = gram_g[rows, cols]
    sq = np.einsum("ckj,cjk->c", sub_g, sub_f).real
    return np.sqrt(np.maximum(sq, 0.0))


def _spectral_batch(Fv, Gv, patterns):
    m, n = patterns.shape[1], Fv.shape[1]
    if m == 1:
        i = patterns[:, 0]
        return np.abs(np.sum(Fv[i] * Gv[i].conj(), axis=1))
    out = np.empty(len(patterns))
    for s in range(0, len(patterns), _CHUNK):
        block = patterns[s:s + _CHUNK]
        Fb, Gb = Fv[block], Gv[block]  # (c, m, n)
        if m < n:
            # nonzero spectrum of E equals that of the m x m matrix [<g_k, f_j>]
            M = Fb.conj() @ np.swapaxes(Gb, 1, 2)
        else:
            M = np.swapaxes(Gb, 1, 2) @ Fb.conj()
        out[s:s + _CHUNK] = numerics.batch_spectral_radius(M)
    return out


def _numerical_batch(Fv, Gv, patterns):
    if patterns.shape[1] == 1:
        i = patterns[:, 0]
        c = np.abs(np.sum(Fv[i] * Gv[i].conj(), axis=1))
        return (c + np.linalg.norm(Fv[i], axis=1) * np.linalg.norm(Gv[i], axis=1)) / 2
    out = np.empty(len(patterns))
    for s in range(0, len(patterns), _CHUNK):
        block = patterns[s:s + _CHUNK]
        E = np.swapaxes(Gv[block], 1, 2) @ Fv[block].conj()
        out[s:s + _CHUNK] = numerics.batch_numerical_radius(E)
    return out


_BATCH = {
    Measure.FROBENIUS: _frobenius_batch,
    Measure.SPECTRAL: _spectral_batch,
    Measure.NUMERICAL: _numerical_batch,
}


def pattern_count(N, m):
    return math.comb(N, m)


def enumerate_patterns(N, m, cap=PATTERN_CAP):
    """All size-``m`` subsets of ``range(N)`` in lexicographic order, as a (C, m) array."""
    if not 1 <= m <= N:
        raise InvalidDimensions(f"need 1 <= m <= N, got m={m}, N={N}")
    count = pattern_count(N, m)
    if cap is not None and count > cap:
        raise PatternBudgetExceeded(f"C({N},{m}) = {count} patterns exceeds the cap of {cap}")
    return np.fromiter(
        (i for c in combinations(range(N), m) for i in c), dtype=np.intp, count=count * m
    ).reshape(count, m)


def pattern_values(pair, which, m, cap=PATTERN_CAP, patterns=None):
    """Measure values for every ``m``-erasure pattern, lexicographic order."""
    which = Measure.parse(which)
    if patterns is None:
        patterns = enumerate_patterns(pair.N, m, cap)
    return patterns, batch_values(pair.frame.vectors, pair.dual.vectors, which, patterns)


def batch_values(Fv, Gv, which, patterns):
    """Measure values from raw ``N x n`` vector arrays; no validation."""
    return _BATCH[Measure.parse(which)](Fv, Gv, patterns)


def lp_mean(values, p):
    """``(mean(values^p))^(1/p)`` with the maximum factored out before powering.

    The sum is exactly rounded (``math.fsum``), so it does not depend on
    summation order.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("no values to average")
    top = float(v.max())
    if top == 0.0:
        return 0.0
    r = (v / top) ** p
    return top * (math.fsum(r.tolist()) / v.size) ** (1.0 / p)


def average_error(pair, spec, cap=PATTERN_CAP):
    if spec.m > pair.N:
        raise InvalidDimensions(f"cannot erase m={spec.m} of N={pair.N} coefficients")
    patterns, values = pattern_values(pair, spec.measure, spec.m, cap)
    return ErrorReport(
        spec=spec,
        patterns=patterns,
        values=values,
        average=lp_mean(values, spec.p),
        lower_bound=frobenius_lower_bound(pair.frame) if spec.m == 1 else None,
        n=pair.n,
        N=pair.N,
    )


def average_value(pair, which, m, p, cap=PATTERN_CAP):
    """Shortcut returning only the l^p average."""
    return average_error(pair, AverageErrorSpec(which, m, p), cap).average


def worst_case_error(pair, which, m, cap=PATTERN_CAP):
    return float(pattern_values(pair, which, m, cap)[1].max())


def frobenius_lower_bound(F):
    """``n / N``: no dual does better on single erasures, under any of the measures."""
    F = as_frame(F)
    return F.n / F.N


def etf_average_prediction(F, m, tol=1e-10):
    """Closed-form m-erasure Frobenius average for an equiangular tight frame.

    ``sqrt(m (n/N)^2 + m (m-1) (nN - n^2) / (N^2 (N-1)))``; the canonical dual
    attains it and is the unique optimum.
    """
    F = as_frame(F)
    if not (is_equiangular(F, tol) and is_tight(F, tol)):
        raise HypothesisViolated("the closed form needs an equiangular tight frame")
    n, N = F.n, F.N
    if not 1 <= m <= N:
        raise InvalidDimensions(f"need 1 <= m <= N, got m={m}, N={N}")
    cross = 0.0 if N == 1 else m * (m - 1) * (n * N - n * n) / (N * N * (N - 1))
    return math.sqrt(m * (n / N) ** 2 + cross)
