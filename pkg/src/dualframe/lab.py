"""Numerical experiments that confirm (or fail to confirm) each stated result.

Every check draws its own random stream from ``(seed, crc32(check_id))`` and
decides its status from the evidence it records and a documented tolerance:

* bound checks (something >= n/N): 1e-12
* closed-form agreement: 1e-10 (1e-12 or 1e-8 where a check says so)
* anything depending on the optimiser: 1e-6

``run_check(check_id, dual_offset=...)`` shifts every "canonical" dual a
check evaluates by a constant chart parameter.  The suite never does this;
it exists so the harness can prove that a corrupted dual is caught.
"""

from dataclasses import dataclass, field
import math
import zlib

import numpy as np

from . import metrics, numerics
from .charts import diagonal_map, dual_from_parameter, make_chart, one_uniform_family, random_parameter
from .errors import HypothesisViolated, NotADual, NotOneUniform, UnknownCheckId
from .frames import (
    DualPair,
    Frame,
    duality_residual,
    explicit,
    harmonic,
    is_equiangular,
    is_one_uniform_dual,
    is_parseval,
    is_tight,
    is_uniform,
    one_uniform_gap,
    random_frame,
    random_unitary,
    scaled,
    simplex,
    transformed,
)
from .metrics import AverageErrorSpec, Measure
from .optimize import (
    Method,
    OptimizeConfig,
    check_canonical_conditions_frobenius,
    check_canonical_conditions_spectral,
    optimize,
    uniqueness_probe,
)

PASS = "pass"
FAIL = "fail"
NOT_MET = "hypothesis_not_met"

BOUND_TOL = 1e-12
FORMULA_TOL = 1e-10
OPTIMIZER_TOL = 1e-6


@dataclass
class TheoremCheck:
    id: str
    status: str
    evidence: dict = field(default_factory=dict)
    tolerance: float = None
    description: str = ""

    @property
    def passed(self):
        return self.status == PASS

    def as_dict(self):
        return {
            "id": self.id,
            "status": self.status,
            "tolerance": self.tolerance,
            "description": self.description,
            "evidence": self.evidence,
        }


@dataclass
class _Context:
    rng: np.random.Generator
    seed: int
    offset: float = 0.0
    options: dict = field(default_factory=dict)

    def canonical(self, chart):
        """Canonical dual, or the corrupted one when a negative control asks for it."""
        B = chart.zero()
        if self.offset and chart.dim:
            B = B + self.offset / math.sqrt(chart.dim)
        return dual_from_parameter(chart, B)


# -- instance generators ------------------------------------------------------

_UNTF_SHAPES = [(3, 2), (4, 2), (5, 2), (4, 3), (5, 3), (6, 2), (6, 4), (7, 3), (7, 4), (8, 3)]


def _untfs(rng, count, rescale=False):
    """Harmonic frames in a random orthonormal basis; optionally with random frame bound."""
    out = []
    for k in range(count):
        N, n = _UNTF_SHAPES[k % len(_UNTF_SHAPES)]
        F = transformed(harmonic(N, n), random_unitary(n, rng))
        if rescale:
            F = scaled(F, rng.uniform(0.5, 2.0))
        out.append(F)
    return out


def _etfs():
    return [
        harmonic(3, 2),
        simplex(2),
        simplex(3),
        simplex(4),
        harmonic(4, 3),
        harmonic(7, 3, columns=[1, 2, 4]),
    ]


def _random_frames(rng, count, max_N=8, max_n=4):
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        N = int(rng.integers(n, max_N + 1))
        out.append(random_frame(N, n, int(rng.integers(2**63))))
    return out


def _random_duals(chart, rng, count, lo=0.1, hi=3.0):
    return [dual_from_parameter(chart, random_parameter(chart, rng, rng.uniform(lo, hi))) for _ in range(count)]


def _random_pattern(rng, N, m):
    return tuple(sorted(rng.choice(N, size=m, replace=False).tolist()))


def _status(ok):
    return PASS if ok else FAIL


def _ae(pair, which, m, p):
    return metrics.average_error(pair, AverageErrorSpec(which, m, p)).average


# -- checks -----------------------------------------------------------------
# Each returns (status, evidence).  ``frames`` is None for the default set.


def _check_trace_identity(frames, ctx):
    """sum_i <f_i, g_i> = n for every dual pair."""
    frames = frames or _random_frames(ctx.rng, 50)
    worst = 0.0
    count = 0
    for F in frames:
        chart = make_chart(F)
        for pair in [ctx.canonical(chart)] + _random_duals(chart, ctx.rng, 10):
            total = complex(np.sum(pair.diagonal_products()))
            scale = 1.0 + float(np.sum(pair.frame.norms * pair.dual.norms))
            worst = max(worst, abs(total - F.n) / scale)
            count += 1
    tol = FORMULA_TOL
    return _status(worst <= tol), {"pairs": count, "max_relative_deviation": worst}


def _constant_diagonal_duals(chart, rng, count):
    """Duals with <f_i, g_i> = c for all i, c left free; returns the solved c values."""
    L, c0 = diagonal_map(chart)
    M = np.hstack([L, -np.ones((chart.frame.N, 1))])
    x, *_ = np.linalg.lstsq(M, -c0, rcond=None)
    if np.abs(M @ x + c0).max() > 1e-9:
        return None
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * s[0]))
    null = Vh[rank:].conj()
    out = []
    for _ in range(count):
        t = rng.standard_normal(len(null)) + 1j * rng.standard_normal(len(null))
        y = x + t @ null if len(null) else x
        B = y[:-1].reshape(chart.shape)
        pair = dual_from_parameter(chart, B)
        c = pair.diagonal_products()
        out.append((complex(y[-1]), float(np.abs(c - c.mean()).max()), complex(c.mean())))
    return out


def _check_one_uniform_constant(frames, ctx):
    """A dual with all <f_i, g_i> equal has the common value n/N."""
    frames = frames or [F for F in _random_frames(ctx.rng, 40, max_N=8, max_n=3) if F.N > F.n][:20]
    worst = 0.0
    used = 0
    for F in frames:
        chart = make_chart(F)
        if chart.dim == 0:
            continue
        sols = _constant_diagonal_duals(chart, ctx.rng, 5)
        if sols is None:
            continue
        used += 1
        for _, spread, mean in sols:
            worst = max(worst, abs(mean - F.n / F.N), spread)
    if used == 0:
        return NOT_MET, {"frames_with_constant_diagonal_duals": 0}
    return _status(worst <= FORMULA_TOL), {
        "frames_with_constant_diagonal_duals": used,
        "max_deviation_from_n_over_N": worst,
    }


def _one_uniform_pairs(frames, ctx, per_frame):
    pairs = []
    for F in frames:
        chart = make_chart(F)
        fam = one_uniform_family(chart)
        if fam is None:
            continue
        for _ in range(per_frame):
            pairs.append(dual_from_parameter(chart, fam.sample(ctx.rng, ctx.rng.uniform(0.1, 2.0))))
    return pairs


def _check_gap(frames, ctx):
    """sum_{i != j} |<f_i, g_j>|^2 >= n - n^2/N for 1-uniform dual pairs."""
    if frames is None:
        frames = _untfs(ctx.rng, 20, rescale=True) + _random_frames(ctx.rng, 30, max_N=8, max_n=3)
    pairs = _one_uniform_pairs(frames, ctx, 2)
    pairs += [ctx.canonical(make_chart(F)) for F in frames if is_uniform(F) and is_tight(F)]
    pairs.append(ctx.canonical(make_chart(explicit([[1, 0], [0, 1], [1, 1]]))))
    gaps = []
    skipped = 0
    for pair in pairs:
        try:
            gaps.append(one_uniform_gap(pair))
        except NotOneUniform:
            skipped += 1
    if not gaps:
        return NOT_MET, {"pairs": 0, "skipped_not_one_uniform": skipped}
    tol = FORMULA_TOL
    return _status(min(gaps) >= -tol), {
        "pairs": len(gaps),
        "skipped_not_one_uniform": skipped,
        "min_gap": min(gaps),
    }


def _check_rank_one_frobenius(frames, ctx):
    """||E_{i}||_F = ||f_i|| ||g_i|| against the explicit rank-one operator."""
    count = int(ctx.options.get("count", 500))
    frames = frames or _random_frames(ctx.rng, 25)
    worst = 0.0
    for k in range(count):
        F = frames[k % len(frames)]
        chart = make_chart(F)
        pair = _random_duals(chart, ctx.rng, 1)[0] if k % 5 else ctx.canonical(chart)
        i = int(ctx.rng.integers(F.N))
        direct = numerics.frobenius_norm(metrics.error_operator(pair, (i,)))
        worst = max(worst, abs(metrics.measure_frobenius(pair, (i,)) - direct))
    tol = BOUND_TOL
    return _status(worst <= tol), {"instances": count, "max_abs_deviation": worst}


def _check_expansion(frames, ctx):
    """m-erasure Frobenius expansion in Gram entries, in both of its written forms."""
    count = int(ctx.options.get("count", 500))
    frames = frames or [F for F in _random_frames(ctx.rng, 40) if F.N >= 2][:25]
    worst = 0.0
    for k in range(count):
        F = frames[k % len(frames)]
        chart = make_chart(F)
        pair = _random_duals(chart, ctx.rng, 1)[0]
        m = int(ctx.rng.integers(1, F.N + 1))
        idx = _random_pattern(ctx.rng, F.N, m)
        direct = numerics.frobenius_norm(metrics.error_operator(pair, idx))
        f, g = pair.frame.vectors[list(idx)], pair.dual.vectors[list(idx)]
        sq = sum(np.vdot(g[r], g[r]).real * np.vdot(f[r], f[r]).real for r in range(m))
        cross = sum(np.vdot(g[k2], g[j]) * np.vdot(f[j], f[k2]) for j in range(m) for k2 in range(j))
        written = math.sqrt(max(sq + 2 * cross.real if m > 1 else sq, 0.0))
        fast = metrics.measure_frobenius(pair, idx)
        scale = max(1.0, direct)
        worst = max(worst, abs(fast - direct) / scale, abs(written - direct) / scale)
    return _status(worst <= BOUND_TOL), {"instances": count, "max_relative_deviation": worst}


def _bound_instances(frames, ctx, per_frame=20):
    frames = frames or _random_frames(ctx.rng, 50)
    for F in frames:
        chart = make_chart(F)
        for pair in _random_duals(chart, ctx.rng, per_frame):
            yield pair, float(ctx.rng.choice([1.5, 2.0, 3.0, 4.0]))


def _check_frobenius_bound(frames, ctx):
    """AE_F^{(1),p} >= n/N for every dual."""
    margins = [_ae(pair, Measure.FROBENIUS, 1, p) - pair.n / pair.N for pair, p in _bound_instances(frames, ctx)]
    return _status(min(margins) >= -BOUND_TOL), {"pairs": len(margins), "min_margin": min(margins)}


def _check_spectral_bound(frames, ctx):
    """AE_R^{(1),p} >= n/N for every dual."""
    margins = [_ae(pair, Measure.SPECTRAL, 1, p) - pair.n / pair.N for pair, p in _bound_instances(frames, ctx)]
    return _status(min(margins) >= -BOUND_TOL), {"pairs": len(margins), "min_margin": min(margins)}


def _check_untf_uniqueness(frames, ctx):
    """UNTF, p > 2: every nonzero chart perturbation is strictly worse than canonical."""
    trials = int(ctx.options.get("trials", 1000))
    if frames is None:
        frames = [harmonic(3, 2), harmonic(5, 3), harmonic(7, 4)]
    rows = []
    ok = True
    tested = 0
    for F in frames:
        if not (is_uniform(F) and is_tight(F) and F.N > F.n):
            rows.append({"N": F.N, "n": F.n, "status": NOT_MET})
            continue
        chart = make_chart(F)
        for p in (3.0, 4.0):
            spec = AverageErrorSpec(Measure.FROBENIUS, 1, p)
            canon = _ae(ctx.canonical(chart), Measure.FROBENIUS, 1, p)
            probe = uniqueness_probe(chart, spec, trials, seed=int(ctx.rng.integers(2**63)))
            at_bound = abs(canon - F.n / F.N) <= BOUND_TOL
            ok &= probe.all_worse and probe.min_excess > 0 and at_bound
            tested += 1
            rows.append({
                "N": F.N, "n": F.n, "p": p, "canonical": canon, "bound": F.n / F.N,
                "trials": probe.trials, "min_excess": probe.min_excess, "all_worse": probe.all_worse,
            })
    if tested == 0:
        return NOT_MET, {"table": rows}
    return _status(ok), {"table": rows, "min_excess": min(r["min_excess"] for r in rows if "min_excess" in r)}


def _sufficient_instances(rng):
    named = [
        explicit([[1, 0], [0, 1], [1, 1]]),
        explicit([[1, 0], [0, 1], [2, 0]]),
        explicit([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1]]),
    ]
    return named + _untfs(rng, 6) + _random_frames(rng, 8, max_N=6, max_n=3)


def _gradient(chart, which, p, seed, restarts=3, start_at_canonical=False):
    cfg = OptimizeConfig(
        AverageErrorSpec(which, 1, p),
        method=Method.GRADIENT,
        restarts=restarts,
        seed=seed,
        start_at_canonical=start_at_canonical,
    )
    return optimize(chart, cfg)


def _sufficient_check(frames, ctx, which, conditions, p):
    frames = frames or _sufficient_instances(ctx.rng)
    rows = []
    ok = True
    held = 0
    for k, F in enumerate(frames):
        cond = conditions(F)
        row = {"N": F.N, "n": F.n, "conditions_hold": cond["holds"], "eta2": cond["detail"]["eta2"]}
        if cond["holds"] and F.N > F.n:
            held += 1
            chart = make_chart(F)
            canon = _ae(ctx.canonical(chart), which, 1, p)
            best = _gradient(chart, which, p, seed=ctx.seed * 1000 + k).best_value
            probe = uniqueness_probe(chart, AverageErrorSpec(which, 1, p), 200, seed=int(ctx.rng.integers(2**63)))
            row.update(canonical=canon, optimiser_best=best, probe_min_excess=probe.min_excess)
            ok &= canon <= best + OPTIMIZER_TOL and probe.min_excess >= -OPTIMIZER_TOL
        rows.append(row)
    if held == 0:
        return NOT_MET, {"table": rows}
    return _status(ok), {"instances_meeting_conditions": held, "table": rows}


def _check_frobenius_sufficient(frames, ctx):
    """Where the Frobenius sufficient conditions hold, canonical is 1-erasure optimal (p = 3)."""
    return _sufficient_check(frames, ctx, Measure.FROBENIUS, check_canonical_conditions_frobenius, 3.0)


def _check_spectral_sufficient(frames, ctx):
    """Where the spectral sufficient conditions hold, canonical is 1-erasure spectrally optimal."""
    return _sufficient_check(frames, ctx, Measure.SPECTRAL, check_canonical_conditions_spectral, 2.0)


def _check_etf_formula(frames, ctx):
    """ETF: enumerated canonical AE_F^{(m),p} matches the closed form for m = 1..N, p in {2, 3}."""
    frames = frames or [harmonic(3, 2), simplex(2), simplex(3), simplex(4)]
    rows = []
    worst = 0.0
    for F in frames:
        try:
            predicted = [metrics.etf_average_prediction(F, m) for m in range(1, F.N + 1)]
        except HypothesisViolated:
            rows.append({"N": F.N, "n": F.n, "status": NOT_MET})
            continue
        pair = ctx.canonical(make_chart(F))
        for m, pred in zip(range(1, F.N + 1), predicted):
            for p in (2.0, 3.0):
                got = _ae(pair, Measure.FROBENIUS, m, p)
                worst = max(worst, abs(got - pred))
                rows.append({"N": F.N, "n": F.n, "m": m, "p": p, "predicted": pred, "measured": got,
                             "deviation": abs(got - pred)})
    if not any("predicted" in r for r in rows):
        return NOT_MET, {"table": rows}
    return _status(worst <= FORMULA_TOL), {"table": rows, "max_deviation": worst}


def _check_etf_optimal_one_uniform(frames, ctx):
    """ETF: optimiser outputs for the Frobenius 1-erasure problem are 1-uniform (a sampled check)."""
    frames = frames or _etfs()
    rows = []
    ok = True
    tested = 0
    for k, F in enumerate(frames):
        if not (is_equiangular(F) and is_tight(F)):
            rows.append({"N": F.N, "n": F.n, "status": NOT_MET})
            continue
        chart = make_chart(F)
        results = [optimize(chart, OptimizeConfig(AverageErrorSpec(Measure.FROBENIUS, 1, 2), method=Method.CLOSED_FORM))]
        for p in (1.5, 3.0):
            results.append(_gradient(chart, Measure.FROBENIUS, p, seed=ctx.seed * 1000 + k, restarts=2))
        for res in results:
            dev = float(np.abs(res.best_pair.diagonal_products() - F.n / F.N).max())
            ok &= dev <= OPTIMIZER_TOL
            tested += 1
            rows.append({"N": F.N, "n": F.n, "p": res.spec.p, "method": res.method.value,
                         "value": res.best_value, "max_diagonal_deviation": dev})
    if tested == 0:
        return NOT_MET, {"table": rows}
    return _status(ok), {"table": rows, "note": "sampled necessary-condition test over optimiser outputs"}


def _check_rank_one_numerical(frames, ctx):
    """Numerical radius of g_i f_i^* from the angle search equals (|<f_i,g_i>| + ||f_i|| ||g_i||)/2."""
    count = int(ctx.options.get("count", 500))
    frames = frames or _random_frames(ctx.rng, 25)
    worst = 0.0
    for k in range(count):
        F = frames[k % len(frames)]
        chart = make_chart(F)
        pair = _random_duals(chart, ctx.rng, 1)[0] if k % 5 else ctx.canonical(chart)
        i = int(ctx.rng.integers(F.N))
        searched = numerics.numerical_radius(metrics.error_operator(pair, (i,)))
        f, g = pair.frame.vectors[i], pair.dual.vectors[i]
        closed = (abs(np.vdot(g, f)) + np.linalg.norm(f) * np.linalg.norm(g)) / 2
        worst = max(worst, abs(searched - closed), abs(metrics.measure_numerical_radius(pair, (i,)) - closed))
    tol = 1e-8
    return _status(worst <= tol), {"instances": count, "max_abs_deviation": worst, "tolerance_used": tol}


def _check_rank_one_spectral(frames, ctx):
    """Spectral radius of g_i f_i^* from eigenvalues equals |<f_i, g_i>|."""
    count = int(ctx.options.get("count", 500))
    frames = frames or _random_frames(ctx.rng, 25)
    worst = 0.0
    for k in range(count):
        F = frames[k % len(frames)]
        chart = make_chart(F)
        pair = _random_duals(chart, ctx.rng, 1)[0] if k % 5 else ctx.canonical(chart)
        i = int(ctx.rng.integers(F.N))
        eig = numerics.spectral_radius(metrics.error_operator(pair, (i,)))
        closed = abs(np.vdot(pair.dual.vectors[i], pair.frame.vectors[i]))
        worst = max(worst, abs(eig - closed), abs(metrics.measure_spectral_radius(pair, (i,)) - closed))
    return _status(worst <= BOUND_TOL), {"instances": count, "max_abs_deviation": worst}


def _uniform_parseval(rng, count):
    return _untfs(rng, count)


def _check_uniform_parseval_numerical(frames, ctx):
    """Uniform Parseval: canonical attains n/N under the numerical radius and is the unique optimum."""
    frames = frames or _uniform_parseval(ctx.rng, 8)
    rows = []
    ok = True
    tested = 0
    for F in frames:
        if not (is_uniform(F) and is_parseval(F)):
            rows.append({"N": F.N, "n": F.n, "status": NOT_MET})
            continue
        chart = make_chart(F)
        for p in (2.0, 3.0):
            canon = _ae(ctx.canonical(chart), Measure.NUMERICAL, 1, p)
            probe = uniqueness_probe(chart, AverageErrorSpec(Measure.NUMERICAL, 1, p), 200,
                                     seed=int(ctx.rng.integers(2**63)))
            dev = abs(canon - F.n / F.N)
            ok &= dev <= BOUND_TOL and probe.all_worse
            tested += 1
            rows.append({"N": F.N, "n": F.n, "p": p, "canonical": canon, "bound": F.n / F.N,
                         "deviation": dev, "probe_min_excess": probe.min_excess})
    if tested == 0:
        return NOT_MET, {"table": rows}
    return _status(ok), {"table": rows}


def _chain_check(frames, ctx, premise, conclusion):
    """Tight frames where canonical is optimal for ``premise``: it must also beat samples under ``conclusion``."""
    frames = frames or _untfs(ctx.rng, 10, rescale=True)
    samples = int(ctx.options.get("samples", 200))
    rows = []
    ok = True
    held = 0
    for F in frames:
        if not is_tight(F):
            rows.append({"N": F.N, "n": F.n, "status": NOT_MET})
            continue
        chart = make_chart(F)
        canon = ctx.canonical(chart)
        duals = _random_duals(chart, ctx.rng, samples, lo=0.01, hi=2.0)
        for p in (2.0, 3.0):
            c_pre = _ae(canon, premise, 1, p)
            if premise is Measure.SPECTRAL:
                premise_ok = abs(c_pre - F.n / F.N) <= BOUND_TOL
            else:
                premise_ok = all(c_pre <= _ae(d, premise, 1, p) + 1e-9 for d in duals)
            if not premise_ok:
                rows.append({"N": F.N, "n": F.n, "p": p, "status": NOT_MET})
                continue
            held += 1
            c_con = _ae(canon, conclusion, 1, p)
            margin = min(_ae(d, conclusion, 1, p) for d in duals) - c_con
            ok &= margin >= -1e-9
            rows.append({"N": F.N, "n": F.n, "p": p, "canonical_premise": c_pre,
                         "canonical_conclusion": c_con, "min_sample_margin": margin})
    if held == 0:
        return NOT_MET, {"table": rows}
    return _status(ok), {"instances": held, "samples_per_frame": samples, "table": rows}


def _check_spectral_to_numerical(frames, ctx):
    """Tight frame, canonical spectrally optimal => canonical numerically optimal."""
    return _chain_check(frames, ctx, Measure.SPECTRAL, Measure.NUMERICAL)


def _check_numerical_to_frobenius(frames, ctx):
    """Tight frame, canonical numerically optimal => canonical Frobenius optimal."""
    return _chain_check(frames, ctx, Measure.NUMERICAL, Measure.FROBENIUS)


def _iff_frames(rng):
    extra = [random_frame(6, 2, int(rng.integers(2**63))), random_frame(7, 3, int(rng.integers(2**63))),
             random_frame(8, 2, int(rng.integers(2**63)))]
    return _untfs(rng, 20, rescale=True) + extra


def _check_spectral_iff(frames, ctx):
    """A dual attains AE_R^{(1),p} = n/N exactly when it is 1-uniform."""
    frames = frames or _iff_frames(ctx.rng)
    samples = int(ctx.options.get("samples", 200))
    tol = 1e-9
    agree = disagree = attained = missed = 0
    frames_used = 0
    rows = []
    for k, F in enumerate(frames):
        chart = make_chart(F)
        fam = one_uniform_family(chart)
        if fam is None:
            rows.append({"N": F.N, "n": F.n, "status": NOT_MET})
            continue
        frames_used += 1
        pairs = _random_duals(chart, ctx.rng, samples)
        pairs += [dual_from_parameter(chart, fam.sample(ctx.rng, ctx.rng.uniform(0.1, 2.0))) for _ in range(5)]
        if is_uniform(F) and is_tight(F):
            pairs.append(ctx.canonical(chart))
        pairs.append(_gradient(chart, Measure.SPECTRAL, 2.0, seed=ctx.seed * 1000 + k, restarts=1).best_pair)
        bad = 0
        for pair in pairs:
            hit = abs(_ae(pair, Measure.SPECTRAL, 1, 2.0) - F.n / F.N) <= tol
            uni = is_one_uniform_dual(pair, tol)
            if hit == uni:
                agree += 1
            else:
                disagree += 1
                bad += 1
            attained += hit
            missed += not hit
        rows.append({"N": F.N, "n": F.n, "duals": len(pairs), "disagreements": bad})
    if frames_used == 0:
        return NOT_MET, {"table": rows}
    ok = disagree == 0 and attained > 0 and missed > 0
    return _status(ok), {
        "frames": frames_used, "agree": agree, "disagree": disagree,
        "attaining": attained, "not_attaining": missed, "tolerance_used": tol, "table": rows,
    }


def _check_utf_spectral(frames, ctx):
    """Uniform tight frame: canonical dual is 1-uniform and attains n/N spectrally."""
    frames = frames or _untfs(ctx.rng, 10, rescale=True)
    worst = 0.0
    tested = 0
    for F in frames:
        if not (is_uniform(F) and is_tight(F)):
            continue
        tested += 1
        pair = ctx.canonical(make_chart(F))
        dev = float(np.abs(pair.diagonal_products() - F.n / F.N).max())
        worst = max(worst, dev, *(abs(_ae(pair, Measure.SPECTRAL, 1, p) - F.n / F.N) for p in (1.5, 2.0, 4.0)))
    if tested == 0:
        return NOT_MET, {"frames": 0}
    return _status(worst <= BOUND_TOL), {"frames": tested, "max_deviation": worst}


def _check_uniform_parseval_combined(frames, ctx):
    """Uniform Parseval: canonical equals F and all three averages equal n/N."""
    frames = frames or _uniform_parseval(ctx.rng, 8)
    worst = 0.0
    tested = 0
    for F in frames:
        if not (is_uniform(F) and is_parseval(F)):
            continue
        tested += 1
        pair = ctx.canonical(make_chart(F))
        worst = max(worst, float(np.abs(pair.dual.vectors - F.vectors).max()))
        for which in Measure:
            for p in (1.5, 2.0, 4.0):
                worst = max(worst, abs(_ae(pair, which, 1, p) - F.n / F.N))
    if tested == 0:
        return NOT_MET, {"frames": 0}
    return _status(worst <= BOUND_TOL), {"frames": tested, "max_deviation": worst}


def _example_alpha_family(alpha):
    """The dual family as printed for the worked example, at parameter ``alpha``."""
    a = alpha
    return np.array([
        [2 / 3, -1 / 3 + a],
        [-1 / 3 + a, 2 / 3],
        [1 / 3 - a, 1 / 3 - a],
    ])


def _check_example(frames, ctx):
    """The worked example {e1, e2, e1 + e2}."""
    F = frames[0] if frames else explicit([[1, 0], [0, 1], [1, 1]])
    chart = make_chart(F)
    canon = ctx.canonical(chart)
    spec_vals = {str(p): _ae(canon, Measure.SPECTRAL, 1, p) for p in (1.5, 2.0, 4.0)}
    fro = _ae(canon, Measure.FROBENIUS, 1, 2.0)
    best = optimize(chart, OptimizeConfig(AverageErrorSpec(Measure.FROBENIUS, 1, 2), method=Method.CLOSED_FORM))
    expected_dual = np.array([[0.75, -0.25], [-0.25, 0.75], [0.25, 0.25]])
    target_fro = math.sqrt(14 / 27)
    dev_spec = max(abs(v - 2 / 3) for v in spec_vals.values())
    dev_fro = abs(fro - target_fro)
    dev_opt = abs(best.best_value - 1 / math.sqrt(2))
    dev_dual = float(np.abs(best.best_dual.vectors - expected_dual).max())
    alpha = 0.05
    printed = _example_alpha_family(alpha)
    residual = duality_residual(F, Frame(printed))
    try:
        DualPair(F, Frame(printed))
        printed_is_dual = True
    except NotADual:
        printed_is_dual = False
    # evaluating the printed family regardless of duality
    norms = np.linalg.norm(F.vectors, axis=1) * np.linalg.norm(printed, axis=1)
    printed_value = math.sqrt(float(np.mean(norms**2)))
    evidence = {
        "spectral_canonical": spec_vals,
        "frobenius_canonical": fro,
        "frobenius_expected": target_fro,
        "optimum_value": best.best_value,
        "optimum_expected": 1 / math.sqrt(2),
        "optimum_dual": [[float(x) for x in row.real] for row in best.best_dual.vectors],
        "max_deviation": max(dev_spec, dev_fro, dev_opt, dev_dual),
        "printed_claim": {
            "alpha": alpha,
            "claimed_value": 0.435,
            "duality_residual": residual,
            "is_dual": printed_is_dual,
            "value_if_evaluated": printed_value,
            "annotation": "expected discrepancy: the printed family is not a dual, claim not reproducible",
        },
    }
    ok = dev_spec <= BOUND_TOL and dev_fro <= BOUND_TOL and dev_opt <= 1e-9 and dev_dual <= 1e-9
    ok &= best.best_value < fro and not printed_is_dual
    return _status(ok), evidence


def _check_full_erasure(frames, ctx):
    """Erasing every coefficient leaves E = I, so AE_F^{(N),p} = sqrt(n)."""
    frames = frames or _random_frames(ctx.rng, 30) + _untfs(ctx.rng, 5) + _etfs()
    worst = 0.0
    for F in frames:
        pair = ctx.canonical(make_chart(F))
        for p in (2.0, 3.0):
            worst = max(worst, abs(_ae(pair, Measure.FROBENIUS, F.N, p) - math.sqrt(F.n)))
    return _status(worst <= BOUND_TOL), {"frames": len(frames), "max_deviation": worst}


# -- registry ----------------------------------------------------------------


@dataclass(frozen=True)
class _Entry:
    func: object
    tolerance: float
    covers: str


REGISTRY = {
    "trace-identity": _Entry(_check_trace_identity, FORMULA_TOL, "dual-pair trace identity"),
    "remark-one-uniform-constant": _Entry(_check_one_uniform_constant, FORMULA_TOL, "1-uniform constant is n/N"),
    "prop2.6-gap": _Entry(_check_gap, FORMULA_TOL, "off-diagonal gap for 1-uniform duals"),
    "eq2.5-closed-form": _Entry(_check_rank_one_frobenius, BOUND_TOL, "rank-one Frobenius closed form"),
    "eq4.6-bound": _Entry(_check_frobenius_bound, BOUND_TOL, "Frobenius lower bound n/N"),
    "eq4.8-expansion": _Entry(_check_expansion, BOUND_TOL, "m-erasure Frobenius expansion"),
    "untf-uniqueness": _Entry(_check_untf_uniqueness, BOUND_TOL, "UNTF unique Frobenius optimum, p > 2"),
    "thm3.2-sufficient": _Entry(_check_frobenius_sufficient, OPTIMIZER_TOL, "Frobenius sufficient conditions"),
    "thm3.4-formula": _Entry(_check_etf_formula, FORMULA_TOL, "ETF closed-form m-erasure average"),
    "cor-frobenius-one-uniform": _Entry(_check_etf_optimal_one_uniform, OPTIMIZER_TOL, "ETF optimal duals are 1-uniform"),
    "rank-one-numerical-radius": _Entry(_check_rank_one_numerical, 1e-8, "rank-one numerical radius"),
    "prop-uniform-parseval-numerical": _Entry(_check_uniform_parseval_numerical, BOUND_TOL,
                                              "uniform Parseval numerical optimum"),
    "prop6.2-implication": _Entry(_check_numerical_to_frobenius, 1e-9, "numerical optimum implies Frobenius"),
    "rank-one-spectral-radius": _Entry(_check_rank_one_spectral, BOUND_TOL, "rank-one spectral radius"),
    "spectral-bound": _Entry(_check_spectral_bound, BOUND_TOL, "spectral lower bound n/N"),
    "prop3.2-iff": _Entry(_check_spectral_iff, 1e-9, "spectral optimum iff 1-uniform"),
    "cor-utf-spectral": _Entry(_check_utf_spectral, BOUND_TOL, "UTF canonical spectrally optimal"),
    "thm-spectral-sufficient": _Entry(_check_spectral_sufficient, OPTIMIZER_TOL, "spectral sufficient conditions"),
    "prop6.1-implication": _Entry(_check_spectral_to_numerical, 1e-9, "spectral optimum implies numerical"),
    "prop-uniform-parseval-combined": _Entry(_check_uniform_parseval_combined, BOUND_TOL,
                                             "uniform Parseval optimal in all three measures"),
    "example-s5": _Entry(_check_example, 1e-9, "worked example"),
    "full-erasure-identity": _Entry(_check_full_erasure, BOUND_TOL, "E = I when everything is erased"),
}


def check_ids():
    return list(REGISTRY)


def coverage():
    """Map from covered result to check id."""
    return {entry.covers: cid for cid, entry in REGISTRY.items()}


def _rng_for(seed, check_id):
    return np.random.default_rng([int(seed), zlib.crc32(check_id.encode())])


def _clean(x):
    # evidence must be plain JSON
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def run_check(check_id, frames=None, seed=0, dual_offset=0.0, **options):
    try:
        entry = REGISTRY[check_id]
    except KeyError:
        raise UnknownCheckId(f"unknown check id {check_id!r}; known: {', '.join(REGISTRY)}") from None
    if frames is not None:
        frames = [F if isinstance(F, Frame) else Frame(F) for F in frames]
    ctx = _Context(_rng_for(seed, check_id), int(seed), float(dual_offset), options)
    status, evidence = entry.func(frames, ctx)
    evidence = _clean(evidence)
    evidence["tolerance"] = entry.tolerance
    return TheoremCheck(check_id, status, evidence, entry.tolerance, (entry.func.__doc__ or "").strip())


def run_suite(seed=0, ids=None):
    """Run every registered check; returns ``(checks, exit_status)`` with exit 1 iff any check failed."""
    checks = [run_check(cid, seed=seed) for cid in (ids or REGISTRY)]
    return checks, int(any(c.status == FAIL for c in checks))


def format_table(checks):
    width = max(len(c.id) for c in checks) if checks else 10
    lines = [f"{'check':<{width}}  {'status':<18}  tolerance"]
    for c in checks:
        lines.append(f"{c.id:<{width}}  {c.status:<18}  {c.tolerance:.0e}")
    return "\n".join(lines) + "\n"


def format_detail(check):
    """Human-readable evidence; tables are printed row by row."""
    lines = [f"{check.id}: {check.status}"]
    for key, value in check.evidence.items():
        if key == "table" and isinstance(value, list):
            cols = []
            for row in value:
                cols += [k for k in row if k not in cols]
            lines.append("  " + "  ".join(f"{c:>12}" for c in cols))
            for row in value:
                lines.append("  " + "  ".join(f"{_cell(row.get(c, '')):>12}" for c in cols))
        else:
            lines.append(f"  {key}: {value}")
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)
