"""Global search: Nelder-Mead simplex, simulated annealing, multi-start driver.

Both optimizers are self-contained implementations (no scipy.optimize) so
that every evaluation, every random draw, and every trace row is under this
module's control; same seed and config give bit-identical runs. They accept
any callable f(x) -> float on flat real vectors. When f is a `MubObjective`
the annealer moves its whole proposal loop into the compiled kernel, which
is what makes multi-million-evaluation budgets practical.

Randomness contract of the annealer, per Monte Carlo step, in draw order:
subset-size counts, then the index columns (one draw per possible subset
slot, on shrinking ranges), then the Gaussian step matrix, then the
acceptance uniforms. The python and kernel proposal loops consume these
arrays identically, so switching paths cannot change a run.
"""

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .hurwitz import sample_haar_vector, sample_uniform_vector
from .objective import BasisSet, MubObjective, max_mu_subset, residual_report

__all__ = [
    "NelderMeadConfig",
    "AnnealingConfig",
    "RunTrace",
    "RestartSummary",
    "SearchResult",
    "nelder_mead",
    "simulated_annealing",
    "multistart_search",
]

#: points used to estimate the initial temperature when none is given
T0_PROBE_POINTS = 100

#: simplex edge below which the simplex is considered collapsed
COLLAPSE_EDGE = 1e-14


@dataclass
class NelderMeadConfig:
    """Simplex-move coefficients and stopping rules for `nelder_mead`.

    The 1.0 / 2.0 / 0.5 / 0.5 coefficients are the classic amoeba choices.
    `f_tol` is the absolute spread max f - min f over the simplex at which
    the search declares convergence; `target`, when set, stops as soon as
    the best value drops below it. A collapsed simplex (all edges shorter
    than 1e-14 without meeting f_tol) is re-inflated around the best vertex
    once when `restart_on_collapse` is set, a known rescue for
    high-dimensional runs.
    """

    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    initial_step: float = 0.3
    max_evals: int = 200_000
    f_tol: float = 1e-12
    restart_on_collapse: bool = True
    target: float | None = None

    def __post_init__(self):
        for name in ("reflection", "expansion", "contraction", "shrink",
                     "initial_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.expansion <= self.reflection:
            raise ValueError("expansion must exceed reflection")
        if self.max_evals < 1 or self.f_tol <= 0:
            raise ValueError("max_evals must be >= 1 and f_tol positive")


@dataclass
class AnnealingConfig:
    """Metropolis schedule for `simulated_annealing`.

    Temperature starts at `t0` (estimated from the objective's spread over
    100 probe points when left as None) and is multiplied by `gamma` after
    every Monte Carlo step of `proposals_per_step` proposals. A proposal
    perturbs a random subset of 1..max_subset coordinates by Gaussian steps
    of scale sigma0 * sqrt(T / t0). The run stops on reaching `target`, on
    cooling below t_floor * t0, or on exhausting `max_evals`; with
    max_evals None the temperature floor alone ends the run (after about
    log(t_floor) / log(gamma) Monte Carlo steps, so it always terminates).
    The search driver caps its restarts at 3e6 evaluations instead.
    """

    t0: float | None = None
    gamma: float = 0.95
    proposals_per_step: int = 15_000
    sigma0: float = 0.5
    max_subset: int = 3
    target: float = 1e-10
    t_floor: float = 1e-12
    max_evals: int | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.proposals_per_step < 1:
            raise ValueError("proposals_per_step must be >= 1")
        if self.sigma0 <= 0 or self.max_subset < 1:
            raise ValueError("sigma0 must be positive and max_subset >= 1")
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("t0 must be positive when given")
        if self.max_evals is not None and self.max_evals < 1:
            raise ValueError("max_evals must be >= 1 when given")
        if self.t_floor <= 0:
            raise ValueError("t_floor must be positive")


@dataclass
class RunTrace:
    """Record of one optimization run.

    `samples` holds (step, best_objective, temperature) rows where step is
    the cumulative evaluation count; the best-objective column is
    non-increasing. Temperature is 0.0 for simplex phases. `report` is
    filled in by the multi-start driver for basis-set objectives.
    """

    optimizer: str
    config: dict
    samples: list
    final_x: np.ndarray
    final_f: float
    evaluations: int
    wall_time: float
    converged: bool
    seed: str | None = None
    d: int | None = None
    m: int | None = None
    report: object = None


@dataclass(frozen=True)
class RestartSummary:
    index: int
    seed: str
    final_objective: float
    evaluations: int
    wall_time: float
    converged: bool


@dataclass
class SearchResult:
    """Outcome of a multi-start run: the best point plus per-restart records.

    `best_objective` is the minimum over `restarts` final objectives;
    `success_count` counts restarts that finished below the threshold.
    `best_set`, `report` and `mu_subset` describe the best point as matrices.
    """

    d: int
    m: int
    gauge_fixed: bool
    optimizer: str
    threshold: float
    best_objective: float
    best_index: int
    best_x: np.ndarray
    best_set: BasisSet
    report: object
    mu_subset: list
    success_count: int
    restarts: list = field(default_factory=list)
    traces: list = field(default_factory=list)


def _record(samples, on_sample, step, best, temperature):
    samples.append((step, best, temperature))
    if on_sample is not None:
        on_sample(step, best, temperature)


def nelder_mead(f, x0, cfg=None, on_sample=None):
    """Minimize f from x0 with the amoeba moves; returns (x, fx, trace).

    Runs until the simplex function spread drops below cfg.f_tol, the
    optional target is reached, or the evaluation budget runs out (the
    budget is checked once per iteration, so it can overshoot by a few
    evaluations). The returned point is the best vertex ever seen; the
    simplex never discards it, so f(x) <= f(x0) always holds.
    """
    cfg = cfg if cfg is not None else NelderMeadConfig()
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.size == 0 or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be a finite 1-D vector")
    n = x0.size
    start = time.perf_counter()

    def build_simplex(center, step):
        pts = np.tile(center, (n + 1, 1))
        for i in range(n):
            pts[i + 1, i] += step
        return pts

    simplex = build_simplex(x0, cfg.initial_step)
    fvals = np.array([f(p) for p in simplex], dtype=float)
    evals = n + 1
    samples = []
    best = float(np.min(fvals))
    _record(samples, on_sample, evals, best, 0.0)
    converged = False
    restarted = False

    while evals < cfg.max_evals:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]
        if fvals[0] < best:
            best = float(fvals[0])
            _record(samples, on_sample, evals, best, 0.0)
        if cfg.target is not None and best < cfg.target:
            converged = True
            break
        if fvals[-1] - fvals[0] < cfg.f_tol:
            converged = True
            break
        edge = np.max(np.abs(simplex[1:] - simplex[0]))
        if edge < COLLAPSE_EDGE:
            if cfg.restart_on_collapse and not restarted:
                restarted = True
                simplex = build_simplex(simplex[0], cfg.initial_step * 0.01)
                fvals = np.concatenate(
                    [fvals[:1], [f(p) for p in simplex[1:]]])
                evals += n
                continue
            break

        centroid = np.mean(simplex[:-1], axis=0)
        xr = centroid + cfg.reflection * (centroid - simplex[-1])
        fr = f(xr)
        evals += 1
        if fr < fvals[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = f(xe)
            evals += 1
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + cfg.contraction * (xr - centroid)
                fc = f(xc)
                evals += 1
                if fc <= fr:
                    simplex[-1], fvals[-1] = xc, fc
                else:
                    simplex, fvals, evals = _shrink(f, simplex, fvals, evals, cfg)
            else:
                xc = centroid + cfg.contraction * (simplex[-1] - centroid)
                fc = f(xc)
                evals += 1
                if fc < fvals[-1]:
                    simplex[-1], fvals[-1] = xc, fc
                else:
                    simplex, fvals, evals = _shrink(f, simplex, fvals, evals, cfg)

    i = int(np.argmin(fvals))
    if fvals[i] < best:
        best = float(fvals[i])
        _record(samples, on_sample, evals, best, 0.0)
    trace = RunTrace(optimizer="nelder-mead", config=asdict(cfg),
                     samples=samples, final_x=simplex[i].copy(),
                     final_f=best, evaluations=evals,
                     wall_time=time.perf_counter() - start,
                     converged=converged)
    return simplex[i].copy(), best, trace


def _shrink(f, simplex, fvals, evals, cfg):
    for i in range(1, simplex.shape[0]):
        simplex[i] = simplex[0] + cfg.shrink * (simplex[i] - simplex[0])
        fvals[i] = f(simplex[i])
    return simplex, fvals, evals + simplex.shape[0] - 1


def _draw_block(rng, block, dim, max_subset, sigma):
    """Pre-draw one Monte Carlo step's randomness in the documented order."""
    counts = rng.integers(1, max_subset + 1, size=block)
    raw_idx = np.zeros((block, 3), dtype=np.int64)
    for q in range(max_subset):
        raw_idx[:, q] = rng.integers(0, dim - q, size=block)
    steps = np.zeros((block, 3))
    steps[:, :max_subset] = rng.standard_normal((block, max_subset)) * sigma
    uacc = rng.random(block)
    return counts.astype(np.int64), raw_idx, steps, uacc


def _python_block(f, x, fx, xbest, fbest, counts, raw_idx, steps, uacc,
                  temperature, target, limit):
    """Pure-python mirror of `anneal_block_kernel` for arbitrary callables."""
    nprop = min(counts.shape[0], limit)
    idx = [0, 0, 0]
    old = [0.0, 0.0, 0.0]
    hit = False
    done = 0
    for t in range(nprop):
        kk = int(counts[t])
        idx[0] = int(raw_idx[t, 0])
        if kk >= 2:
            c = int(raw_idx[t, 1])
            if c >= idx[0]:
                c += 1
            idx[1] = c
        if kk >= 3:
            lo, hi = sorted((idx[0], idx[1]))
            c = int(raw_idx[t, 2])
            if c >= lo:
                c += 1
            if c >= hi:
                c += 1
            idx[2] = c
        for q in range(kk):
            old[q] = x[idx[q]]
            x[idx[q]] += steps[t, q]
        fnew = f(x)
        done += 1
        df = fnew - fx
        if df <= 0.0 or uacc[t] < math.exp(-df / temperature):
            fx = fnew
            if fnew < fbest:
                fbest = fnew
                xbest[:] = x
                if fbest < target:
                    hit = True
                    break
        else:
            for q in range(kk - 1, -1, -1):
                x[idx[q]] = old[q]
    return fx, fbest, done, hit


def _estimate_t0(f, x0, cfg, rng):
    """Initial temperature from the objective's spread over probe points.

    Basis-set objectives probe Haar-random configurations; anything else is
    probed by Gaussian perturbations of the start point. Either way the
    draws come from the caller's stream, so the estimate is reproducible.
    """
    vals = np.empty(T0_PROBE_POINTS)
    if isinstance(f, MubObjective):
        for i in range(T0_PROBE_POINTS):
            parts = [sample_haar_vector(f.d, rng) for _ in range(f.n_free)]
            vals[i] = f(np.concatenate(parts))
    else:
        for i in range(T0_PROBE_POINTS):
            vals[i] = f(x0 + cfg.sigma0 * rng.standard_normal(x0.size))
    t0 = float(np.std(vals))
    return t0 if t0 > 0.0 else 1.0


def simulated_annealing(f, x0, cfg=None, rng=None, on_sample=None):
    """Metropolis search from x0; returns (x, fx, trace).

    One Monte Carlo step is cfg.proposals_per_step proposals at constant
    temperature, after which T is multiplied by cfg.gamma and one trace row
    (cumulative evaluations, best so far, T) is recorded. `rng` may be a
    seed or a Generator; identical (x0, cfg, rng state) gives an identical
    run down to the last bit. Returns the best point ever accepted.
    """
    cfg = cfg if cfg is not None else AnnealingConfig()
    rng = np.random.default_rng(rng)
    x = np.array(x0, dtype=float)
    if x.ndim != 1 or x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("x0 must be a finite 1-D vector")
    dim = x.size
    start = time.perf_counter()

    is_mub = isinstance(f, MubObjective)
    fx = float(f(x))
    evals = 1
    if cfg.t0 is not None:
        t0 = cfg.t0
    else:
        t0 = _estimate_t0(f, x, cfg, rng)
        evals += T0_PROBE_POINTS
    xbest = x.copy()
    fbest = fx
    samples = []
    _record(samples, on_sample, evals, fbest, t0)

    max_subset = min(cfg.max_subset, dim)
    temperature = t0
    converged = fbest < cfg.target
    while not converged:
        if temperature < cfg.t_floor * t0:
            break
        if cfg.max_evals is None:
            limit = cfg.proposals_per_step
        elif evals >= cfg.max_evals:
            break
        else:
            limit = min(cfg.proposals_per_step, cfg.max_evals - evals)
        sigma = cfg.sigma0 * math.sqrt(temperature / t0)
        counts, raw_idx, steps, uacc = _draw_block(
            rng, cfg.proposals_per_step, dim, max_subset, sigma)
        if is_mub:
            fx, fbest, done, hit = _kernels.anneal_block_kernel(
                x, fx, xbest, fbest, counts, raw_idx, steps, uacc,
                temperature, f.d, f.m, f.gauge_fixed, cfg.target, limit)
        else:
            fx, fbest, done, hit = _python_block(
                f, x, fx, xbest, fbest, counts, raw_idx, steps, uacc,
                temperature, cfg.target, limit)
        evals += done
        _record(samples, on_sample, evals, fbest, temperature)
        if hit:
            converged = True
            break
        temperature *= cfg.gamma

    trace = RunTrace(optimizer="annealing", config=asdict(cfg),
                     samples=samples, final_x=xbest.copy(), final_f=fbest,
                     evaluations=evals,
                     wall_time=time.perf_counter() - start,
                     converged=converged)
    return xbest.copy(), fbest, trace


def _initial_vector(obj, rng, sampling):
    parts = []
    for _ in range(obj.n_free):
        if sampling == "haar":
            parts.append(sample_haar_vector(obj.d, rng))
        else:
            parts.append(sample_uniform_vector(obj.d, rng))
    return np.concatenate(parts)


def multistart_search(d, m, optimizer="both", restarts=20, base_seed=0,
                      gauge_fixed=True, sampling="haar", threshold=1e-10,
                      nm_cfg=None, sa_cfg=None, trace_sinks=None):
    """Run `restarts` independent seeded searches; returns a SearchResult.

    Each restart draws its start point from its own spawned random stream
    (SeedSequence(base_seed).spawn) and runs the chosen optimizer: "amoeba",
    "annealing", or "both" (annealing followed by a simplex polish of the
    best point; polishing always runs, since it is cheap and pushes a point
    that merely met the threshold far below it). Restarts run one after
    another; their streams are independent, so the schedule cannot affect
    any number in the result.

    `trace_sinks`, when given, maps restart index -> callable(step, best,
    temperature) and receives every trace row as it is produced.
    """
    if optimizer not in ("amoeba", "annealing", "both"):
        raise ValueError(f"unknown optimizer {optimizer!r}")
    if sampling not in ("haar", "uniform"):
        raise ValueError(f"unknown sampling mode {sampling!r}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    obj = MubObjective(d, m, gauge_fixed=gauge_fixed)
    if nm_cfg is None:
        # no target stop: the polish runs to its spread tolerance, which
        # lands well below any reasonable threshold at negligible cost
        nm_cfg = NelderMeadConfig()
    if sa_cfg is None:
        sa_cfg = AnnealingConfig(target=threshold, max_evals=3_000_000)
    _kernels.warm_up(d, m)  # pay the one-time compile cost outside the timers

    streams = np.random.SeedSequence(base_seed).spawn(restarts)
    summaries = []
    traces = []
    best_x = None
    best_f = math.inf
    best_index = -1
    for k in range(restarts):
        rng = np.random.default_rng(streams[k])
        seed_name = f"{base_seed}:{k}"
        sink = trace_sinks.get(k) if trace_sinks else None
        t_start = time.perf_counter()
        x0 = _initial_vector(obj, rng, sampling)

        if optimizer == "amoeba":
            xk, fk, trace = nelder_mead(obj, x0, nm_cfg, on_sample=sink)
            trace.seed = seed_name
            parts = [trace]
        elif optimizer == "annealing":
            xk, fk, trace = simulated_annealing(obj, x0, sa_cfg, rng,
                                                on_sample=sink)
            trace.seed = seed_name
            parts = [trace]
        else:
            xk, fk, sa_trace = simulated_annealing(obj, x0, sa_cfg, rng,
                                                   on_sample=sink)
            offset = sa_trace.evaluations
            shifted = None
            if sink is not None:
                def shifted(step, bb, tt, _off=offset, _s=sink):
                    _s(step + _off, bb, tt)
            xk, fk, nm_trace = nelder_mead(obj, xk, nm_cfg,
                                           on_sample=shifted)
            parts = [sa_trace, nm_trace]
            trace = _merge_traces(parts, optimizer)
            trace.seed = seed_name

        wall = time.perf_counter() - t_start
        evaluations = sum(p.evaluations for p in parts)
        trace.d, trace.m = d, m
        trace.evaluations = evaluations
        trace.wall_time = wall
        trace.report = residual_report(
            BasisSet.from_angle_vectors(d, m, gauge_fixed, xk))
        traces.append(trace)
        summaries.append(RestartSummary(index=k, seed=seed_name,
                                        final_objective=fk,
                                        evaluations=evaluations,
                                        wall_time=wall,
                                        converged=fk < threshold))
        if fk < best_f:
            best_f = fk
            best_x = xk
            best_index = k

    best_set = BasisSet.from_angle_vectors(d, m, gauge_fixed, best_x)
    return SearchResult(
        d=d, m=m, gauge_fixed=gauge_fixed, optimizer=optimizer,
        threshold=threshold, best_objective=best_f, best_index=best_index,
        best_x=best_x, best_set=best_set, report=residual_report(best_set),
        mu_subset=max_mu_subset(best_set), success_count=sum(
            1 for s in summaries if s.converged),
        restarts=summaries, traces=traces)


def _merge_traces(parts, optimizer):
    """Concatenate phase traces into one, offsetting evaluation counts."""
    samples = []
    offset = 0
    for p in parts:
        samples.extend((s + offset, b, t) for s, b, t in p.samples)
        offset += p.evaluations
    return RunTrace(optimizer=optimizer,
                    config={p.optimizer: p.config for p in parts},
                    samples=samples, final_x=parts[-1].final_x,
                    final_f=parts[-1].final_f, evaluations=offset,
                    wall_time=sum(p.wall_time for p in parts),
                    converged=parts[-1].converged)
