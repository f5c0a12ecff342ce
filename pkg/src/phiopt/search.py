"""Search for high-Phi TPMs: prior-guided random search and two baselines.

The prior-guided method samples a node count from a multinomial prior, draws
a TPM of that size uniformly, evaluates Phi, and after every batch reweights
the prior toward node counts that produced the best values.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetError
from .netmodel import DEFAULT_SEED, SystemState, Tpm, derive_cm, grid_tpm, sample_tpm
from .system import DEFAULT_MAX_NODES, phi_of_tpm

KAPPA = 0.02
MIN_FACTOR = 0.01


@dataclass(frozen=True)
class DimensionPrior:
    theta: tuple
    d_min: int

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        object.__setattr__(self, "theta", theta)
        if not theta or min(theta) < 0 or abs(sum(theta) - 1.0) > 1e-9:
            raise ValueError(f"prior {theta} is not a probability vector")

    @property
    def dims(self) -> tuple:
        return tuple(range(self.d_min, self.d_min + len(self.theta)))

    @classmethod
    def uniform(cls, d_min: int, d_max: int) -> "DimensionPrior":
        k = d_max - d_min + 1
        return cls((1.0 / k,) * k, d_min)


@dataclass(frozen=True)
class SearchConfig:
    d_min: int
    d_max: int
    total_iters: int
    batch_size: int = 5
    learning_rate: float = 0.1
    smoothing: float = KAPPA
    initial_prior: Optional[Sequence[float]] = None
    seed: int = DEFAULT_SEED
    mode: str = "binary"
    max_nodes: int = DEFAULT_MAX_NODES

    def __post_init__(self):
        if not 1 <= self.d_min <= self.d_max:
            raise ValueError(f"need 1 <= d_min <= d_max, got {self.d_min}..{self.d_max}")
        if self.total_iters < 1 or self.batch_size < 1:
            raise ValueError("total_iters and batch_size must be positive")
        if self.batch_size > self.total_iters:
            raise ValueError("batch_size cannot exceed total_iters")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.initial_prior is not None:
            prior = tuple(float(p) for p in self.initial_prior)
            if len(prior) != self.d_max - self.d_min + 1:
                raise ValueError(
                    f"prior has {len(prior)} entries for {self.d_max - self.d_min + 1} dimensions")
            if min(prior) < 0 or abs(sum(prior) - 1.0) > 1e-12:
                raise ValueError("prior entries must be nonnegative and sum to 1")
            object.__setattr__(self, "initial_prior", prior)

    def prior(self) -> DimensionPrior:
        if self.initial_prior is None:
            return DimensionPrior.uniform(self.d_min, self.d_max)
        return DimensionPrior(self.initial_prior, self.d_min)


@dataclass(frozen=True)
class EvalRecord:
    iteration: int
    dimension: int
    feasible: bool
    phi: Optional[float]
    elapsed: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {"iteration": self.iteration, "dimension": self.dimension,
                "feasible": self.feasible, "phi": self.phi}


@dataclass(eq=False)
class SearchResult:
    method: str
    best_phi: float
    best_tpm: Optional[Tpm]
    best_state: Optional[SystemState]
    trajectory: list
    prior_history: list

    def best_so_far(self) -> list:
        out, best = [], 0.0
        for rec in self.trajectory:
            if rec.feasible and rec.phi > best:
                best = rec.phi
            out.append(best)
        return out

    def __eq__(self, other):
        if not isinstance(other, SearchResult):
            return NotImplemented
        return (self.method == other.method and self.best_phi == other.best_phi
                and self.best_tpm == other.best_tpm and self.best_state == other.best_state
                and self.trajectory == other.trajectory
                and self.prior_history == other.prior_history)


def sample_dimension(prior: DimensionPrior, rng: np.random.Generator) -> int:
    return int(prior.dims[rng.choice(len(prior.theta), p=prior.theta)])


def rank_likelihood(batch: Sequence[EvalRecord], mu: float, dims: Sequence[int]) -> dict:
    """Per-dimension factors ``1 + 0.2 * mu * r`` from a batch of evaluations.

    Sampled dimensions are ranked by their best feasible Phi (dimensions with
    only infeasible draws rank lowest) and given ranks ``r`` evenly spaced on
    [-1, 1], best at +1; tied dimensions share the mean of their ranks. A
    single sampled dimension gets r = 1.  Unsampled dimensions keep factor 1.
    """
    best = {}
    for rec in batch:
        score = rec.phi if rec.feasible else -np.inf
        best[rec.dimension] = max(best.get(rec.dimension, -np.inf), score)
    factors = {d: 1.0 for d in dims}
    if not best:
        return factors
    order = sorted(best, key=lambda d: (best[d], d))
    ranks = np.linspace(-1.0, 1.0, len(order)) if len(order) > 1 else np.array([1.0])
    for d in order:
        tied = [r for o, r in zip(order, ranks) if best[o] == best[d]]
        factors[d] = max(MIN_FACTOR, 1.0 + 0.2 * mu * float(np.mean(tied)))
    return factors


def update_prior(prior: DimensionPrior, mu: float, kappa: float,
                 batch: Sequence[EvalRecord]) -> DimensionPrior:
    """Multiply by the batch likelihood, normalize, clamp to [kappa, 1-kappa], renormalize."""
    factors = rank_likelihood(batch, mu, prior.dims)
    theta = np.array(prior.theta) * np.array([factors[d] for d in prior.dims])
    theta /= theta.sum()
    theta = np.clip(theta, kappa, 1.0 - kappa)
    theta /= theta.sum()
    return DimensionPrior(tuple(theta), prior.d_min)


def _streams(seed: int, iteration: int):
    """Independent dimension and TPM streams for one iteration."""
    base = np.random.SeedSequence(seed, spawn_key=(iteration,))
    dim_seq, tpm_seq = base.spawn(2)
    return np.random.default_rng(dim_seq), np.random.default_rng(tpm_seq)


def _evaluate(args):
    tpm, max_nodes = args
    start = time.perf_counter()
    out = phi_of_tpm(tpm, max_nodes=max_nodes)
    return out, time.perf_counter() - start


class _Runner:
    """Evaluates candidate batches in order, optionally in worker processes."""

    def __init__(self, method: str, config: SearchConfig, workers: int = 1):
        if config.d_max > config.max_nodes:
            raise BudgetError(f"d_max={config.d_max} exceeds the guardrail of {config.max_nodes}")
        self.method = method
        self.config = config
        self.pool = ProcessPoolExecutor(workers) if workers and workers > 1 else None
        self.trajectory = []
        self.best = (0.0, None, None)

    def run_batch(self, candidates) -> list:
        jobs = [(tpm, self.config.max_nodes) for _, tpm in candidates]
        results = self.pool.map(_evaluate, jobs) if self.pool else map(_evaluate, jobs)
        batch = []
        for (dim, tpm), (out, elapsed) in zip(candidates, results):
            feasible = out is not None
            phi = float(out[0]) if feasible else None
            rec = EvalRecord(len(self.trajectory), dim, feasible, phi, elapsed)
            if feasible and (self.best[1] is None or phi > self.best[0]):
                self.best = (phi, tpm, out[1])
            self.trajectory.append(rec)
            batch.append(rec)
        return batch

    def result(self, history) -> SearchResult:
        if self.pool:
            self.pool.shutdown()
        return SearchResult(self.method, self.best[0], self.best[1], self.best[2],
                            self.trajectory, history)


def prior_guided_search(config: SearchConfig, workers: int = 1) -> SearchResult:
    prior = config.prior()
    history = [prior]
    runner = _Runner("prior", config, workers)
    for start in range(0, config.total_iters, config.batch_size):
        candidates = []
        for i in range(start, min(start + config.batch_size, config.total_iters)):
            dim_rng, tpm_rng = _streams(config.seed, i)
            dim = sample_dimension(prior, dim_rng)
            candidates.append((dim, sample_tpm(dim, tpm_rng, config.mode)))
        batch = runner.run_batch(candidates)
        prior = update_prior(prior, config.learning_rate, config.smoothing, batch)
        history.append(prior)
    return runner.result(history)


def random_search(config: SearchConfig, workers: int = 1) -> SearchResult:
    """Uniform node count and uniform TPM at every iteration."""
    prior = DimensionPrior.uniform(config.d_min, config.d_max)
    runner = _Runner("random", config, workers)
    for start in range(0, config.total_iters, config.batch_size):
        candidates = []
        for i in range(start, min(start + config.batch_size, config.total_iters)):
            dim_rng, tpm_rng = _streams(config.seed, i)
            dim = sample_dimension(prior, dim_rng)
            candidates.append((dim, sample_tpm(dim, tpm_rng, config.mode)))
        runner.run_batch(candidates)
    return runner.result([prior])


def grid_search(config: SearchConfig, workers: int = 1) -> SearchResult:
    """Evenly spaced binary TPMs, node counts visited round-robin; ignores the seed."""
    dims = list(range(config.d_min, config.d_max + 1))
    total = config.total_iters
    per_dim = {d: len(range(j, total, len(dims))) for j, d in enumerate(dims)}
    plan = [(dims[i % len(dims)], i // len(dims)) for i in range(total)]
    runner = _Runner("grid", config, workers)
    for start in range(0, total, config.batch_size):
        candidates = [(d, grid_tpm(d, k, per_dim[d])) for d, k in plan[start:start + config.batch_size]]
        runner.run_batch(candidates)
    return runner.result([])


METHODS = {"prior": prior_guided_search, "random": random_search, "grid": grid_search}


def best_artifacts(result: SearchResult) -> dict:
    """JSON-ready TPM, connectivity matrix and state of the best network."""
    if result.best_tpm is None:
        return {"tpm": None, "cm": None, "state": None}
    tpm = result.best_tpm
    return {
        "tpm": tpm.to_json(),
        "cm": {"nodes": tpm.node_count, "cm": derive_cm(tpm).astype(int).tolist()},
        "state": list(result.best_state),
    }
