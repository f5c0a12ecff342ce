"""Population sampling of Phi, confidence intervals and Welch's t-test."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats

from .errors import InsufficientDataError
from .netmodel import DEFAULT_SEED, sample_tpm
from .system import DEFAULT_MAX_NODES, phi_of_tpm

# Below this sample size intervals use Student's t instead of the normal quantile.
NORMAL_CI_MIN_N = 100


def _mean_sd(values: Sequence[float]):
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
    return mean, math.sqrt(var)


def confidence_interval(values: Sequence[float], level: float = 0.95) -> tuple:
    """Two-sided interval for the mean: normal quantile for n >= 100, else t."""
    values = list(values)
    n = len(values)
    if n < 2:
        raise InsufficientDataError(f"a confidence interval needs at least 2 values, got {n}")
    mean, sd = _mean_sd(values)
    q = 0.5 + level / 2
    crit = stats.norm.ppf(q) if n >= NORMAL_CI_MIN_N else stats.t.ppf(q, n - 1)
    half = crit * sd / math.sqrt(n)
    return (mean - half, mean + half)


@dataclass(frozen=True)
class PopulationStats:
    node_count: int
    sample_size: int
    phi_values: tuple
    infeasible_count: int
    mean: float
    ci95: tuple
    infeasible_rate: float
    mean_with_zeros: float
    ci95_with_zeros: tuple

    @classmethod
    def from_draws(cls, node_count: int, draws: Sequence) -> "PopulationStats":
        """Summarize draws, where infeasible draws are ``None``."""
        feasible = tuple(float(p) for p in draws if p is not None)
        total = len(draws)
        if len(feasible) < 2:
            raise InsufficientDataError(
                f"only {len(feasible)} feasible draws out of {total}; need at least 2")
        zeros = [0.0 if p is None else float(p) for p in draws]
        return cls(
            node_count=node_count,
            sample_size=total,
            phi_values=feasible,
            infeasible_count=total - len(feasible),
            mean=_mean_sd(feasible)[0],
            ci95=confidence_interval(feasible),
            infeasible_rate=(total - len(feasible)) / total,
            mean_with_zeros=_mean_sd(zeros)[0],
            ci95_with_zeros=confidence_interval(zeros),
        )

    def to_json(self) -> dict:
        return {
            "node_count": self.node_count,
            "sample_size": self.sample_size,
            "feasible_count": len(self.phi_values),
            "infeasible_count": self.infeasible_count,
            "infeasible_rate": self.infeasible_rate,
            "mean": self.mean,
            "ci95": list(self.ci95),
            "mean_with_zeros": self.mean_with_zeros,
            "ci95_with_zeros": list(self.ci95_with_zeros),
        }


@dataclass(frozen=True)
class TestReport:
    t_statistic: float
    p_value: float
    dof: float
    group_a: PopulationStats = None
    group_b: PopulationStats = None

    __test__ = False  # keep pytest from collecting this class

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha

    def to_json(self, alphas=(0.05, 0.01)) -> dict:
        groups = [g.to_json() for g in (self.group_a, self.group_b) if g is not None]
        return {
            "groups": groups,
            "t": self.t_statistic,
            "p": self.p_value,
            "dof": self.dof,
            "alpha_decisions": {str(a): self.rejects(a) for a in alphas},
        }


def t_two_sided_p(t: float, dof: float) -> float:
    """Two-sided tail probability of Student's t via the regularized incomplete beta."""
    if math.isinf(t):
        return 0.0
    return float(special.betainc(dof / 2.0, 0.5, dof / (dof + t * t)))


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TestReport:
    """Unequal-variance two-sample t-test with Welch-Satterthwaite degrees of freedom."""
    a, b = list(a), list(b)
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise InsufficientDataError("each group needs at least 2 values")
    ma, sa = _mean_sd(a)
    mb, sb = _mean_sd(b)
    va, vb = sa * sa / na, sb * sb / nb
    se2 = va + vb
    if se2 == 0:
        if ma == mb:
            return TestReport(0.0, 1.0, float(na + nb - 2))
        return TestReport(math.copysign(math.inf, ma - mb), 0.0, float(na + nb - 2))
    t = (ma - mb) / math.sqrt(se2)
    # Welch-Satterthwaite on variance shares, which cannot underflow
    wa, wb = va / se2, vb / se2
    dof = 1.0 / (wa * wa / (na - 1) + wb * wb / (nb - 1))
    return TestReport(t, t_two_sided_p(t, dof), dof)


def _draw_phi(args):
    n, seed, index, mode, max_nodes = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, index)))
    out = phi_of_tpm(sample_tpm(n, rng, mode), max_nodes=max_nodes)
    return None if out is None else out[0]


def sample_population(n: int, size: int, seed: int = DEFAULT_SEED, mode: str = "binary",
                      max_nodes: int = DEFAULT_MAX_NODES, workers: int = 1) -> PopulationStats:
    """Phi of ``size`` uniformly drawn n-node TPMs; draw i uses its own substream."""
    if size < 2:
        raise InsufficientDataError(f"sample size must be at least 2, got {size}")
    jobs = [(n, seed, i, mode, max_nodes) for i in range(size)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            draws = list(pool.map(_draw_phi, jobs))
    else:
        draws = [_draw_phi(job) for job in jobs]
    return PopulationStats.from_draws(n, draws)


def run_inference_experiment(group_a: tuple, group_b: tuple, seed: int = DEFAULT_SEED, **kwargs) -> TestReport:
    """Sample two populations given as (node count, size) and compare their mean Phi."""
    stats_a = sample_population(group_a[0], group_a[1], seed, **kwargs)
    stats_b = sample_population(group_b[0], group_b[1], seed, **kwargs)
    test = welch_t_test(stats_a.phi_values, stats_b.phi_values)
    return TestReport(test.t_statistic, test.p_value, test.dof, stats_a, stats_b)
