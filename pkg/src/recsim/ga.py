"""Real-coded genetic algorithm: convex crossover, uniform mutation, elitism.

Fitness is minimized everywhere. Parents are drawn rank-proportionally
(weight 1/rank^0.6), which gives the selection pressure needed to reach the
benchmark tolerances within 50 generations; the elite carries over unchanged
each generation, which makes the best-fitness history monotone non-increasing
(an invariant the tests rely on).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class GaConfig:
    bounds: tuple[tuple[float, float], ...]
    population_size: int = 100
    crossover_fraction: float = 0.7
    mutation_probability: float = 0.5   # per gene
    max_generations: int = 50
    elitism: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not (0.0 <= self.crossover_fraction <= 1.0):
            raise ValueError("crossover_fraction must be in [0, 1]")
        if not (0.0 <= self.mutation_probability <= 1.0):
            raise ValueError("mutation_probability must be in [0, 1]")
        if self.elitism < 1 or self.elitism >= self.population_size:
            raise ValueError("elitism must be in [1, population_size)")
        for lo, hi in self.bounds:
            if not (lo < hi) or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"bad gene bounds ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.bounds)


@dataclass
class Individual:
    genes: np.ndarray
    fitness: float = math.inf


@dataclass
class EvolveResult:
    best: Individual
    best_history: np.ndarray   # best-so-far fitness per generation
    mean_history: np.ndarray   # population mean fitness per generation
    evaluations: int = 0


def convex_crossover(parent_a: np.ndarray, parent_b: np.ndarray,
                     rng: np.random.Generator,
                     per_gene: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Blend two parents; children stay inside the parents' componentwise hull."""
    r = rng.random(parent_a.shape) if per_gene else rng.random()
    return r * parent_a + (1.0 - r) * parent_b, (1.0 - r) * parent_a + r * parent_b


def uniform_mutation(genes: np.ndarray, mutation_probability: float,
                     lows: np.ndarray, highs: np.ndarray,
                     rng: np.random.Generator) -> np.ndarray:
    """Redraw each gene uniformly within its bounds with the given probability."""
    mask = rng.random(genes.shape) < mutation_probability
    draws = lows + rng.random(genes.shape) * (highs - lows)
    return np.where(mask, draws, genes)


RANK_SELECTION_POWER = 0.6


def _rank_sampler(fitness: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rank-proportional parent distribution: weight 1/rank^power, best first."""
    order = np.argsort(fitness, kind="stable")
    w = 1.0 / np.arange(1, len(fitness) + 1, dtype=float) ** RANK_SELECTION_POWER
    cum = np.cumsum(w)
    cum /= cum[-1]
    return order, cum


def _draw_parent(order: np.ndarray, cum: np.ndarray,
                 rng: np.random.Generator) -> int:
    return int(order[np.searchsorted(cum, rng.random(), side="right")])


def evolve(fitness_fn: Callable[[np.ndarray], float], cfg: GaConfig,
           batch_fitness: Optional[Callable[[np.ndarray], np.ndarray]] = None,
           initial: Optional[Sequence[np.ndarray]] = None) -> EvolveResult:
    """Minimize `fitness_fn` over the box `cfg.bounds`.

    `batch_fitness`, when given, evaluates a (pop, dim) matrix in one call and
    must agree with `fitness_fn`. `initial` injects warm-start genomes into
    the first population (clipped to bounds).
    """
    rng = np.random.default_rng(cfg.seed)
    lows = np.array([b[0] for b in cfg.bounds])
    highs = np.array([b[1] for b in cfg.bounds])
    pop = lows + rng.random((cfg.population_size, cfg.dim)) * (highs - lows)
    if initial:
        for i, genes in enumerate(initial[:cfg.population_size]):
            pop[i] = np.clip(np.asarray(genes, dtype=float), lows, highs)

    def evaluate(p: np.ndarray) -> np.ndarray:
        if batch_fitness is not None:
            return np.asarray(batch_fitness(p), dtype=float)
        return np.array([fitness_fn(ind) for ind in p])

    fitness = evaluate(pop)
    evaluations = len(pop)
    best_idx = int(np.argmin(fitness))
    best = Individual(pop[best_idx].copy(), float(fitness[best_idx]))
    best_history = [best.fitness]
    mean_history = [float(fitness.mean())]

    # Non-elite slots split into crossover children and mutation children;
    # crossover children are left unmutated so the population can refine.
    n_offspring = cfg.population_size - cfg.elitism
    n_cross = round(cfg.crossover_fraction * n_offspring)

    for _ in range(cfg.max_generations):
        order, cum = _rank_sampler(fitness)
        elite_idx = order[:cfg.elitism]
        offspring = np.empty((n_offspring, cfg.dim))
        produced = 0
        while produced < n_cross:
            pa = pop[_draw_parent(order, cum, rng)]
            pb = pop[_draw_parent(order, cum, rng)]
            ca, cb = convex_crossover(pa, pb, rng)
            offspring[produced] = ca
            produced += 1
            if produced < n_cross:
                offspring[produced] = cb
                produced += 1
        if produced < n_offspring:
            clones = np.stack([pop[_draw_parent(order, cum, rng)]
                               for _ in range(n_offspring - produced)])
            offspring[produced:] = uniform_mutation(
                clones, cfg.mutation_probability, lows, highs, rng)
        pop = np.vstack([pop[elite_idx], offspring])
        child_fitness = evaluate(offspring)
        evaluations += len(offspring)
        fitness = np.concatenate([fitness[elite_idx], child_fitness])
        gen_best = int(np.argmin(fitness))
        if fitness[gen_best] < best.fitness:
            best = Individual(pop[gen_best].copy(), float(fitness[gen_best]))
        best_history.append(best.fitness)
        mean_history.append(float(fitness.mean()))

    return EvolveResult(best, np.array(best_history), np.array(mean_history),
                        evaluations)


# Benchmark objective suite (2-D by default) used to validate the GA standalone.

@dataclass(frozen=True)
class BenchmarkProblem:
    name: str
    fn: Callable[[np.ndarray], float]
    domain: tuple[float, float]
    optimum: tuple[float, ...]   # location of the global minimum, value 0
    dim: int = 2

    def bounds(self) -> tuple[tuple[float, float], ...]:
        return tuple(self.domain for _ in range(self.dim))


def _sphere(x: np.ndarray) -> float:
    return float(np.sum(x * x))


def _rastrigin(x: np.ndarray) -> float:
    return float(10.0 * len(x) + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def _rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def _schwefel(x: np.ndarray) -> float:
    # Shifted form: value 0 at x_i = 420.9687...
    return float(418.982887272433 * len(x) - np.sum(x * np.sin(np.sqrt(np.abs(x)))))


def _griewank(x: np.ndarray) -> float:
    idx = np.arange(1, len(x) + 1, dtype=float)
    return float(1.0 + np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(idx))))


def benchmark_suite(name: str, dim: int = 2) -> BenchmarkProblem:
    problems = {
        "sphere": (_sphere, (-5.12, 5.12), 0.0),
        "rastrigin": (_rastrigin, (-5.12, 5.12), 0.0),
        "rosenbrock": (_rosenbrock, (-2.048, 2.048), 1.0),
        "schwefel": (_schwefel, (-500.0, 500.0), 420.9687487856824),
        "griewank": (_griewank, (-600.0, 600.0), 0.0),
    }
    if name not in problems:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(problems)}")
    fn, domain, opt = problems[name]
    return BenchmarkProblem(name, fn, domain, tuple(opt for _ in range(dim)), dim)


BENCHMARK_NAMES = ("sphere", "rastrigin", "rosenbrock", "schwefel", "griewank")
