"""Real-coded genetic search for a causal matrix matching longitudinal data.

A candidate solution is a full N x N matrix flattened row-major into a gene
vector in [-1, 1].  Candidate quality on observed rows C(0..T-1) is

    error   = alpha * sum_t sum_n |C_n(t) - Chat_n(t)|**p
    fitness = 1 / (a * error + 1)

with Chat(t) the one-step prediction from the observed C(t-1) and
alpha = 1 / ((T-1) * N), so the error is a mean per-cell deviation.  All
randomness flows from one seeded generator, making runs reproducible.
"""

from __future__ import annotations

import csv

import numpy as np
from sklearn.base import BaseEstimator

from .errors import (
    DimensionMismatchError,
    EmptyPopulationError,
    InvalidConfigError,
    InvalidRangeError,
)
from .matrix import WeightMatrix, as_weight_matrix
from .simulation import SimulationConfig, simulate, transfer

GA_TYPES = ("generational", "ssga")
SELECTION_STRATEGIES = ("roulette", "tournament")
TOURNAMENT_SIZE = 2
NONUNIFORM_B = 5.0  # degree of dependence on the generation number


def load_state_series(path) -> tuple[list[str], np.ndarray]:
    """Read longitudinal data: CSV header of concept ids, one row per step.

    A leading ``step`` column (as written by the trace serializer) is dropped.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = [c.strip() for c in rows[0]]
    skip = 1 if header and header[0].lower() == "step" else 0
    concepts = header[skip:]
    data = np.array([[float(x) for x in r[skip:]] for r in rows[1:]])
    return concepts, data


def _check_data(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise InvalidConfigError("longitudinal data needs at least two rows")
    return arr


def _one_step(states, genes, inference, kind, lam):
    """Vectorized one-step predictions for a population of candidate matrices.

    states: (T, N); genes: (P, N, N) -> predictions of shape (P, T, N).
    """
    flow = np.einsum("tn,pnm->ptm", states, genes)
    if inference == "kosko":
        raw = flow
    elif inference == "mkosko":
        raw = states[None] + flow
    else:
        centered = 2.0 * states - 1.0
        raw = centered[None] + np.einsum("tn,pnm->ptm", centered, genes)
    return transfer(raw, kind, lam)


def fitness(candidate, data, a=100.0, p=1.0, inference="mkosko",
            transfer="sigmoid", lam=1.0) -> float:
    """Fitness of a single candidate matrix against observed data."""
    data = _check_data(data)
    genes = candidate.values if isinstance(candidate, WeightMatrix) else np.asarray(candidate, float)
    if genes.shape != (data.shape[1], data.shape[1]):
        raise DimensionMismatchError(
            f"candidate of shape {genes.shape} for data with {data.shape[1]} concepts")
    return float(_population_fitness(genes[None], data, a, p, inference, transfer, lam)[0])


def _population_fitness(pop, data, a, p, inference, kind, lam):
    preds = _one_step(data[:-1], pop, inference, kind, lam)
    devs = np.abs(preds - data[1:][None]) ** p
    alpha = 1.0 / ((data.shape[0] - 1) * data.shape[1])
    err = alpha * devs.sum(axis=(1, 2))
    return 1.0 / (a * err + 1.0)


# --- operators -------------------------------------------------------------

def select(population, fits, rng, strategy=None):
    """Pick one parent index; the strategy itself is drawn uniformly when unset."""
    n = len(population)
    if n == 0:
        raise EmptyPopulationError("cannot select from an empty population")
    if strategy is None:
        strategy = SELECTION_STRATEGIES[rng.integers(0, 2)]
    if strategy == "roulette":
        total = float(np.sum(fits))
        if total <= 0:
            return int(rng.integers(0, n))
        return int(rng.choice(n, p=np.asarray(fits) / total))
    if strategy == "tournament":
        contenders = rng.integers(0, n, TOURNAMENT_SIZE)
        return int(contenders[np.argmax(np.asarray(fits)[contenders])])
    raise ValueError(f"unknown selection strategy {strategy!r}")


def select_pair(population, fits, rng):
    return select(population, fits, rng), select(population, fits, rng)


def crossover(a, b, p_recombination, rng):
    """One-point crossover over the flattened genomes; copies when skipped."""
    a = np.asarray(a, float).ravel()
    b = np.asarray(b, float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatchError("parents differ in genome length")
    if rng.random() >= p_recombination or a.size < 2:
        return a.copy(), b.copy()
    cut = int(rng.integers(1, a.size))
    child_a = np.concatenate([a[:cut], b[cut:]])
    child_b = np.concatenate([b[:cut], a[cut:]])
    return child_a, child_b


def _nonuniform_delta(genes, u, direction, generation, g_max, b=NONUNIFORM_B):
    # Michalewicz perturbation shrinking to zero at the final generation
    frac = min(generation / g_max, 1.0) if g_max > 0 else 1.0
    span = np.where(direction, 1.0 - genes, genes + 1.0)
    return span * (1.0 - u ** ((1.0 - frac) ** b))


def mutate(genes, p_mutation, generation, n_generations, rng, b=NONUNIFORM_B,
           operator=None):
    """Per-gene mutation; each event draws the operator uniformly.

    The random operator resamples the gene in [-1, 1]; the non-uniform one
    perturbs it by an amount that decays to zero as ``generation`` approaches
    ``n_generations``.  ``operator`` pins one of ``"random"``/``"nonuniform"``
    instead of drawing per event.  The result is clamped to [-1, 1].
    """
    genes = np.asarray(genes, float).ravel().copy()
    hit = rng.random(genes.shape) < p_mutation
    if operator is None:
        use_random = rng.random(genes.shape) < 0.5
    else:
        use_random = np.full(genes.shape, operator == "random")
    u = rng.random(genes.shape)
    direction = rng.random(genes.shape) < 0.5
    resampled = rng.uniform(-1.0, 1.0, genes.shape)
    delta = _nonuniform_delta(genes, u, direction, generation, n_generations, b)
    perturbed = np.where(direction, genes + delta, genes - delta)
    mutated = np.where(use_random, resampled, perturbed)
    out = np.where(hit, mutated, genes)
    return np.clip(out, -1.0, 1.0)


def _ssga_replace(pop, fits, child, child_fit):
    """Steady-state insertion keeping either fitness or diversity gains.

    The offspring replaces the worst member when it improves on its fitness;
    otherwise it enters only if its fitness is at least the population median
    and it is more diverse (larger mean gene distance to the population) than
    the least diverse member, which it then replaces.
    """
    worst = int(np.argmin(fits))
    if child_fit > fits[worst]:
        pop[worst] = child
        fits[worst] = child_fit
        return True
    if child_fit < float(np.median(fits)):
        return False
    dists = np.abs(pop[:, None, :] - pop[None, :, :]).mean(axis=(1, 2))
    child_dist = float(np.abs(pop - child[None, :]).mean())
    dullest = int(np.argmin(dists))
    if child_dist > dists[dullest]:
        pop[dullest] = child
        fits[dullest] = child_fit
        return True
    return False


# --- search ----------------------------------------------------------------

class RcgaLearner(BaseEstimator):
    """Genetic search over causal matrices, scikit-learn style.

    ``fit(X)`` takes longitudinal state rows (T x N, values in [0, 1]) and
    exposes ``solution_`` (WeightMatrix), ``fitness_``, ``history_`` (best
    fitness per generation) and ``n_generations_``.  ``predict(X)`` returns
    one-step state predictions under the learned matrix.
    """

    def __init__(self, population_size=100, ga_type="generational",
                 n_iterations=30000, threshold=0.99, p_recombination=0.9,
                 p_mutation=None, a=100.0, p=1.0, inference="mkosko",
                 transfer="sigmoid", lam=1.0, seed=None):
        self.population_size = population_size
        self.ga_type = ga_type
        self.n_iterations = n_iterations
        self.threshold = threshold
        self.p_recombination = p_recombination
        self.p_mutation = p_mutation
        self.a = a
        self.p = p
        self.inference = inference
        self.transfer = transfer
        self.lam = lam
        self.seed = seed

    def _validate(self, n_concepts):
        if self.ga_type not in GA_TYPES:
            raise InvalidConfigError(f"ga_type must be one of {GA_TYPES}")
        if self.population_size < 1:
            raise InvalidConfigError("population_size must be positive")
        if not 0.0 <= self.p_recombination <= 1.0:
            raise InvalidConfigError("p_recombination must lie in [0, 1]")
        p_mut = self.p_mutation
        if p_mut is None:
            p_mut = 0.5 / (n_concepts * n_concepts)
        if not 0.0 <= p_mut <= 1.0:
            raise InvalidConfigError("p_mutation must lie in [0, 1]")
        if self.n_iterations < 1:
            raise InvalidConfigError("n_iterations must be positive")
        if not 0.0 <= self.threshold <= 1.0:
            raise InvalidConfigError("threshold must lie in [0, 1]")
        return p_mut

    def fit(self, X, y=None, concepts=None):
        data = _check_data(X)
        n = data.shape[1]
        p_mut = self._validate(n)
        self.concepts_ = list(concepts) if concepts is not None else [
            f"C{i + 1}" for i in range(n)]
        rng = np.random.default_rng(self.seed)
        if self.ga_type == "generational":
            genes, fit, hist, gens = self._run_generational(data, n, p_mut, rng)
        else:
            genes, fit, hist, gens = self._run_ssga(data, n, p_mut, rng)
        self.solution_ = WeightMatrix(self.concepts_, genes.reshape(n, n))
        self.fitness_ = float(fit)
        self.history_ = hist
        self.n_generations_ = gens
        return self

    # vectorized generational loop: selection, crossover and mutation act on
    # (population, genome) arrays, one fitness evaluation per generation
    def _run_generational(self, data, n, p_mut, rng):
        size, g_max = self.population_size, self.n_iterations
        genome = n * n
        pop = rng.uniform(-1.0, 1.0, (size, genome))
        best_genes, best_fit = None, -np.inf
        history = []
        pairs = (size + 1) // 2
        for g in range(g_max):
            fits = _population_fitness(pop.reshape(-1, n, n), data, self.a,
                                       self.p, self.inference, self.transfer,
                                       self.lam)
            top = int(np.argmax(fits))
            if fits[top] > best_fit:
                best_fit, best_genes = float(fits[top]), pop[top].copy()
            history.append(best_fit)
            if best_fit >= self.threshold:
                return best_genes, best_fit, history, g + 1
            # selection (per event, uniformly roulette or tournament)
            n_parents = 2 * pairs
            roulette = rng.choice(size, size=n_parents, p=fits / fits.sum())
            t_a = rng.integers(0, size, n_parents)
            t_b = rng.integers(0, size, n_parents)
            tournament = np.where(fits[t_a] >= fits[t_b], t_a, t_b)
            parents = np.where(rng.random(n_parents) < 0.5, roulette, tournament)
            pa, pb = pop[parents[:pairs]], pop[parents[pairs:]]
            # one-point crossover
            do = rng.random(pairs) < self.p_recombination
            cuts = rng.integers(1, genome, pairs)
            swap = (np.arange(genome)[None, :] >= cuts[:, None]) & do[:, None]
            offspring = np.concatenate(
                [np.where(swap, pb, pa), np.where(swap, pa, pb)])[:size]
            # mutation
            hit = rng.random(offspring.shape) < p_mut
            use_random = rng.random(offspring.shape) < 0.5
            u = rng.random(offspring.shape)
            direction = rng.random(offspring.shape) < 0.5
            resampled = rng.uniform(-1.0, 1.0, offspring.shape)
            delta = _nonuniform_delta(offspring, u, direction, g, g_max)
            perturbed = np.where(direction, offspring + delta, offspring - delta)
            offspring = np.where(hit, np.where(use_random, resampled, perturbed),
                                 offspring)
            pop = np.clip(offspring, -1.0, 1.0)
        return best_genes, best_fit, history, g_max

    def _run_ssga(self, data, n, p_mut, rng):
        size, g_max = self.population_size, self.n_iterations
        pop = rng.uniform(-1.0, 1.0, (size, n * n))
        fits = _population_fitness(pop.reshape(-1, n, n), data, self.a, self.p,
                                   self.inference, self.transfer, self.lam)
        top = int(np.argmax(fits))
        best_genes, best_fit = pop[top].copy(), float(fits[top])
        history = []
        for g in range(g_max):
            history.append(best_fit)
            if best_fit >= self.threshold:
                return best_genes, best_fit, history, g + 1
            ia, ib = select_pair(pop, fits, rng)
            ca, cb = crossover(pop[ia], pop[ib], self.p_recombination, rng)
            for child in (ca, cb):
                child = mutate(child, p_mut, g, g_max, rng)
                child_fit = float(_population_fitness(
                    child.reshape(1, n, n), data, self.a, self.p,
                    self.inference, self.transfer, self.lam)[0])
                if child_fit > best_fit:
                    best_genes, best_fit = child.copy(), child_fit
                _ssga_replace(pop, fits, child, child_fit)
        history.append(best_fit)
        return best_genes, best_fit, history, g_max

    def predict(self, X):
        data = np.asarray(X, dtype=float)
        single = data.ndim == 1
        if single:
            data = data[None, :]
        preds = _one_step(data, self.solution_.values[None],
                          self.inference, self.transfer, self.lam)[0]
        return preds[0] if single else preds


def run(data, concepts=None, **params) -> tuple[WeightMatrix, float, list[float]]:
    """Functional entry point; returns (solution, fitness, history)."""
    learner = RcgaLearner(**params).fit(data, concepts=concepts)
    return learner.solution_, learner.fitness_, learner.history_


# --- validation ------------------------------------------------------------

def validate_ise(initial_state, weights, data, inference="mkosko",
                 transfer="sigmoid", lam=1.0) -> float:
    """In-sample error: free-run the matrix from the first observation and
    report the mean absolute deviation against the remaining rows."""
    data = _check_data(data)
    w = as_weight_matrix(weights)
    if data.shape[1] != w.n:
        raise DimensionMismatchError("data and matrix disagree on concept count")
    steps = data.shape[0] - 1
    cfg = SimulationConfig(inference=inference, transfer=transfer, lam=lam,
                           thresh=1e-12, max_iterations=steps)
    trace = simulate(initial_state, w, cfg)
    sim_rows = trace.rows
    if sim_rows.shape[0] < data.shape[0]:  # converged early: pad with the fixed point
        pad = np.repeat(sim_rows[-1][None], data.shape[0] - sim_rows.shape[0], axis=0)
        sim_rows = np.vstack([sim_rows, pad])
    return float(np.mean(np.abs(sim_rows[1:data.shape[0]] - data[1:])))


def validate_ose(weights, generator, k=100, low=0.0, high=1.0,
                 inference="mkosko", transfer="sigmoid", lam=1.0,
                 seed=None) -> tuple[float, float]:
    """Out-of-sample error: mean and std of one-step prediction gaps between
    a matrix and the generating matrix over k random initial states."""
    if k < 1:
        raise InvalidConfigError("k must be at least 1")
    if not low < high:
        raise InvalidRangeError(f"need low < high, got [{low}, {high}]")
    w = as_weight_matrix(weights)
    gen = as_weight_matrix(generator)
    if w.n != gen.n:
        raise DimensionMismatchError("matrices disagree on concept count")
    rng = np.random.default_rng(seed)
    states = rng.uniform(low, high, (k, w.n))
    pred_w = _one_step(states, w.values[None], inference, transfer, lam)[0]
    pred_g = _one_step(states, gen.values[None], inference, transfer, lam)[0]
    per_draw = np.abs(pred_w - pred_g).mean(axis=1)
    return float(per_draw.mean()), float(per_draw.std())
