import numpy as np
import pytest
from scipy import stats

from fcmkit import (
    DimensionMismatchError,
    InvalidConfigError,
    InvalidRangeError,
    RcgaLearner,
    fitness,
    load_state_series,
    simulate,
    validate_ise,
    validate_ose,
)
from fcmkit.genetic import (
    EmptyPopulationError,
    _population_fitness,
    _ssga_replace,
    crossover,
    mutate,
    select,
    select_pair,
)

from conftest import TANK_INITIAL, TANK_WEIGHTS


@pytest.fixture(scope="module")
def tank_data():
    """Three observed state rows generated by the simulator itself."""
    trace = simulate(TANK_INITIAL, TANK_WEIGHTS, thresh=0.001,
                     max_iterations=50, lam=1.0)
    return trace.rows[:3]


class TestFitness:
    def test_true_matrix_scores_one(self, tank_data):
        assert fitness(TANK_WEIGHTS, tank_data) == 1.0

    def test_known_error_maps_through_the_hyperbola(self):
        # observations placed exactly 0.01 off the zero-matrix predictions,
        # so error = 0.01 and fitness = 1 / (100 * 0.01 + 1) = 0.5
        def sigmoid(x):
            return 1.0 / (1.0 + np.exp(-x))

        zero = np.zeros((2, 2))
        row0 = np.array([0.3, 0.6])
        row1 = sigmoid(row0) + 0.01
        row2 = sigmoid(row1) + 0.01
        data = np.vstack([row0, row1, row2])
        assert fitness(zero, data) == pytest.approx(0.5)

    def test_dimension_mismatch(self, tank_data):
        with pytest.raises(DimensionMismatchError):
            fitness(np.zeros((3, 3)), tank_data)

    def test_needs_at_least_two_rows(self):
        with pytest.raises(InvalidConfigError):
            fitness(np.zeros((2, 2)), np.array([[0.1, 0.2]]))

    def test_planted_candidate_dominates_a_random_population(self, tank_data):
        rng = np.random.default_rng(0)
        pop = rng.uniform(-1, 1, (16, 5, 5))
        pop[3] = TANK_WEIGHTS
        fits = _population_fitness(pop, tank_data, 100.0, 1.0, "mkosko",
                                   "sigmoid", 1.0)
        assert fits[3] == 1.0
        assert int(np.argmax(fits)) == 3


class TestSelection:
    def test_single_chromosome_selected_twice(self):
        pop = np.zeros((1, 4))
        rng = np.random.default_rng(1)
        assert select_pair(pop, np.array([0.7]), rng) == (0, 0)

    def test_degenerate_roulette_weights(self):
        pop = np.zeros((4, 4))
        fits = np.array([1.0, 0.0, 0.0, 0.0])
        rng = np.random.default_rng(2)
        picks = {select(pop, fits, rng, strategy="roulette") for _ in range(100)}
        assert picks == {0}

    def test_tournament_is_uniform_under_equal_fitness(self):
        pop = np.zeros((8, 4))
        fits = np.full(8, 0.5)
        rng = np.random.default_rng(3)
        draws = [select(pop, fits, rng, strategy="tournament") for _ in range(10_000)]
        counts = np.bincount(draws, minlength=8)
        assert stats.chisquare(counts).pvalue > 0.01

    def test_empty_population_rejected(self):
        with pytest.raises(EmptyPopulationError):
            select(np.zeros((0, 4)), np.array([]), np.random.default_rng(0))


class TestCrossover:
    def test_skipped_crossover_copies_parents(self):
        rng = np.random.default_rng(4)
        a, b = np.full(9, -0.5), np.full(9, 0.5)
        ca, cb = crossover(a, b, p_recombination=0.0, rng=rng)
        assert np.array_equal(ca, a) and np.array_equal(cb, b)
        ca[0] = 99.0
        assert a[0] == -0.5  # children are copies, not views

    def test_identical_parents_any_cut(self):
        rng = np.random.default_rng(5)
        a = np.linspace(-1, 1, 9)
        for _ in range(50):
            ca, cb = crossover(a, a, p_recombination=1.0, rng=rng)
            assert np.array_equal(ca, a) and np.array_equal(cb, a)

    def test_cut_point_always_swaps_a_proper_tail(self):
        rng = np.random.default_rng(6)
        a, b = np.zeros(9), np.ones(9)
        for _ in range(200):
            ca, cb = crossover(a, b, p_recombination=1.0, rng=rng)
            # never a full swap and never a no-op: both parents contribute
            assert 0 < ca.sum() < 9 and 0 < cb.sum() < 9
            assert np.array_equal(ca + cb, np.ones(9))


class TestMutation:
    def test_zero_probability_is_identity(self):
        rng = np.random.default_rng(7)
        genes = np.linspace(-1, 1, 25)
        assert np.array_equal(mutate(genes, 0.0, 10, 100, rng), genes)

    def test_nonuniform_at_final_generation_is_identity(self):
        rng = np.random.default_rng(8)
        genes = np.linspace(-0.9, 0.9, 25)
        out = mutate(genes, 1.0, 100, 100, rng, operator="nonuniform")
        assert np.allclose(out, genes, atol=1e-15)

    def test_all_outputs_stay_in_gene_bounds(self):
        rng = np.random.default_rng(9)
        for _ in range(400):
            genes = rng.uniform(-1, 1, 25)
            out = mutate(genes, 1.0, rng.integers(0, 100), 100, rng)
            assert np.all(out >= -1.0) and np.all(out <= 1.0)


class TestSsgaReplacement:
    def test_better_offspring_replaces_the_worst(self):
        pop = np.array([[0.0] * 4, [0.5] * 4, [1.0] * 4])
        fits = np.array([0.1, 0.5, 0.9])
        child = np.array([0.25] * 4)
        assert _ssga_replace(pop, fits, child, 0.3)
        assert fits[0] == 0.3 and np.array_equal(pop[0], child)

    def test_weak_and_dull_offspring_is_discarded(self):
        pop = np.array([[0.0] * 4, [0.5] * 4, [1.0] * 4])
        fits = np.array([0.4, 0.5, 0.9])
        child = np.array([0.5] * 4)  # zero diversity gain, below-median fitness
        before = pop.copy()
        assert not _ssga_replace(pop, fits, child, 0.1)
        assert np.array_equal(pop, before)

    def test_diverse_median_offspring_enters(self):
        pop = np.array([[0.5] * 4, [0.52] * 4, [0.54] * 4])
        fits = np.array([0.5, 0.5, 0.5])
        child = np.array([-1.0] * 4)
        assert _ssga_replace(pop, fits, child, 0.5)
        assert any(np.array_equal(row, child) for row in pop)


class TestRun:
    def test_zero_threshold_stops_after_first_generation(self, tank_data):
        learner = RcgaLearner(population_size=10, n_iterations=50, threshold=0.0,
                              seed=0).fit(tank_data)
        assert learner.n_generations_ == 1
        assert learner.solution_.values.shape == (5, 5)
        assert 0.0 < learner.fitness_ <= 1.0

    def test_fixed_seed_is_bit_reproducible(self, tank_data):
        runs = [RcgaLearner(population_size=20, n_iterations=40, threshold=0.99,
                            seed=1234).fit(tank_data) for _ in range(2)]
        assert np.array_equal(runs[0].solution_.values, runs[1].solution_.values)
        assert runs[0].fitness_ == runs[1].fitness_
        assert runs[0].history_ == runs[1].history_

    def test_genes_clamped_after_any_operator_sequence(self, tank_data):
        learner = RcgaLearner(population_size=16, n_iterations=60,
                              threshold=1.0, p_mutation=0.3, seed=5).fit(tank_data)
        assert np.all(learner.solution_.values >= -1.0)
        assert np.all(learner.solution_.values <= 1.0)

    def test_best_fitness_history_is_monotone(self, tank_data):
        learner = RcgaLearner(population_size=16, n_iterations=80,
                              threshold=1.0, seed=6).fit(tank_data)
        hist = np.array(learner.history_)
        assert np.all(np.diff(hist) >= 0.0)

    def test_ssga_improves_over_its_initial_population(self, tank_data):
        learner = RcgaLearner(population_size=30, ga_type="ssga",
                              n_iterations=400, threshold=0.99, seed=7).fit(tank_data)
        assert learner.history_[-1] > learner.history_[0]
        assert np.all(np.diff(np.array(learner.history_)) >= 0.0)

    def test_invalid_config_rejected(self, tank_data):
        with pytest.raises(InvalidConfigError):
            RcgaLearner(ga_type="island").fit(tank_data)
        with pytest.raises(InvalidConfigError):
            RcgaLearner(population_size=0).fit(tank_data)
        with pytest.raises(InvalidConfigError):
            RcgaLearner(p_recombination=1.5).fit(tank_data)

    def test_predict_one_step(self, tank_data):
        learner = RcgaLearner(population_size=10, n_iterations=5, threshold=0.0,
                              seed=8).fit(tank_data)
        pred = learner.predict(tank_data[0])
        manual = 1.0 / (1.0 + np.exp(-(tank_data[0] + tank_data[0] @ learner.solution_.values)))
        assert np.allclose(pred, manual)


class TestValidation:
    def test_true_matrix_has_zero_in_sample_error(self, tank_data):
        ise = validate_ise(tank_data[0], TANK_WEIGHTS, tank_data, lam=1.0)
        assert ise == pytest.approx(0.0, abs=1e-12)

    def test_zero_matrix_on_moving_data_has_positive_error(self, tank_data):
        assert validate_ise(tank_data[0], np.zeros((5, 5)), tank_data) > 0.0

    def test_identical_matrices_have_zero_out_sample_error(self):
        mean, std = validate_ose(TANK_WEIGHTS, TANK_WEIGHTS, k=20, seed=0)
        assert mean == 0.0 and std == 0.0

    def test_single_draw_has_zero_std(self):
        other = TANK_WEIGHTS * 0.5
        mean, std = validate_ose(other, TANK_WEIGHTS, k=1, seed=1)
        assert std == 0.0 and mean > 0.0

    def test_inverted_bounds_rejected(self):
        with pytest.raises(InvalidRangeError):
            validate_ose(TANK_WEIGHTS, TANK_WEIGHTS, k=5, low=1.0, high=0.0)

    def test_load_state_series_drops_step_column(self, tmp_path, tank_data):
        trace = simulate(TANK_INITIAL, TANK_WEIGHTS, thresh=0.001, lam=1.0)
        path = tmp_path / "data.csv"
        trace.to_csv(path)
        concepts, data = load_state_series(path)
        assert concepts == [f"C{i}" for i in range(1, 6)]
        assert np.allclose(data, trace.rows)
