import numpy as np
import pytest

from fcmkit import EdgeRating, ExpertSurvey, WeightMatrix

# 8-concept map used by the simulation and intervention golden tests
EIGHT_CONCEPT_WEIGHTS = np.array([
    [0.0, 0.0, 0.6, 0.9, 0.0, 0.0, 0.0, 0.8],
    [0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.5],
    [0.0, 0.7, 0.0, 0.0, 0.9, 0.0, 0.4, 0.1],
    [0.4, 0.0, 0.0, 0.0, 0.0, 0.9, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, -0.9, 0.0, 0.3],
    [-0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.8, 0.4, 0.9],
    [0.1, 0.0, 0.0, 0.0, 0.0, 0.1, 0.6, 0.0],
])

EIGHT_CONCEPT_INITIAL = {"C1": 1, "C2": 1, "C3": 0, "C4": 0,
                         "C5": 0, "C6": 0, "C7": 0, "C8": 0}

# expected trajectory under mkosko + sigmoid(lam=1), thresh 0.001
EXPECTED_TRACE = np.array([
    [1.000000, 1.000000, 0.000000, 0.000000, 0.000000, 0.000000, 0.000000, 0.000000],
    [0.750260, 0.731059, 0.645656, 0.710950, 0.500000, 0.500000, 0.549834, 0.785835],
    [0.738141, 0.765490, 0.749475, 0.799982, 0.746700, 0.769999, 0.838315, 0.921361],
    [0.730236, 0.784168, 0.767163, 0.812191, 0.805531, 0.829309, 0.898379, 0.950172],
    [0.727059, 0.789378, 0.769467, 0.812967, 0.816974, 0.838759, 0.908173, 0.954927],
    [0.726125, 0.790510, 0.769538, 0.812650, 0.818986, 0.839860, 0.909707, 0.955666],
    [0.725885, 0.790706, 0.769451, 0.812473, 0.819294, 0.839901, 0.909940, 0.955774],
])

# 5-concept tank-control map used by the learning tests
TANK_WEIGHTS = np.array([
    [0.0, -0.4, -0.25, 0.0, 0.3],
    [0.36, 0.0, 0.0, 0.0, 0.0],
    [0.45, 0.0, 0.0, 0.0, 0.0],
    [-0.9, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.6, 0.0, 0.3, 0.0],
])

TANK_INITIAL = {"C1": 0.40, "C2": 0.7077, "C3": 0.612, "C4": 0.717, "C5": 0.30}
TANK_DOC_RANGES = {"C1": (0.68, 0.74), "C5": (0.74, 0.80)}
TANK_ACTIVATION_PATTERN = {0: ["C1"], 1: ["C2", "C3"], 2: ["C5"], 3: ["C4"]}


def make_six_expert_survey() -> ExpertSurvey:
    """Six experts rating four edges; reproduces the reference weight matrix."""
    per_edge_terms = {
        ("C1", "C2"): ["+H", "+H", "+H", "+VH", "+VH", "+M"],
        ("C2", "C1"): ["+M", "+M", "+M", "+H", "+H", "+VH"],
        ("C3", "C1"): ["+M", "+M", "+M", "+M", "+H", "no causality"],
        ("C3", "C4"): ["-VL", "-VL", "-VL", "+VL", "+VL", "+VH"],
    }
    experts = []
    for i in range(6):
        ratings = [EdgeRating(src, tgt, terms[i])
                   for (src, tgt), terms in per_edge_terms.items()]
        experts.append((f"Expert{i}", ratings))
    return ExpertSurvey(experts)


@pytest.fixture
def eight_concept_matrix():
    return WeightMatrix([f"C{i}" for i in range(1, 9)], EIGHT_CONCEPT_WEIGHTS)


@pytest.fixture
def tank_matrix():
    return WeightMatrix([f"C{i}" for i in range(1, 6)], TANK_WEIGHTS)


@pytest.fixture
def six_expert_survey():
    return make_six_expert_survey()
