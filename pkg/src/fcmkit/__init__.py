"""fcmkit: build, simulate, learn and probe Fuzzy Cognitive Maps.

The toolkit turns expert linguistic ratings into crisp causal weight
matrices, iterates the resulting maps to equilibrium, adapts them with
Hebbian and genetic learning, and answers what-if questions by simulating
interventions against a settled baseline.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatchError,
    DuplicateNameError,
    EffectivenessOutOfRangeError,
    EmptyEdgeError,
    EmptyPopulationError,
    FcmError,
    IncompletePatternError,
    InvalidConfigError,
    InvalidParamsError,
    InvalidRangeError,
    LengthMismatchError,
    NonPositiveLearningRateError,
    SchemaError,
    UnknownConceptError,
    UnknownDocError,
    UnknownInterventionError,
    UnknownTermError,
    ZeroAreaError,
    ZeroBaselineError,
)
from .fuzzy import (
    LinguisticTermSet,
    Term,
    Universe,
    WeightMatrixBuilder,
    aggregate,
    build_weight_matrix,
    defuzzify,
    generate_memberships,
    implication,
)
from .genetic import (
    RcgaLearner,
    fitness,
    load_state_series,
    validate_ise,
    validate_ose,
)
from .hebbian import (
    AhlLearner,
    LearningOutcome,
    NhlLearner,
    ahl_run,
    nhl_run,
    termination_metrics,
)
from .intervention import InterventionAnalysis, InterventionSpec, ScenarioResults
from .matrix import WeightMatrix, as_weight_matrix
from .simulation import (
    FcmSimulator,
    SimulationConfig,
    SimulationTrace,
    simulate,
    step,
    transfer,
)
from .survey import (
    EdgeRating,
    ExpertSurvey,
    InconsistencyReport,
    check_consistency,
    edge_entropy,
    read_survey,
    write_survey,
)

__all__ = [
    "AhlLearner",
    "EdgeRating",
    "ExpertSurvey",
    "FcmSimulator",
    "FcmError",
    "InconsistencyReport",
    "InterventionAnalysis",
    "InterventionSpec",
    "LearningOutcome",
    "LinguisticTermSet",
    "NhlLearner",
    "RcgaLearner",
    "ScenarioResults",
    "SimulationConfig",
    "SimulationTrace",
    "Term",
    "Universe",
    "WeightMatrix",
    "WeightMatrixBuilder",
    "aggregate",
    "ahl_run",
    "as_weight_matrix",
    "build_weight_matrix",
    "check_consistency",
    "defuzzify",
    "edge_entropy",
    "fitness",
    "generate_memberships",
    "implication",
    "load_state_series",
    "nhl_run",
    "read_survey",
    "simulate",
    "step",
    "termination_metrics",
    "transfer",
    "validate_ise",
    "validate_ose",
    "write_survey",
]
