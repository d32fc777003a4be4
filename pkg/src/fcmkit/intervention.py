"""What-if scenario analysis on a settled FCM.

A baseline run establishes the equilibrium every scenario starts from.
Single-shot interventions override chosen concept values once and let the
system settle again.  Continuous interventions extend the map with one extra
node, clamped to 1 at every step, whose outgoing weights (scaled by an
effectiveness factor) keep pressing on the target concepts.  Reported
equilibria and comparisons never include the clamp node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .checks import check_state_vector, check_unit_interval
from .errors import (
    DuplicateNameError,
    EffectivenessOutOfRangeError,
    UnknownConceptError,
    UnknownInterventionError,
    ZeroBaselineError,
)
from .matrix import WeightMatrix, as_weight_matrix
from .simulation import SimulationConfig, SimulationTrace, simulate, transfer

INTERVENTION_KINDS = ("single_shot", "continuous")

BASELINE = "baseline"


@dataclass(frozen=True)
class InterventionSpec:
    name: str
    kind: str
    state_overrides: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)
    effectiveness: float = 1.0

    def __post_init__(self):
        if self.kind not in INTERVENTION_KINDS:
            raise ValueError(f"kind must be one of {INTERVENTION_KINDS}")
        try:
            check_unit_interval(self.effectiveness, "effectiveness")
        except ValueError as exc:
            raise EffectivenessOutOfRangeError(str(exc)) from exc


@dataclass
class ScenarioResults:
    traces: dict[str, SimulationTrace]
    equilibriums: dict[str, dict[str, float]]
    comparison: dict[str, dict[str, float]]


class InterventionAnalysis:
    """Registry and runner for named intervention scenarios."""

    def __init__(self):
        self._matrix: WeightMatrix | None = None
        self._cfg: SimulationConfig | None = None
        self._specs: dict[str, InterventionSpec] = {}
        self._traces: dict[str, SimulationTrace] = {}
        self._equilibria: dict[str, np.ndarray] = {}

    # --- baseline ---------------------------------------------------------

    def initialize(self, initial_state, weight_matrix,
                   cfg: SimulationConfig | None = None, verbose: bool = False,
                   **overrides) -> SimulationTrace:
        """Run the baseline simulation and store its final state."""
        self._matrix = as_weight_matrix(weight_matrix)
        if cfg is None:
            cfg = SimulationConfig(**overrides)
        elif overrides:
            cfg = SimulationConfig(**{**cfg.__dict__, **overrides})
        self._cfg = cfg
        trace = simulate(initial_state, self._matrix, cfg)
        self._traces = {BASELINE: trace}
        self._equilibria = {BASELINE: trace.final_state.copy()}
        self._specs = {}
        if verbose:
            print(trace.message())
        return trace

    def _require_baseline(self):
        if self._matrix is None:
            raise RuntimeError("initialize() must be called before this operation")

    @property
    def concepts(self) -> list[str]:
        self._require_baseline()
        return list(self._matrix.concepts)

    @property
    def baseline_equilibrium(self) -> dict[str, float]:
        self._require_baseline()
        return {c: float(v) for c, v in
                zip(self._matrix.concepts, self._equilibria[BASELINE])}

    # --- registration -----------------------------------------------------

    def add_intervention(self, spec_or_name, kind=None, state_overrides=None,
                         weights=None, effectiveness=1.0) -> InterventionSpec:
        """Register a scenario, either from a spec or from keyword parts."""
        self._require_baseline()
        if isinstance(spec_or_name, InterventionSpec):
            spec = spec_or_name
        else:
            spec = InterventionSpec(
                name=str(spec_or_name), kind=kind,
                state_overrides=dict(state_overrides or {}),
                weights=dict(weights or {}),
                effectiveness=effectiveness)
        if spec.name in self._specs or spec.name == BASELINE:
            raise DuplicateNameError(spec.name)
        targets = spec.weights if spec.kind == "continuous" else spec.state_overrides
        for concept in targets:
            if concept not in self._matrix.concepts:
                raise UnknownConceptError(concept)
        self._specs[spec.name] = spec
        return spec

    # --- execution ----------------------------------------------------

    def test_intervention(self, name: str, iterations: int | None = None,
                          verbose: bool = False) -> SimulationTrace:
        """Simulate a registered scenario from the baseline equilibrium."""
        self._require_baseline()
        spec = self._specs.get(name)
        if spec is None:
            raise UnknownInterventionError(name)
        cfg = self._cfg
        if iterations is not None:
            cfg = SimulationConfig(**{**cfg.__dict__, "max_iterations": iterations})
        base_eq = self._equilibria[BASELINE]

        if spec.kind == "single_shot":
            start = base_eq.copy()
            for concept, value in spec.state_overrides.items():
                start[self._matrix.index(concept)] = float(value)
            trace = simulate(start, self._matrix, cfg)
            self._traces[name] = trace
            self._equilibria[name] = trace.final_state.copy()
        else:
            extended, node = self._extended_matrix(spec)
            start = np.append(base_eq, 1.0)
            trace = self._simulate_clamped(start, extended, node, cfg)
            self._traces[name] = trace
            self._equilibria[name] = trace.final_state[:-1].copy()
        if verbose:
            print(trace.message())
        return trace

    def _extended_matrix(self, spec: InterventionSpec) -> tuple[WeightMatrix, int]:
        n = self._matrix.n
        values = np.zeros((n + 1, n + 1))
        values[:n, :n] = self._matrix.values
        for concept, weight in spec.weights.items():
            values[n, self._matrix.index(concept)] = float(weight) * spec.effectiveness
        return WeightMatrix(self._matrix.concepts + [spec.name], values), n

    def _simulate_clamped(self, start, extended, node, cfg) -> SimulationTrace:
        # the intervention node is pinned to 1 after every transfer, so its
        # pressure on the targets never decays
        watch = [i for i in range(extended.n) if i != node]
        rows = [np.asarray(start, float)]
        converged_at = None
        for _ in range(cfg.max_iterations):
            prev = rows[-1]
            if cfg.inference == "kosko":
                raw = prev @ extended.values
            elif cfg.inference == "mkosko":
                raw = prev + prev @ extended.values
            else:
                centered = 2.0 * prev - 1.0
                raw = centered + centered @ extended.values
            new = transfer(raw, cfg.transfer, cfg.lam)
            new[node] = 1.0
            rows.append(new)
            if np.max(np.abs(new[watch] - prev[watch])) < cfg.thresh:
                converged_at = len(rows)
                break
        return SimulationTrace(list(extended.concepts), np.array(rows),
                               converged_at, cfg.thresh)

    def test_all(self) -> None:
        for name in self._specs:
            if name not in self._traces:
                self.test_intervention(name)

    # --- reporting ----------------------------------------------------

    @property
    def equilibriums(self) -> dict[str, dict[str, float]]:
        self._require_baseline()
        return {
            name: {c: float(v) for c, v in zip(self._matrix.concepts, eq)}
            for name, eq in self._equilibria.items()
        }

    def comparison_table(self) -> dict[str, dict[str, float]]:
        """Percent change of each tested scenario's equilibrium vs baseline."""
        self._require_baseline()
        base = self._equilibria[BASELINE]
        if np.any(base == 0.0):
            zero_at = self._matrix.concepts[int(np.where(base == 0.0)[0][0])]
            raise ZeroBaselineError(
                f"baseline equilibrium is zero for {zero_at!r}")
        table = {}
        for name, eq in self._equilibria.items():
            pct = 100.0 * (eq - base) / base
            table[name] = {c: float(v) for c, v in zip(self._matrix.concepts, pct)}
        return table

    def results(self) -> ScenarioResults:
        return ScenarioResults(
            traces=dict(self._traces),
            equilibriums=self.equilibriums,
            comparison=self.comparison_table(),
        )
