"""Discrete-time FCM state propagation to a fixed point.

State vectors are updated synchronously from a snapshot, so the result never
depends on concept order.  A run stops when every output concept changes by
less than the threshold between consecutive steps, or at the iteration cap.
Non-convergence is an outcome, not an error.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .checks import check_state_vector
from .errors import DimensionMismatchError, UnknownConceptError
from .matrix import WeightMatrix, as_weight_matrix

INFERENCE_METHODS = ("kosko", "mkosko", "rescaled")
TRANSFER_METHODS = ("sigmoid", "tanh", "bivalent", "trivalent")


def transfer(x, kind: str = "sigmoid", lam: float = 1.0):
    """Squashing function applied to raw activation sums.

    sigmoid keeps values in (0, 1) with steepness ``lam``; tanh in (-1, 1);
    bivalent maps to {0, 1} and trivalent to {-1, 0, 1}.
    """
    x = np.asarray(x, dtype=float)
    if kind == "sigmoid":
        if lam <= 0:
            raise ValueError("sigmoid steepness lam must be positive")
        out = 1.0 / (1.0 + np.exp(-lam * x))
    elif kind == "tanh":
        out = np.tanh(x)
    elif kind == "bivalent":
        out = np.where(x > 0, 1.0, 0.0)
    elif kind == "trivalent":
        out = np.sign(x)
    else:
        raise ValueError(f"unknown transfer function {kind!r}")
    return out if out.ndim else float(out)


@dataclass
class SimulationConfig:
    inference: str = "mkosko"
    transfer: str = "sigmoid"
    lam: float = 1.0
    thresh: float = 0.001
    max_iterations: int = 50
    output_concepts: list[str] | None = None

    def __post_init__(self):
        if self.inference not in INFERENCE_METHODS:
            raise ValueError(f"inference must be one of {INFERENCE_METHODS}")
        if self.transfer not in TRANSFER_METHODS:
            raise ValueError(f"transfer must be one of {TRANSFER_METHODS}")
        if self.transfer == "sigmoid" and self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.thresh <= 0:
            raise ValueError("thresh must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass
class SimulationTrace:
    """Time-indexed state rows; row 0 is the initial state.

    ``converged_at`` is the 1-based index of the first row whose distance to
    its predecessor is below the threshold, or None when the iteration cap
    was reached first.
    """

    concepts: list[str]
    rows: np.ndarray = field(repr=False)
    converged_at: int | None
    thresh: float

    @property
    def final_state(self) -> np.ndarray:
        return self.rows[-1]

    def final_state_dict(self) -> dict[str, float]:
        return {c: float(v) for c, v in zip(self.concepts, self.rows[-1])}

    def message(self) -> str:
        if self.converged_at is not None:
            return f"The values converged in the {self.converged_at} state (e <= {self.thresh})"
        return f"The values did not converge within {len(self.rows) - 1} steps (e <= {self.thresh})"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step"] + self.concepts)
            for i, row in enumerate(self.rows):
                writer.writerow([i] + [repr(float(v)) for v in row])

    def to_json_dict(self) -> dict:
        return {
            "concepts": list(self.concepts),
            "rows": self.rows.tolist(),
            "converged_at": self.converged_at,
            "thresh": self.thresh,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def step(state, matrix, cfg: SimulationConfig | None = None, **overrides) -> np.ndarray:
    """One synchronous update of all concepts.

    kosko feeds each concept the weighted sum of its sources; mkosko adds the
    concept's own previous value; rescaled recenters values around zero
    before propagation.
    """
    cfg = _resolve_config(cfg, overrides)
    matrix = as_weight_matrix(matrix)
    a = check_state_vector(state, matrix.concepts)
    if a.shape[0] != matrix.n:
        raise DimensionMismatchError("state length does not match the matrix")
    if cfg.inference == "kosko":
        raw = a @ matrix.values
    elif cfg.inference == "mkosko":
        raw = a + a @ matrix.values
    else:  # rescaled
        centered = 2.0 * a - 1.0
        raw = centered + centered @ matrix.values
    return transfer(raw, cfg.transfer, cfg.lam)


def simulate(initial_state, matrix, cfg: SimulationConfig | None = None,
             **overrides) -> SimulationTrace:
    """Iterate ``step`` until the output concepts settle or the cap is hit."""
    cfg = _resolve_config(cfg, overrides)
    matrix = as_weight_matrix(matrix)
    a = check_state_vector(initial_state, matrix.concepts)
    if cfg.output_concepts is None:
        watch = np.arange(matrix.n)
    else:
        for c in cfg.output_concepts:
            if c not in matrix.concepts:
                raise UnknownConceptError(c)
        watch = np.array([matrix.index(c) for c in cfg.output_concepts])

    rows = [a]
    converged_at = None
    for _ in range(cfg.max_iterations):
        new = step(rows[-1], matrix, cfg)
        rows.append(new)
        if np.max(np.abs(new[watch] - rows[-2][watch])) < cfg.thresh:
            converged_at = len(rows)  # 1-based index of the newly added row
            break
    return SimulationTrace(list(matrix.concepts), np.array(rows), converged_at, cfg.thresh)


def _resolve_config(cfg, overrides) -> SimulationConfig:
    if cfg is None:
        return SimulationConfig(**overrides)
    if overrides:
        merged = {**cfg.__dict__, **overrides}
        return SimulationConfig(**merged)
    return cfg


class FcmSimulator:
    """Convenience wrapper holding default simulation settings.

    Holds no mutable state between calls; ``simulate`` is reentrant.
    """

    def __init__(self, inference="mkosko", transfer="sigmoid", lam=1.0,
                 thresh=0.001, max_iterations=50, output_concepts=None):
        self.config = SimulationConfig(
            inference=inference, transfer=transfer, lam=lam, thresh=thresh,
            max_iterations=max_iterations, output_concepts=output_concepts)

    def simulate(self, initial_state, weight_matrix, verbose: bool = False,
                 **overrides) -> SimulationTrace:
        trace = simulate(initial_state, weight_matrix, self.config, **overrides)
        if verbose:
            print(trace.message())
        return trace


def equilibrium(matrix: WeightMatrix, initial_state, cfg: SimulationConfig | None = None,
                **overrides) -> np.ndarray:
    """Final state of a simulation run (converged or capped)."""
    return simulate(initial_state, matrix, cfg, **overrides).final_state
