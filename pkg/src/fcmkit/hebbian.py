"""Hebbian weight adaptation driving chosen concepts into target ranges.

Two learners share the termination logic.  The synchronous learner updates
every nonzero edge and every concept each step, never creates an edge and
never flips an edge's original sign.  The asynchronous learner walks an
activation pattern, updating only the activated concepts and their incoming
edges, and may grow connections the initial map did not have.

Per update step, an edge j -> i with source activation ``A_j`` and target
activation ``A_i`` moves by

    dw = eta * A_i * (A_j - s * w * A_i)

where ``s`` is the edge's reference sign.  The synchronous learner applies a
retention factor ``decay`` close to 1 (``w <- decay * w + dw``); the
asynchronous one forgets at a small rate (``w <- (1 - decay) * w + dw``).
Setting ``learning_rate`` to zero disables weight updates entirely, reducing
both learners to a plain simulation.

Step indices are 0-based: ``converged_at = k`` means the criteria held after
the (k+1)-th update.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .checks import check_state_vector
from .errors import (
    IncompletePatternError,
    NonPositiveLearningRateError,
    UnknownDocError,
)
from .matrix import WeightMatrix, as_weight_matrix
from .simulation import transfer

#: termination requires the distance-to-target to be non-increasing over
#: this many trailing steps (tolerates floating-point jitter)
DECLINE_WINDOW = 5


@dataclass
class LearningOutcome:
    weights: WeightMatrix
    converged_at: int | None
    final_state: dict[str, float]
    termination: str  # "both_conditions_met" | "max_iterations"
    doc_trace: dict[str, list[float]]

    def to_json_dict(self) -> dict:
        return {
            "weights": self.weights.to_json_dict(),
            "converged_at": self.converged_at,
            "termination": self.termination,
            "final_state": self.final_state,
            "doc_trace": self.doc_trace,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def termination_metrics(doc_trace: dict[str, list[float]],
                        doc_ranges: dict[str, tuple[float, float]],
                        thresh: float) -> tuple[dict[str, list[float]], bool]:
    """Distance-to-midpoint series per output concept, plus stability flag.

    The first series (F1) is ``|value - midpoint|`` of the target range; the
    stability condition (F2) holds when the last step moved every output
    concept by less than ``thresh``.
    """
    f1 = {}
    for doc, series in doc_trace.items():
        lo, hi = doc_ranges[doc]
        mid = (lo + hi) / 2.0
        f1[doc] = [abs(v - mid) for v in series]
    f2 = all(
        len(series) >= 2 and abs(series[-1] - series[-2]) < thresh
        for series in doc_trace.values()
    )
    return f1, f2


def _resolve_docs(doc_ranges, concepts):
    if not doc_ranges:
        raise ValueError("doc_ranges must name at least one output concept")
    resolved = {}
    for doc, (lo, hi) in doc_ranges.items():
        if doc not in concepts:
            raise UnknownDocError(doc)
        if not lo < hi:
            raise ValueError(f"doc range for {doc!r} needs min < max")
        resolved[doc] = (float(lo), float(hi))
    return resolved


class _DocTracker:
    """Records output-concept trajectories and evaluates the stop criteria."""

    def __init__(self, docs, concepts, thresh):
        self.docs = docs
        self.idx = {doc: concepts.index(doc) for doc in docs}
        self.thresh = thresh
        self.trace = {doc: [] for doc in docs}

    def record(self, state: np.ndarray) -> None:
        for doc, i in self.idx.items():
            self.trace[doc].append(float(state[i]))

    def satisfied(self) -> bool:
        f1, f2 = termination_metrics(self.trace, self.docs, self.thresh)
        if not f2:
            return False
        for doc, (lo, hi) in self.docs.items():
            if not lo <= self.trace[doc][-1] <= hi:
                return False
            tail = f1[doc][-DECLINE_WINDOW:]
            if any(tail[t + 1] > tail[t] + 1e-12 for t in range(len(tail) - 1)):
                return False
        return True


def _check_rate(learning_rate):
    if learning_rate < 0:
        raise NonPositiveLearningRateError(
            f"learning rate must be >= 0, got {learning_rate}")
    return float(learning_rate)


def nhl_run(initial_state, weights, doc_ranges, *, learning_rate=0.01, decay=1.0,
            lam=1.0, thresh=0.002, max_iterations=100) -> LearningOutcome:
    """Synchronous Hebbian optimization of an existing causal map.

    Only edges nonzero in the initial matrix are adapted; an update that
    would flip an edge's original sign clamps the weight to zero instead.
    """
    eta = _check_rate(learning_rate)
    w0 = as_weight_matrix(weights)
    concepts = list(w0.concepts)
    docs = _resolve_docs(doc_ranges, concepts)
    a = check_state_vector(initial_state, concepts)

    W = w0.values.copy()
    mask = w0.values != 0.0
    sgn = np.sign(w0.values)
    tracker = _DocTracker(docs, concepts, thresh)
    tracker.record(a)

    converged_at = None
    for k in range(max_iterations):
        if eta > 0.0:
            # dW[j, i] = eta * A_i * (A_j - sgn * w * A_i)
            dW = eta * (np.outer(a, a) - sgn * W * (a ** 2)[None, :])
            W_new = decay * W + dW
            W_new[~mask] = 0.0
            W_new[mask & (np.sign(W_new) != sgn) & (W_new != 0.0)] = 0.0
            W = W_new
        a = transfer(a + a @ W, "sigmoid", lam)
        tracker.record(a)
        if tracker.satisfied():
            converged_at = k
            break

    termination = "both_conditions_met" if converged_at is not None else "max_iterations"
    return LearningOutcome(
        weights=WeightMatrix(concepts, W),
        converged_at=converged_at,
        final_state={c: float(v) for c, v in zip(concepts, a)},
        termination=termination,
        doc_trace=tracker.trace,
    )


def _resolve_pattern(activation_pattern, concepts):
    if not activation_pattern:
        raise IncompletePatternError("activation pattern is empty")
    groups = []
    covered = []
    for key in sorted(activation_pattern, key=lambda k: int(k)):
        group = [str(c) for c in activation_pattern[key]]
        for c in group:
            if c not in concepts:
                raise IncompletePatternError(f"unknown concept {c!r} in pattern")
            covered.append(c)
        groups.append([concepts.index(c) for c in group])
    if sorted(covered) != sorted(concepts):
        raise IncompletePatternError(
            "every concept must appear in exactly one activation group")
    return groups


def ahl_run(initial_state, weights, doc_ranges, activation_pattern, *,
            learning_rate=0.01, decay=0.03, lam=1.0, thresh=0.002,
            max_iterations=100, auto_learn=False, b1=0.003, lbd1=0.1,
            b2=0.005, lbd2=1.0) -> LearningOutcome:
    """Asynchronous Hebbian learning driven by an activation pattern.

    One learning step fires every group once, in ascending key order.  Within
    a group the activated concepts update synchronously from a snapshot, then
    their incoming edges adapt; edges absent from the initial map may be
    created.  With ``auto_learn`` the rate and decay follow exponentially
    shrinking schedules ``b1*exp(-lbd1*k)`` and ``b2*exp(-lbd2*k)``.
    """
    eta0 = _check_rate(learning_rate)
    w0 = as_weight_matrix(weights)
    concepts = list(w0.concepts)
    docs = _resolve_docs(doc_ranges, concepts)
    groups = _resolve_pattern(activation_pattern, concepts)
    a = check_state_vector(initial_state, concepts)

    W = w0.values.copy()
    sgn0 = np.sign(w0.values)
    tracker = _DocTracker(docs, concepts, thresh)
    tracker.record(a)

    converged_at = None
    for k in range(max_iterations):
        if auto_learn:
            eta = b1 * np.exp(-lbd1 * (k + 1))
            gamma = b2 * np.exp(-lbd2 * (k + 1))
        else:
            eta, gamma = eta0, decay
        for group in groups:
            snapshot = a.copy()
            for i in group:
                a[i] = transfer(snapshot[i] + snapshot @ W[:, i], "sigmoid", lam)
            if eta <= 0.0:
                continue
            for i in group:
                sign_ref = np.where(sgn0[:, i] != 0.0, sgn0[:, i], np.sign(W[:, i]))
                dw = eta * a[i] * (a - sign_ref * W[:, i] * a[i])
                incoming = (1.0 - gamma) * W[:, i] + dw
                incoming[i] = 0.0  # no self-loops are grown
                W[:, i] = incoming
        tracker.record(a)
        if tracker.satisfied():
            converged_at = k
            break

    termination = "both_conditions_met" if converged_at is not None else "max_iterations"
    return LearningOutcome(
        weights=WeightMatrix(concepts, W),
        converged_at=converged_at,
        final_state={c: float(v) for c, v in zip(concepts, a)},
        termination=termination,
        doc_trace=tracker.trace,
    )


def _learning_message(kind, outcome, eta, gamma):
    if outcome.converged_at is not None:
        return (f"The {kind} learning process converged at step "
                f"{outcome.converged_at} with the learning rate eta = "
                f"{eta} and decay = {gamma}!")
    return (f"The {kind} learning process did not converge with the learning "
            f"rate eta = {eta} and decay = {gamma}")


class NhlLearner(BaseEstimator):
    """Estimator wrapper around :func:`nhl_run`.

    ``fit(weights, initial_state)`` stores the adapted matrix in ``weights_``
    along with convergence metadata.
    """

    def __init__(self, doc_ranges=None, learning_rate=0.01, decay=1.0,
                 lam=1.0, thresh=0.002, max_iterations=100):
        self.doc_ranges = doc_ranges
        self.learning_rate = learning_rate
        self.decay = decay
        self.lam = lam
        self.thresh = thresh
        self.max_iterations = max_iterations

    def fit(self, weights, initial_state):
        outcome = nhl_run(
            initial_state, weights, self.doc_ranges,
            learning_rate=self.learning_rate, decay=self.decay, lam=self.lam,
            thresh=self.thresh, max_iterations=self.max_iterations)
        self.outcome_ = outcome
        self.weights_ = outcome.weights
        self.converged_at_ = outcome.converged_at
        self.final_state_ = outcome.final_state
        self.termination_ = outcome.termination
        self.doc_trace_ = outcome.doc_trace
        return self

    def message(self) -> str:
        return _learning_message("NHL", self.outcome_, self.learning_rate, self.decay)


class AhlLearner(BaseEstimator):
    """Estimator wrapper around :func:`ahl_run`."""

    def __init__(self, doc_ranges=None, activation_pattern=None,
                 learning_rate=0.01, decay=0.03, lam=1.0, thresh=0.002,
                 max_iterations=100, auto_learn=False, b1=0.003, lbd1=0.1,
                 b2=0.005, lbd2=1.0):
        self.doc_ranges = doc_ranges
        self.activation_pattern = activation_pattern
        self.learning_rate = learning_rate
        self.decay = decay
        self.lam = lam
        self.thresh = thresh
        self.max_iterations = max_iterations
        self.auto_learn = auto_learn
        self.b1 = b1
        self.lbd1 = lbd1
        self.b2 = b2
        self.lbd2 = lbd2

    def fit(self, weights, initial_state):
        outcome = ahl_run(
            initial_state, weights, self.doc_ranges, self.activation_pattern,
            learning_rate=self.learning_rate, decay=self.decay, lam=self.lam,
            thresh=self.thresh, max_iterations=self.max_iterations,
            auto_learn=self.auto_learn, b1=self.b1, lbd1=self.lbd1,
            b2=self.b2, lbd2=self.lbd2)
        self.outcome_ = outcome
        self.weights_ = outcome.weights
        self.converged_at_ = outcome.converged_at
        self.final_state_ = outcome.final_state
        self.termination_ = outcome.termination
        self.doc_trace_ = outcome.doc_trace
        return self

    def message(self) -> str:
        return _learning_message("AHL", self.outcome_, self.learning_rate, self.decay)
