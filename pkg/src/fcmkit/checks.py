"""Input validation helpers shared by the estimators and engines."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, UnknownConceptError


def check_concepts(concepts) -> list[str]:
    ids = [str(c) for c in concepts]
    if len(set(ids)) != len(ids):
        raise ValueError("concept ids must be unique")
    if not ids:
        raise ValueError("concept list is empty")
    return ids


def check_square(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def check_state_vector(state, concepts) -> np.ndarray:
    """Coerce a state given as a dict or sequence into concept order."""
    if isinstance(state, dict):
        unknown = set(state) - set(concepts)
        if unknown:
            raise UnknownConceptError(sorted(unknown)[0])
        missing = [c for c in concepts if c not in state]
        if missing:
            raise DimensionMismatchError(f"state is missing concepts: {missing}")
        arr = np.array([float(state[c]) for c in concepts])
    else:
        arr = np.asarray(state, dtype=float).ravel()
        if arr.shape[0] != len(concepts):
            raise DimensionMismatchError(
                f"state has {arr.shape[0]} entries for {len(concepts)} concepts"
            )
    return arr


def check_unit_interval(x, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


def check_positive(x, name: str, allow_zero: bool = False) -> float:
    x = float(x)
    if x < 0 or (x == 0 and not allow_zero):
        bound = "non-negative" if allow_zero else "positive"
        raise ValueError(f"{name} must be {bound}, got {x}")
    return x
