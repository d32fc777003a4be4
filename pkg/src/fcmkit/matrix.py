"""Labelled causal weight matrix with CSV/JSON round-trip support."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .checks import check_concepts, check_square
from .errors import UnknownConceptError


@dataclass
class WeightMatrix:
    """Square causal matrix: ``values[i, j]`` is the influence of
    ``concepts[i]`` (source) on ``concepts[j]`` (target).

    Construction from expert input keeps entries inside the fuzzy universe;
    learned matrices may carry entries outside [-1, 1] and are accepted as-is.
    """

    concepts: list[str]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.concepts = check_concepts(self.concepts)
        self.values = check_square(self.values).copy()
        if self.values.shape[0] != len(self.concepts):
            raise ValueError(
                f"{len(self.concepts)} concepts but matrix of shape {self.values.shape}"
            )

    @property
    def n(self) -> int:
        return len(self.concepts)

    def index(self, concept: str) -> int:
        try:
            return self.concepts.index(concept)
        except ValueError:
            raise UnknownConceptError(concept) from None

    def value(self, source: str, target: str) -> float:
        return float(self.values[self.index(source), self.index(target)])

    def copy(self) -> "WeightMatrix":
        return WeightMatrix(list(self.concepts), self.values.copy())

    @classmethod
    def zeros(cls, concepts) -> "WeightMatrix":
        concepts = check_concepts(concepts)
        return cls(concepts, np.zeros((len(concepts), len(concepts))))

    @classmethod
    def from_dict(cls, mapping: dict) -> "WeightMatrix":
        """Build from a nested ``{source: {target: weight}}`` mapping."""
        concepts = []
        for src, row in mapping.items():
            if src not in concepts:
                concepts.append(src)
            for tgt in row:
                if tgt not in concepts:
                    concepts.append(tgt)
        m = cls.zeros(concepts)
        for src, row in mapping.items():
            for tgt, w in row.items():
                m.values[m.index(src), m.index(tgt)] = float(w)
        return m

    def as_dict(self) -> dict:
        return {
            src: {tgt: float(self.values[i, j]) for j, tgt in enumerate(self.concepts)}
            for i, src in enumerate(self.concepts)
        }

    # --- serialization ---------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + self.concepts)
            for i, src in enumerate(self.concepts):
                writer.writerow([src] + [repr(float(v)) for v in self.values[i]])

    @classmethod
    def from_csv(cls, path) -> "WeightMatrix":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        header = rows[0][1:]
        concepts = [c.strip() for c in header]
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        return cls(concepts, values)

    def to_json_dict(self) -> dict:
        return {"concepts": list(self.concepts), "weights": self.values.tolist()}

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)

    @classmethod
    def from_json_dict(cls, payload: dict) -> "WeightMatrix":
        return cls(list(payload["concepts"]), np.asarray(payload["weights"], dtype=float))

    @classmethod
    def from_json(cls, path) -> "WeightMatrix":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def as_weight_matrix(obj, concepts=None) -> WeightMatrix:
    """Coerce arrays, nested dicts or WeightMatrix instances to WeightMatrix.

    Bare arrays get ``C1..Cn`` labels unless ``concepts`` is supplied.
    """
    if isinstance(obj, WeightMatrix):
        return obj
    if isinstance(obj, dict):
        return WeightMatrix.from_dict(obj)
    arr = check_square(obj)
    if concepts is None:
        concepts = [f"C{i + 1}" for i in range(arr.shape[0])]
    return WeightMatrix(list(concepts), arr)
