"""Qualitative-to-quantitative weight derivation via fuzzy logic.

The pipeline has four stages: sample membership functions for each linguistic
term over a universe of discourse, activate the endorsed terms with an
implication rule, fuse the activated functions with an aggregation operator,
and defuzzify the result into one crisp causal weight per edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
from sklearn.base import BaseEstimator

from .checks import check_unit_interval
from .errors import (
    InvalidParamsError,
    LengthMismatchError,
    SchemaError,
    UnknownTermError,
    ZeroAreaError,
)
from .matrix import WeightMatrix
from .survey import NO_CAUSALITY, ExpertSurvey

IMPLICATION_METHODS = ("mamdani", "larsen")
AGGREGATION_METHODS = ("fmax", "algsum", "esum", "hsum")
DEFUZZ_METHODS = ("centroid", "bisector", "mom", "som", "lom")
TERM_SHAPES = ("triangular", "gaussian", "trapezoidal")


@dataclass(frozen=True)
class Universe:
    """Evenly sampled interval the linguistic terms map onto."""

    lo: float = -1.0
    hi: float = 1.0
    step: float = 0.001

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.step <= 0:
            raise ValueError("step must be positive")
        n = (self.hi - self.lo) / self.step
        if abs(n - round(n)) > 1e-9:
            raise ValueError("step must divide the interval evenly")

    @property
    def samples(self) -> np.ndarray:
        n = int(round((self.hi - self.lo) / self.step))
        return np.linspace(self.lo, self.hi, n + 1)


@dataclass(frozen=True)
class Term:
    term_id: str
    shape: str = "triangular"
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.shape not in TERM_SHAPES:
            raise InvalidParamsError(self.term_id, f"unknown shape {self.shape!r}")
        p = self.params
        if self.shape == "triangular":
            if len(p) != 3 or not p[0] <= p[1] <= p[2]:
                raise InvalidParamsError(self.term_id, "need a <= b <= c")
        elif self.shape == "trapezoidal":
            if len(p) != 4 or not p[0] <= p[1] <= p[2] <= p[3]:
                raise InvalidParamsError(self.term_id, "need a <= b <= c <= d")
        else:
            if len(p) != 2 or p[1] <= 0:
                raise InvalidParamsError(self.term_id, "need (mean, sigma) with sigma > 0")


class LinguisticTermSet:
    """Ordered collection of linguistic terms and their membership shapes."""

    def __init__(self, terms):
        self.terms = [t if isinstance(t, Term) else Term(*t) for t in terms]
        ids = [t.term_id for t in self.terms]
        if len(set(ids)) != len(ids):
            raise ValueError("term ids must be unique")

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term_id):
        return any(t.term_id == term_id for t in self.terms)

    @property
    def term_ids(self) -> list[str]:
        return [t.term_id for t in self.terms]

    def get(self, term_id: str) -> Term:
        for t in self.terms:
            if t.term_id == term_id:
                return t
        raise UnknownTermError(term_id)

    @classmethod
    def default(cls) -> "LinguisticTermSet":
        """Eleven-point bipolar scale of triangular terms over [-1, 1]."""
        return cls([
            Term("-VH", "triangular", (-1.0, -1.0, -0.75)),
            Term("-H", "triangular", (-1.0, -0.75, -0.5)),
            Term("-M", "triangular", (-0.75, -0.5, -0.25)),
            Term("-L", "triangular", (-0.5, -0.25, 0.0)),
            Term("-VL", "triangular", (-0.25, 0.0, 0.0)),
            Term("+VL", "triangular", (0.0, 0.0, 0.25)),
            Term("+L", "triangular", (0.0, 0.25, 0.5)),
            Term("+M", "triangular", (0.25, 0.5, 0.75)),
            Term("+H", "triangular", (0.5, 0.75, 1.0)),
            Term("+VH", "triangular", (0.75, 1.0, 1.0)),
        ])

    @classmethod
    def from_json_dict(cls, payload: dict) -> "LinguisticTermSet":
        """Parse ``{term_id: [a, b, c]}`` or ``{term_id: {"shape": ..., "params": [...]}}``."""
        terms = []
        for term_id, spec in payload.items():
            if isinstance(spec, dict):
                terms.append(Term(term_id, spec.get("shape", "triangular"),
                                  tuple(spec["params"])))
            else:
                terms.append(Term(term_id, "triangular", tuple(spec)))
        return cls(terms)

    def to_json_dict(self) -> dict:
        return {t.term_id: {"shape": t.shape, "params": list(t.params)} for t in self.terms}


def _trimf(x: np.ndarray, a, b, c) -> np.ndarray:
    # degenerate sides (a == b or b == c) collapse to a step at the apex
    y = np.zeros_like(x)
    if b > a:
        rising = (x > a) & (x <= b)
        y[rising] = (x[rising] - a) / (b - a)
    if c > b:
        falling = (x > b) & (x < c)
        y[falling] = (c - x[falling]) / (c - b)
    y[x == b] = 1.0
    return y


def _trapmf(x: np.ndarray, a, b, c, d) -> np.ndarray:
    y = np.zeros_like(x)
    if b > a:
        rising = (x > a) & (x < b)
        y[rising] = (x[rising] - a) / (b - a)
    if d > c:
        falling = (x > c) & (x < d)
        y[falling] = (d - x[falling]) / (d - c)
    y[(x >= b) & (x <= c)] = 1.0
    return y


def _gaussmf(x: np.ndarray, mean, sigma) -> np.ndarray:
    return np.exp(-((x - mean) ** 2) / (2.0 * sigma ** 2))


def generate_memberships(universe: Universe, terms: LinguisticTermSet
                         ) -> dict[str, np.ndarray]:
    """Sample every term's membership function over the universe grid."""
    x = universe.samples
    out = {}
    for t in terms:
        if t.shape == "triangular":
            if t.params[0] < universe.lo or t.params[-1] > universe.hi:
                raise InvalidParamsError(t.term_id, "params outside the universe")
            out[t.term_id] = _trimf(x, *t.params)
        elif t.shape == "trapezoidal":
            if t.params[0] < universe.lo or t.params[-1] > universe.hi:
                raise InvalidParamsError(t.term_id, "params outside the universe")
            out[t.term_id] = _trapmf(x, *t.params)
        else:
            out[t.term_id] = _gaussmf(x, *t.params)
    return out


def implication(mf: np.ndarray, weight: float, method: str = "mamdani") -> np.ndarray:
    """Activate a membership function at an endorsement level.

    Mamdani clips the function at the level; Larsen rescales it.
    """
    weight = check_unit_interval(weight, "weight")
    if method == "mamdani":
        return np.minimum(mf, weight)
    if method == "larsen":
        return mf * weight
    raise ValueError(f"unknown implication method {method!r}")


def aggregate(x: np.ndarray, y: np.ndarray, method: str = "fmax") -> np.ndarray:
    """Pointwise fusion of two activated membership functions."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatchError(f"shapes {x.shape} and {y.shape} differ")
    if method == "fmax":
        return np.maximum(x, y)
    if method == "algsum":
        return x + y - x * y
    if method == "esum":
        return (x + y) / (1.0 + x * y)
    if method == "hsum":
        prod = x * y
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (x + y - 2.0 * prod) / (1.0 - prod)
        # Hamacher sum has a removable singularity at x = y = 1
        return np.where(np.isclose(prod, 1.0), 1.0, out)
    raise ValueError(f"unknown aggregation method {method!r}")


def defuzzify(universe: Universe, mf: np.ndarray, method: str = "centroid") -> float:
    """Collapse a sampled membership function to one crisp value."""
    x = universe.samples
    mf = np.asarray(mf, dtype=float)
    if mf.shape != x.shape:
        raise LengthMismatchError(f"membership of shape {mf.shape} on grid {x.shape}")
    total = float(mf.sum())
    if total <= 0.0:
        raise ZeroAreaError("membership function is identically zero")
    if method == "centroid":
        return float((x * mf).sum() / total)
    if method == "bisector":
        half = np.searchsorted(np.cumsum(mf), total / 2.0)
        return float(x[min(half, len(x) - 1)])
    if method in ("mom", "som", "lom"):
        peaks = x[mf == mf.max()]
        return float({"mom": np.mean, "som": np.min, "lom": np.max}[method](peaks))
    raise ValueError(f"unknown defuzzification method {method!r}")


def _edge_activations(rated, term_order):
    """Per-term endorsement proportions for one edge.

    The denominator counts every expert who rated the edge at all, including
    no-causality answers; the numerator sums endorsements per concrete term.
    """
    raters = {eid for eid, _ in rated}
    denom = len(raters)
    sums: dict[str, float] = {}
    for _, r in rated:
        if r.term == NO_CAUSALITY:
            continue
        sums[r.term] = sums.get(r.term, 0.0) + r.endorsement
    return [(t, sums[t] / denom) for t in term_order if sums.get(t, 0.0) > 0.0]


def build_weight_matrix(survey: ExpertSurvey, universe: Universe | None = None,
                        terms: LinguisticTermSet | None = None,
                        implication_method: str = "mamdani",
                        aggregation_method: str = "fmax",
                        defuzz_method: str = "centroid") -> WeightMatrix:
    """Run the full pipeline over every rated edge of a survey.

    Cells for unrated edges, and for edges every expert marked as
    no-causality, are exactly zero.  Rows and columns follow the order of
    first appearance of concepts in the survey.
    """
    if survey.n_experts == 0:
        raise SchemaError("survey contains no experts")
    universe = universe or Universe()
    terms = terms or LinguisticTermSet.default()
    mfs = generate_memberships(universe, terms)
    for _, ratings in survey.experts:
        for r in ratings:
            if r.term != NO_CAUSALITY and r.term not in terms:
                raise UnknownTermError(r.term)

    matrix = WeightMatrix.zeros(survey.concepts())
    for (src, tgt), rated in survey.ratings_by_edge().items():
        activations = _edge_activations(rated, terms.term_ids)
        if not activations:
            continue
        activated = [implication(mfs[t], w, implication_method) for t, w in activations]
        fused = reduce(lambda a, b: aggregate(a, b, aggregation_method), activated)
        value = defuzzify(universe, fused, defuzz_method)
        matrix.values[matrix.index(src), matrix.index(tgt)] = value
    return matrix


class WeightMatrixBuilder(BaseEstimator):
    """Stateless transformer from expert surveys to causal weight matrices.

    Follows the scikit-learn estimator protocol so the qualitative step can
    sit inside ordinary pipelines; ``transform`` (or ``build``) accepts an
    ``ExpertSurvey`` and returns a ``WeightMatrix``.
    """

    def __init__(self, universe=None, terms=None, implication="mamdani",
                 aggregation="fmax", defuzz="centroid"):
        self.universe = universe
        self.terms = terms
        self.implication = implication
        self.aggregation = aggregation
        self.defuzz = defuzz

    def _validate(self):
        if self.implication not in IMPLICATION_METHODS:
            raise ValueError(f"implication must be one of {IMPLICATION_METHODS}")
        if self.aggregation not in AGGREGATION_METHODS:
            raise ValueError(f"aggregation must be one of {AGGREGATION_METHODS}")
        if self.defuzz not in DEFUZZ_METHODS:
            raise ValueError(f"defuzz must be one of {DEFUZZ_METHODS}")

    def fit(self, X=None, y=None):
        self._validate()
        return self

    def transform(self, X: ExpertSurvey) -> WeightMatrix:
        self._validate()
        return build_weight_matrix(
            X, universe=self.universe, terms=self.terms,
            implication_method=self.implication,
            aggregation_method=self.aggregation,
            defuzz_method=self.defuzz)

    def build(self, survey: ExpertSurvey) -> WeightMatrix:
        return self.transform(survey)
