"""Expert survey ingestion: reading, validation, consistency and entropy.

Surveys hold per-expert linguistic ratings of directed concept edges.  Two
file formats are supported:

* canonical JSON: top-level object mapping ``expert_id`` to an array of row
  objects ``{"from": ..., "to": ..., "<term>": 0|1, ..., "no causality": 0|1}``
* CSV: header ``From<sep>To; -VH; ...; NA; ...; +VH`` with one row per
  (expert, edge) in expert-major order.  The format carries no expert column;
  a new expert starts whenever an edge repeats, and experts are identified by
  their ordinal.  Surveys where consecutive experts rate disjoint edge sets
  are not representable in CSV; use JSON for those.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .errors import EmptyEdgeError, SchemaError, UnknownTermError

NO_CAUSALITY = "no causality"

#: canonical rating vocabulary, negative to positive
CANONICAL_TERMS = ("-VH", "-H", "-M", "-L", "-VL", "+VL", "+L", "+M", "+H", "+VH")

#: column order used by the CSV format ("NA" encodes the no-causality answer)
CSV_TERM_COLUMNS = ("-VH", "-H", "-M", "-L", "-VL", "NA", "+VL", "+L", "+M", "+H", "+VH")

_TERM_ALIASES = {t.lower(): t for t in CANONICAL_TERMS}
_TERM_ALIASES.update({"na": NO_CAUSALITY, NO_CAUSALITY: NO_CAUSALITY})


def normalize_term(term: str, vocabulary=None) -> str:
    """Map a raw column/key to its canonical term id.

    ``vocabulary`` may extend the canonical vocabulary with custom term ids
    (matched case-sensitively).  Unknown labels raise ``UnknownTermError``.
    """
    if vocabulary and term in vocabulary:
        return term
    canonical = _TERM_ALIASES.get(term.strip().lower())
    if canonical is None:
        raise UnknownTermError(term)
    return canonical


def term_valence(term: str) -> int:
    """-1, 0 or +1 according to the term's sign prefix."""
    if term == NO_CAUSALITY:
        return 0
    if term.startswith("-"):
        return -1
    if term.startswith("+"):
        return 1
    return 0


@dataclass(frozen=True)
class EdgeRating:
    source: str
    target: str
    term: str
    endorsement: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.endorsement <= 1.0:
            raise ValueError(f"endorsement must lie in [0, 1], got {self.endorsement}")


@dataclass
class ExpertSurvey:
    """Ordered per-expert edge ratings."""

    experts: list[tuple[str, list[EdgeRating]]] = field(default_factory=list)

    def __post_init__(self):
        ids = [eid for eid, _ in self.experts]
        if len(set(ids)) != len(ids):
            raise ValueError("expert ids must be unique")

    @property
    def n_experts(self) -> int:
        return len(self.experts)

    @property
    def expert_ids(self) -> list[str]:
        return [eid for eid, _ in self.experts]

    def concepts(self) -> list[str]:
        """Concept ids in order of first appearance across all ratings."""
        seen: list[str] = []
        for _, ratings in self.experts:
            for r in ratings:
                for c in (r.source, r.target):
                    if c not in seen:
                        seen.append(c)
        return seen

    def edges(self) -> list[tuple[str, str]]:
        seen: list[tuple[str, str]] = []
        for _, ratings in self.experts:
            for r in ratings:
                if (r.source, r.target) not in seen:
                    seen.append((r.source, r.target))
        return seen

    def ratings_by_edge(self) -> dict[tuple[str, str], list[tuple[str, EdgeRating]]]:
        grouped: dict[tuple[str, str], list[tuple[str, EdgeRating]]] = {}
        for eid, ratings in self.experts:
            for r in ratings:
                grouped.setdefault((r.source, r.target), []).append((eid, r))
        return grouped


def _rows_to_ratings(cells, source, target, row_no, path):
    ratings = []
    for term, value in cells:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise SchemaError(f"non-numeric endorsement {value!r} for {term}", row_no, path)
        if value == 0.0:
            continue
        if not 0.0 <= value <= 1.0:
            raise SchemaError(f"endorsement {value} outside [0, 1]", row_no, path)
        ratings.append(EdgeRating(source, target, term, value))
    if not ratings:
        raise SchemaError("row endorses no term", row_no, path)
    return ratings


def read_survey(path, format=None, concept_separator="->", csv_separator=";",
                terms=None) -> ExpertSurvey:
    """Read an expert survey from a CSV or JSON file.

    ``format`` defaults to the file extension.  ``terms`` may supply extra
    valid term ids beyond the canonical vocabulary; any column or key outside
    the vocabulary raises ``UnknownTermError`` rather than being dropped.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    if format is None:
        format = os.path.splitext(str(path))[1].lstrip(".").lower()
    if format == "json":
        return _read_json(path, terms)
    if format == "csv":
        return _read_csv(path, concept_separator, csv_separator, terms)
    raise SchemaError(f"unsupported survey format: {format!r}", path=path)


def _read_json(path, terms) -> ExpertSurvey:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", path=path) from exc
    if not isinstance(payload, dict):
        raise SchemaError("top level must be an object keyed by expert id", path=path)
    experts = []
    for eid, rows in payload.items():
        if not isinstance(rows, list):
            raise SchemaError(f"expert {eid!r} must map to an array of rows", path=path)
        ratings: list[EdgeRating] = []
        for row_no, row in enumerate(rows):
            if not isinstance(row, dict):
                raise SchemaError("row must be an object", row_no, path)
            fields = {k.strip().lower(): v for k, v in row.items()
                      if k.strip().lower() in ("from", "to")}
            if "from" not in fields or "to" not in fields:
                raise SchemaError("row lacks 'from'/'to' keys", row_no, path)
            cells = [(normalize_term(k, terms), v) for k, v in row.items()
                     if k.strip().lower() not in ("from", "to")]
            ratings.extend(_rows_to_ratings(cells, str(fields["from"]),
                                            str(fields["to"]), row_no, path))
        experts.append((str(eid), ratings))
    return ExpertSurvey(experts)


def _read_csv(path, concept_separator, csv_separator, terms) -> ExpertSurvey:
    with open(path, newline="") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise SchemaError("empty file, expected a header row", path=path)
    header = [c.strip() for c in lines[0].split(csv_separator)]
    if concept_separator not in header[0]:
        raise SchemaError(
            f"first header cell {header[0]!r} lacks the concept separator "
            f"{concept_separator!r}", 0, path)
    columns = [normalize_term(c, terms) for c in header[1:]]

    experts: list[tuple[str, list[EdgeRating]]] = []
    current: list[EdgeRating] = []
    seen_edges: set[tuple[str, str]] = set()
    for row_no, line in enumerate(lines[1:], start=1):
        cells = [c.strip() for c in line.split(csv_separator)]
        if len(cells) != len(columns) + 1:
            raise SchemaError(
                f"expected {len(columns) + 1} cells, got {len(cells)}", row_no, path)
        edge = cells[0].split(concept_separator)
        if len(edge) != 2 or not edge[0].strip() or not edge[1].strip():
            raise SchemaError(f"cannot split edge cell {cells[0]!r}", row_no, path)
        source, target = edge[0].strip(), edge[1].strip()
        if (source, target) in seen_edges:  # same edge again: next expert begins
            experts.append((str(len(experts)), current))
            current, seen_edges = [], set()
        seen_edges.add((source, target))
        current.extend(_rows_to_ratings(
            list(zip(columns, cells[1:])), source, target, row_no, path))
    if current:
        experts.append((str(len(experts)), current))
    return ExpertSurvey(experts)


def write_survey(survey: ExpertSurvey, path, format=None, concept_separator="->",
                 csv_separator=";") -> None:
    """Write a survey in the canonical JSON or the CSV format."""
    if format is None:
        format = os.path.splitext(str(path))[1].lstrip(".").lower()
    if format == "json":
        payload = {}
        for eid, ratings in survey.experts:
            rows: dict[tuple[str, str], dict] = {}
            for r in ratings:
                row = rows.setdefault((r.source, r.target),
                                      {"from": r.source, "to": r.target})
                row[r.term] = r.endorsement
            payload[eid] = list(rows.values())
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
        return
    if format == "csv":
        with open(path, "w") as fh:
            fh.write(csv_separator.join(
                [f"From{concept_separator}To", *CSV_TERM_COLUMNS]) + "\n")
            for _, ratings in survey.experts:
                rows: dict[tuple[str, str], dict[str, float]] = {}
                for r in ratings:
                    rows.setdefault((r.source, r.target), {})[r.term] = r.endorsement
                for (src, tgt), cells in rows.items():
                    out = [f"{src}{concept_separator}{tgt}"]
                    for col in CSV_TERM_COLUMNS:
                        out.append(repr(cells.get(normalize_term(col), 0.0)))
                    fh.write(csv_separator.join(out) + "\n")
        return
    raise SchemaError(f"unsupported survey format: {format!r}", path=path)


@dataclass
class InconsistencyEntry:
    source: str
    target: str
    experts_positive: list[tuple[str, str]]  # (expert_id, term)
    experts_negative: list[tuple[str, str]]


@dataclass
class InconsistencyReport:
    entries: list[InconsistencyEntry]

    def __bool__(self):
        return bool(self.entries)

    def to_csv(self, path) -> None:
        """Long-format dump: one row per (edge, expert) taking part in a conflict."""
        with open(path, "w") as fh:
            fh.write("source,target,expert,term,valence\n")
            for e in self.entries:
                for eid, term in e.experts_positive:
                    fh.write(f"{e.source},{e.target},{eid},{term},positive\n")
                for eid, term in e.experts_negative:
                    fh.write(f"{e.source},{e.target},{eid},{term},negative\n")


def check_consistency(survey: ExpertSurvey) -> InconsistencyReport:
    """Report edges where experts disagree on the sign of the causal impact.

    No-causality answers carry no valence and never create a conflict.
    Symmetric in expert order and idempotent; an empty report is valid.
    """
    if survey.n_experts == 0:
        raise SchemaError("survey contains no experts")
    entries = []
    for (src, tgt), rated in survey.ratings_by_edge().items():
        pos = [(eid, r.term) for eid, r in rated
               if r.endorsement > 0 and term_valence(r.term) > 0]
        neg = [(eid, r.term) for eid, r in rated
               if r.endorsement > 0 and term_valence(r.term) < 0]
        if pos and neg:
            entries.append(InconsistencyEntry(src, tgt, pos, neg))
    return InconsistencyReport(entries)


def edge_entropy(survey: ExpertSurvey) -> dict[tuple[str, str], float]:
    """Shannon entropy (bits) of the per-edge answer distribution.

    Proportions are endorsement-weighted over every answer category for the
    edge, with no-causality counting as a category of its own.
    """
    result = {}
    for edge, rated in survey.ratings_by_edge().items():
        weights: dict[str, float] = {}
        for _, r in rated:
            weights[r.term] = weights.get(r.term, 0.0) + r.endorsement
        total = sum(weights.values())
        if total <= 0.0:
            raise EmptyEdgeError(f"edge {edge} has no endorsed ratings")
        entropy = 0.0
        for w in weights.values():
            if w > 0:
                p = w / total
                entropy -= p * math.log2(p)
        result[edge] = entropy
    return result
