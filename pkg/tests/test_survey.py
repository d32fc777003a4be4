import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcmkit import (
    EdgeRating,
    EmptyEdgeError,
    ExpertSurvey,
    SchemaError,
    UnknownTermError,
    check_consistency,
    edge_entropy,
    read_survey,
    write_survey,
)
from fcmkit.survey import CSV_TERM_COLUMNS, NO_CAUSALITY, term_valence

from conftest import make_six_expert_survey


def write_survey_files(survey, tmp_path):
    json_path = tmp_path / "survey.json"
    csv_path = tmp_path / "survey.csv"
    write_survey(survey, json_path)
    write_survey(survey, csv_path)
    return json_path, csv_path


class TestReadSurvey:
    def test_json_preserves_expert_order_and_ratings(self, tmp_path, six_expert_survey):
        path, _ = write_survey_files(six_expert_survey, tmp_path)
        loaded = read_survey(path)
        assert loaded.expert_ids == [f"Expert{i}" for i in range(6)]
        assert loaded.n_experts == 6
        assert all(len(ratings) == 4 for _, ratings in loaded.experts)
        assert loaded.experts == six_expert_survey.experts

    def test_csv_splits_edge_cell_on_separator(self, tmp_path):
        path = tmp_path / "s.csv"
        header = ";".join(["From->To", *CSV_TERM_COLUMNS])
        path.write_text(header + "\nC1->C2;0;0;0;0;0;0;0;0;0;1;0\n")
        survey = read_survey(path)
        rating = survey.experts[0][1][0]
        assert (rating.source, rating.target) == ("C1", "C2")
        assert rating.term == "+H"

    def test_csv_expert_boundary_on_repeated_edge(self, tmp_path, six_expert_survey):
        _, path = write_survey_files(six_expert_survey, tmp_path)
        loaded = read_survey(path)
        assert loaded.n_experts == 6
        assert loaded.expert_ids == [str(i) for i in range(6)]
        for (_, got), (_, want) in zip(loaded.experts, six_expert_survey.experts):
            assert got == want

    def test_empty_file_with_header_gives_zero_experts(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(";".join(["From->To", *CSV_TERM_COLUMNS]) + "\n")
        assert read_survey(path).n_experts == 0
        jpath = tmp_path / "empty.json"
        jpath.write_text("{}")
        assert read_survey(jpath).n_experts == 0

    def test_unknown_term_column_is_an_error(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("From->To;+ENORMOUS\nC1->C2;1\n")
        with pytest.raises(UnknownTermError):
            read_survey(path)

    def test_unknown_json_key_is_an_error(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"E0": [{"from": "A", "to": "B", "wat": 1}]}))
        with pytest.raises(UnknownTermError):
            read_survey(path)

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            read_survey("/nonexistent/survey.csv")

    def test_malformed_rows_raise_schema_error(self, tmp_path):
        bad_edge = tmp_path / "bad_edge.csv"
        header = ";".join(["From->To", *CSV_TERM_COLUMNS])
        bad_edge.write_text(header + "\nC1C2;1;0;0;0;0;0;0;0;0;0;0\n")
        with pytest.raises(SchemaError):
            read_survey(bad_edge)

        no_term = tmp_path / "no_term.csv"
        no_term.write_text(header + "\nC1->C2;0;0;0;0;0;0;0;0;0;0;0\n")
        with pytest.raises(SchemaError):
            read_survey(no_term)

        bad_value = tmp_path / "bad_value.json"
        bad_value.write_text(json.dumps({"E0": [{"from": "A", "to": "B", "+H": 3}]}))
        with pytest.raises(SchemaError):
            read_survey(bad_value)

    def test_na_column_maps_to_no_causality(self, tmp_path):
        path = tmp_path / "s.csv"
        header = ";".join(["From->To", *CSV_TERM_COLUMNS])
        path.write_text(header + "\nC1->C2;0;0;0;0;0;1;0;0;0;0;0\n")
        rating = read_survey(path).experts[0][1][0]
        assert rating.term == NO_CAUSALITY

    def test_self_loops_are_permitted(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"E0": [{"from": "A", "to": "A", "+H": 1}]}))
        survey = read_survey(path)
        assert survey.edges() == [("A", "A")]


@st.composite
def surveys(draw):
    concepts = draw(st.lists(st.sampled_from(["A", "B", "C", "D"]),
                             min_size=2, max_size=4, unique=True))
    edges = draw(st.lists(st.sampled_from([(s, t) for s in concepts for t in concepts]),
                          min_size=1, max_size=4, unique=True))
    n_experts = draw(st.integers(min_value=1, max_value=4))
    vocabulary = ["-H", "-VL", "+L", "+VH", NO_CAUSALITY]
    experts = []
    for i in range(n_experts):
        ratings = []
        for (s, t) in edges:
            terms = draw(st.lists(st.sampled_from(vocabulary), min_size=1,
                                  max_size=2, unique=True))
            for term in terms:
                endorsement = draw(st.floats(min_value=0.01, max_value=1.0,
                                             allow_nan=False))
                ratings.append(EdgeRating(s, t, term, float(endorsement)))
        experts.append((f"expert-{i}", ratings))
    return ExpertSurvey(experts)


class TestRoundTrip:
    @given(survey=surveys())
    @settings(max_examples=40, deadline=None)
    def test_json_round_trip_is_identity(self, survey, tmp_path_factory):
        path = tmp_path_factory.mktemp("rt") / "s.json"
        write_survey(survey, path)
        assert read_survey(path).experts == survey.experts


class TestConsistency:
    def test_sign_conflict_is_reported(self):
        survey = ExpertSurvey([
            ("A", [EdgeRating("C1", "C2", "+H")]),
            ("B", [EdgeRating("C1", "C2", "-M")]),
        ])
        report = check_consistency(survey)
        assert len(report.entries) == 1
        entry = report.entries[0]
        assert (entry.source, entry.target) == ("C1", "C2")
        assert entry.experts_positive == [("A", "+H")]
        assert entry.experts_negative == [("B", "-M")]

    def test_all_positive_terms_give_empty_report(self):
        survey = ExpertSurvey([
            ("A", [EdgeRating("C1", "C2", "+H")]),
            ("B", [EdgeRating("C1", "C2", "+VL")]),
        ])
        assert not check_consistency(survey).entries

    def test_no_causality_has_no_valence(self):
        survey = ExpertSurvey([
            ("A", [EdgeRating("C1", "C2", "+H")]),
            ("B", [EdgeRating("C1", "C2", NO_CAUSALITY)]),
        ])
        assert not check_consistency(survey).entries

    def test_symmetric_in_expert_order_and_idempotent(self, six_expert_survey):
        def summarize(survey):
            return {
                (e.source, e.target): (frozenset(e.experts_positive),
                                       frozenset(e.experts_negative))
                for e in check_consistency(survey).entries
            }

        forward = summarize(six_expert_survey)
        backward = summarize(ExpertSurvey(list(reversed(six_expert_survey.experts))))
        assert forward == backward
        assert summarize(six_expert_survey) == forward

    def test_empty_survey_is_rejected(self):
        with pytest.raises(SchemaError):
            check_consistency(ExpertSurvey([]))

    def test_report_csv_has_one_row_per_participant(self, tmp_path):
        survey = ExpertSurvey([
            ("A", [EdgeRating("C1", "C2", "+H")]),
            ("B", [EdgeRating("C1", "C2", "-M")]),
        ])
        out = tmp_path / "report.csv"
        check_consistency(survey).to_csv(out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "source,target,expert,term,valence"
        assert "C1,C2,A,+H,positive" in lines
        assert "C1,C2,B,-M,negative" in lines

    def test_valence_rule(self):
        assert term_valence("-VH") == -1
        assert term_valence("+VL") == 1
        assert term_valence(NO_CAUSALITY) == 0


class TestEntropy:
    def test_three_way_split(self):
        survey = ExpertSurvey([
            (f"e{i}", [EdgeRating("C1", "C2", term)])
            for i, term in enumerate(["+H", "+H", "+H", "+VH", "+VH", "+M"])
        ])
        value = edge_entropy(survey)[("C1", "C2")]
        assert value == pytest.approx(1.459148, abs=1e-6)

    def test_unanimous_answers_have_zero_entropy(self):
        survey = ExpertSurvey([
            (f"e{i}", [EdgeRating("C1", "C2", "+H")]) for i in range(4)
        ])
        assert edge_entropy(survey)[("C1", "C2")] == 0.0

    def test_even_two_way_split_is_one_bit(self):
        survey = ExpertSurvey([
            ("a", [EdgeRating("C1", "C2", "+H")]),
            ("b", [EdgeRating("C1", "C2", "+L")]),
        ])
        assert edge_entropy(survey)[("C1", "C2")] == pytest.approx(1.0)

    def test_no_causality_counts_as_its_own_category(self):
        survey = ExpertSurvey([
            ("a", [EdgeRating("C1", "C2", "+H")]),
            ("b", [EdgeRating("C1", "C2", NO_CAUSALITY)]),
        ])
        assert edge_entropy(survey)[("C1", "C2")] == pytest.approx(1.0)

    def test_permutation_invariance_and_uniform_maximum(self):
        split_a = ["+H"] * 3 + ["+VH"] * 2 + ["+M"]
        split_b = ["+M"] * 3 + ["+H"] * 2 + ["+VH"]
        make = lambda terms: ExpertSurvey(
            [(f"e{i}", [EdgeRating("X", "Y", t)]) for i, t in enumerate(terms)])
        assert edge_entropy(make(split_a))[("X", "Y")] == \
            pytest.approx(edge_entropy(make(split_b))[("X", "Y")])
        uniform = ["+H", "+M", "+L", "+VL"]
        assert edge_entropy(make(uniform))[("X", "Y")] == \
            pytest.approx(math.log2(len(uniform)))

    def test_zero_endorsement_edge_is_an_error(self):
        survey = ExpertSurvey([
            ("a", [EdgeRating("C1", "C2", "+H", endorsement=0.0)]),
        ])
        with pytest.raises(EmptyEdgeError):
            edge_entropy(survey)
