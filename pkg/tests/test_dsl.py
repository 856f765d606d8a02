import math

import pytest

from spdcsim import dsl
from spdcsim.analysis import ghz_layout
from spdcsim.elements import Crystal, Misalignment, ModeShifter, MultimodeCrystal, PhaseShifter, Relabel
from spdcsim.experiment import Experiment

from conftest import CORPUS, label


def test_parse_minimal_experiment():
    exp = dsl.parse("detectors a b\ncrystal a:H b:V g=0.2\n")
    assert exp.detectors == ("a", "b")
    crystal = exp.elements[0]
    assert crystal == Crystal(label("a:0"), label("b:1"), g=0.2)


def test_parse_every_statement_kind():
    text = """
    # full grammar tour
    order 3
    pairs 2
    detectors a b c d
    crystal a:0 b:0 g=0.05 modes=0,1,2
    crystal a:V d:H
    shift c -2
    phase d 3.5
    misalign a T=0.75
    relabel b d
    """
    exp = dsl.parse(text)
    assert exp.expansion_order == 3
    assert exp.max_pairs == 2
    kinds = [type(e) for e in exp.elements]
    assert kinds == [MultimodeCrystal, Crystal, ModeShifter, PhaseShifter, Misalignment, Relabel]
    assert exp.elements[0].modes == (0, 1, 2)
    assert exp.elements[1] == Crystal(label("a:1"), label("d:0"))
    assert exp.elements[4].transmissivity == 0.75


def test_empty_file_reports_missing_detectors():
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse("")
    assert any("missing detectors" in issue.message for issue in err.value.issues)


def test_out_of_range_transmissivity_points_at_token():
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse("detectors a b\nmisalign a T=1.5\n")
    issue = err.value.issues[0]
    assert issue.span.line == 2
    assert issue.span.column == 12
    assert "1.5" in issue.message


def test_unknown_keyword_span():
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse("detectors a b\n  beamsplitter a b\n")
    issue = err.value.issues[0]
    assert issue.span == dsl.SourceSpan(line=2, column=3, length=12)
    assert "unknown keyword" in issue.message


def test_malformed_number_span():
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse("detectors a b\nphase a nope\n")
    issue = err.value.issues[0]
    assert issue.span.line == 2
    assert issue.span.column == 9


def test_duplicate_detectors_line():
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse("detectors a b\ndetectors c d\n")
    assert any("duplicate detectors" in issue.message for issue in err.value.issues)


def test_duplicate_detector_path():
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse("detectors a a\n")
    assert any("duplicate detector path" in i.message for i in err.value.issues)


def test_all_errors_collected_in_one_pass():
    text = "bogus x\nmisalign a T=2\nphase b oops\n"
    with pytest.raises(dsl.ExperimentParseError) as err:
        dsl.parse(text)
    # three statement errors plus the missing detectors line
    lines = sorted(issue.span.line for issue in err.value.issues)
    assert lines == [1, 1, 2, 3]


def test_mode_aliases_lower_to_integers():
    exp = dsl.parse("detectors a b\ncrystal a:H b:V\n")
    assert exp.elements[0].out_a.mode == 0
    assert exp.elements[0].out_b.mode == 1


def test_serialize_emits_noncanonical_settings():
    exp = Experiment(
        elements=(
            Crystal(label("a:0"), label("b:0"), g=0.15),
            PhaseShifter("b", math.pi / 2),
        ),
        detectors=("a", "b"),
        max_pairs=1,
        expansion_order=3,
    )
    text = dsl.serialize(exp)
    assert "order 3" in text
    assert "pairs 1" in text
    assert "g=0.15" in text
    assert dsl.parse(text) == exp


def test_round_trip_generated_layout_is_identity():
    exp = ghz_layout(4, 3)
    assert dsl.parse(dsl.serialize(exp)) == exp


def test_round_trip_normalizes_whitespace_only():
    messy = "detectors   a  b\ncrystal  a:0   b:0\n"
    exp = dsl.parse(messy)
    canonical = dsl.serialize(exp)
    assert canonical == "detectors a b\ncrystal a:0 b:0\n"
    assert dsl.parse(canonical) == exp


def test_serialize_of_bare_experiment_is_two_lines():
    exp = Experiment(elements=(), detectors=("a", "b"), max_pairs=1)
    assert dsl.serialize(exp) == "pairs 1\ndetectors a b\n"


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip_idempotence(path):
    exp = dsl.parse(path.read_text())
    canonical = dsl.serialize(exp)
    assert dsl.parse(canonical) == exp
    assert dsl.serialize(dsl.parse(canonical)) == canonical


def test_corpus_is_complete():
    names = {p.name for p in CORPUS}
    assert names == {
        "induced_coherence.exp",
        "ghz4_polarization.exp",
        "ghz6_polarization.exp",
        "w4_polarization.exp",
        "ghz4_3dim_oam.exp",
        "two_photon_4dim_chain.exp",
        "ghz6_5dim_oam.exp",
        "asym_rank422_triggered.exp",
        "overlapped_double_pair.exp",
        "found_highdim_shifters.exp",
        "found_ghz4_polarization.exp",
    }
