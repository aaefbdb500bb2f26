"""Report emitter: CSV tables, summary, and the grouped-bar SVG."""

import xml.etree.ElementTree as ET

import pytest

from mmfuse.harness import BlockStats, run_reference_experiments
from mmfuse.report import emit_chart, emit_report
from mmfuse.vocab import FUSION_OPERATIONS


@pytest.fixture(scope="module")
def results():
    return run_reference_experiments(seed=0, reps=2, per_rep=25, blocks=2, block_size=25)


def test_emit_report_writes_expected_files(results, tmp_path):
    paths = emit_report(results, tmp_path)
    names = sorted(p.name for p in paths)
    assert names == [
        "summary.md",
        "table2_gestures.csv",
        "table3_speech.csv",
        "table4_fused.csv",
    ]
    for p in paths:
        assert p.exists()
        assert p.parent == tmp_path


def test_gesture_csv_shape(results, tmp_path):
    emit_report(results, tmp_path)
    lines = (tmp_path / "table2_gestures.csv").read_text().splitlines()
    assert lines[0] == "gesture,error_pct,correct_pct"
    assert len(lines) == 6
    for line, row in zip(lines[1:], results.emg.rows):
        name, err, corr = line.split(",")
        assert name == row.item.value
        assert float(err) == pytest.approx(row.error_pct, abs=0.05)
        assert float(err) + float(corr) == pytest.approx(100.0, abs=0.11)


def test_speech_csv_shape(results, tmp_path):
    emit_report(results, tmp_path)
    lines = (tmp_path / "table3_speech.csv").read_text().splitlines()
    assert lines[0] == "command,error_pct,correct_pct"
    assert len(lines) == 6


def test_fused_csv_shape_four_blocks(tmp_path):
    four = run_reference_experiments(seed=1, reps=2, per_rep=10, blocks=4, block_size=10)
    emit_report(four, tmp_path)
    lines = (tmp_path / "table4_fused.csv").read_text().splitlines()
    assert lines[0] == (
        "operation,errors_block1,errors_block2,errors_block3,errors_block4,"
        "error_pct,variance"
    )
    assert len(lines) == 6
    assert len(lines[1].split(",")) == 7


def test_fused_csv_matches_results(results, tmp_path):
    # the block columns track the actual block count (two in this fixture)
    emit_report(results, tmp_path)
    lines = (tmp_path / "table4_fused.csv").read_text().splitlines()
    assert lines[0] == "operation,errors_block1,errors_block2,error_pct,variance"
    for line, op in zip(lines[1:], FUSION_OPERATIONS):
        cells = line.split(",")
        stats = results.fusion[op]
        assert cells[0] == op.label
        assert tuple(int(c) for c in cells[1:3]) == stats.block_errors
        assert float(cells[3]) == pytest.approx(stats.error_pct, abs=0.05)


def test_summary_states_aggregates_and_discrepancy(results, tmp_path):
    emit_report(results, tmp_path)
    text = (tmp_path / "summary.md").read_text()
    assert f"{results.emg_mean_accuracy:.2f}" in text
    assert f"{results.speech_mean_accuracy:.2f}" in text
    # the reported headline figure does not follow from the fused table;
    # the summary must say so rather than silently pick one
    assert "95.92" in text
    assert "94.8" in text
    assert "5.2" in text


def test_report_bytes_are_deterministic(results, tmp_path):
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    a_dir.mkdir()
    b_dir.mkdir()
    for p_a, p_b in zip(emit_report(results, a_dir), emit_report(results, b_dir)):
        assert p_a.read_bytes() == p_b.read_bytes()


def test_chart_is_well_formed_xml(results, tmp_path):
    path = emit_chart(results.fusion, tmp_path / "fused.svg")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    text = path.read_text()
    # the gripper operation's ampersand must be escaped
    assert "&amp;" in text
    assert " & " not in text


def test_chart_bytes_are_deterministic(results, tmp_path):
    a = emit_chart(results.fusion, tmp_path / "a.svg").read_bytes()
    b = emit_chart(results.fusion, tmp_path / "b.svg").read_bytes()
    assert a == b


def test_chart_accepts_labeled_sequence(tmp_path):
    stats = BlockStats.from_counts((3, 1, 2, 2), block_size=50)
    path = emit_chart([("only op", stats)], tmp_path / "one.svg")
    assert "only op" in path.read_text()


def test_chart_rejects_empty_labels(tmp_path):
    stats = BlockStats.from_counts((3, 1), block_size=50)
    with pytest.raises(ValueError):
        emit_chart([("", stats)], tmp_path / "bad.svg")


def test_chart_rejects_empty_input(tmp_path):
    with pytest.raises(ValueError):
        emit_chart([], tmp_path / "empty.svg")
