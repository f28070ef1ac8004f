import pytest

from hyperarousal.data.io import load_recordings, write_recordings
from hyperarousal.data.types import EventMark, Recording, Sample
from hyperarousal.data.validation import (
    RULE_ACC_ALL_OR_NONE,
    RULE_EVENT_IN_SPAN,
    RULE_HR_POSITIVE,
    RULE_SAMPLES_INCREASING,
    validate_recording,
)
from hyperarousal.errors import DuplicateSampleError, MalformedRowError, UnknownParticipantError

SAMPLES_HEADER = "participant_id,timestamp,hr,acc_x,acc_y,acc_z\n"
EVENTS_HEADER = "participant_id,timestamp\n"


def _write(tmp_path, samples_body, events_body=""):
    samples = tmp_path / "samples.csv"
    events = tmp_path / "events.csv"
    samples.write_text(SAMPLES_HEADER + samples_body)
    events.write_text(EVENTS_HEADER + events_body)
    return samples, events


def test_load_groups_and_sorts_by_participant(tmp_path):
    """Test that rows are grouped per participant and sorted by timestamp."""
    samples, events = _write(
        tmp_path,
        "B,11,70.5,0.1,0.2,0.3\n"
        "A,5,,,,\n"
        "B,10,71,,,\n"
        "A,4,80,1,2,3\n",
        "B,11\nA,4\n",
    )
    recordings = load_recordings(samples, events)

    assert [r.participant_id for r in recordings] == ["B", "A"]
    b, a = recordings
    assert [s.timestamp for s in b.samples] == [10, 11]
    assert b.samples[0] == Sample(10, 71.0)
    assert b.samples[1].acc == (0.1, 0.2, 0.3)
    assert a.samples[1] == Sample(5)
    assert a.events == (EventMark(4),)


def test_all_missing_row_is_legal(tmp_path):
    """Test that a row with every value empty loads as an all-missing sample."""
    samples, events = _write(tmp_path, "A,1,,,,\n")
    (recording,) = load_recordings(samples, events)
    assert recording.samples == (Sample(1),)
    assert validate_recording(recording) == []


@pytest.mark.parametrize(
    "row, rule",
    [
        ("A,1,0,,,\n", RULE_HR_POSITIVE),
        ("A,1,-3,,,\n", RULE_HR_POSITIVE),
        ("A,1,70,1,2,\n", RULE_ACC_ALL_OR_NONE),
        ("A,1.5,70,,,\n", "integer"),
        ("A,1,abc,,,\n", "not a number"),
    ],
)
def test_malformed_rows_report_line_and_rule(tmp_path, row, rule):
    """Test that rule-breaking rows raise MalformedRowError naming line and rule."""
    samples, events = _write(tmp_path, "A,0,70,,,\n" + row)
    with pytest.raises(MalformedRowError) as exc_info:
        load_recordings(samples, events)
    assert exc_info.value.line == 3
    assert rule in str(exc_info.value)
    assert str(samples) in str(exc_info.value)


def test_bad_header_is_rejected(tmp_path):
    """Test that a samples file with the wrong header is rejected on line 1."""
    samples = tmp_path / "samples.csv"
    events = tmp_path / "events.csv"
    samples.write_text("participant,timestamp,hr\nA,1,70\n")
    events.write_text(EVENTS_HEADER)
    with pytest.raises(MalformedRowError) as exc_info:
        load_recordings(samples, events)
    assert exc_info.value.line == 1


def test_duplicate_sample_key(tmp_path):
    """Test that a repeated (participant, timestamp) is a DuplicateSampleError."""
    samples, events = _write(tmp_path, "A,1,70,,,\nA,1,71,,,\n")
    with pytest.raises(DuplicateSampleError):
        load_recordings(samples, events)


def test_event_for_unknown_participant(tmp_path):
    """Test that an event for a participant without samples is rejected."""
    samples, events = _write(tmp_path, "A,1,70,,,\n", "Z,1\n")
    with pytest.raises(UnknownParticipantError):
        load_recordings(samples, events)


def test_missing_file_names_path(tmp_path):
    """Test that a missing input raises FileNotFoundError carrying the path."""
    missing = tmp_path / "nope.csv"
    with pytest.raises(FileNotFoundError) as exc_info:
        load_recordings(missing, tmp_path / "events.csv")
    assert exc_info.value.filename == str(missing)


def test_write_then_load_is_identity(tmp_path):
    """Test that load -> write -> load reproduces identical recordings."""
    samples, events = _write(
        tmp_path,
        "A,1,70.123456789012345,0.1,-0.2,9.81\nA,2,,,,\nA,3,0.1,,,\nB,7,60,1e-05,2,3\n",
        "A,2\n",
    )
    first = load_recordings(samples, events)
    out_samples = tmp_path / "out_samples.csv"
    out_events = tmp_path / "out_events.csv"
    write_recordings(first, out_samples, out_events)
    assert load_recordings(out_samples, out_events) == first


def test_validate_recording_collects_violations():
    """Test that validation returns findings as data instead of raising."""
    recording = Recording(
        "A",
        (Sample(5, 70.0), Sample(4, -1.0), Sample(6, 70.0, 1.0, None, None)),
        (EventMark(100),),
    )
    rules = [v.rule for v in validate_recording(recording)]
    assert RULE_SAMPLES_INCREASING in rules
    assert RULE_HR_POSITIVE in rules
    assert RULE_ACC_ALL_OR_NONE in rules
    assert RULE_EVENT_IN_SPAN in rules
