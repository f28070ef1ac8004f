"""Reading and writing the samples and events files.

Samples file header: ``participant_id,timestamp,hr,acc_x,acc_y,acc_z``
Events file header: ``participant_id,timestamp``

Empty fields are missing values. Reals are written in shortest round-trip
form, so load -> write -> load reproduces the same recordings exactly.
"""

import errno
import math
import os
from collections import OrderedDict
from typing import Dict, List, Sequence

import pandas as pd

from hyperarousal.data.types import EventMark, Recording, Sample
from hyperarousal.data.validation import (
    RULE_ACC_ALL_OR_NONE,
    RULE_ACC_FINITE,
    RULE_HR_POSITIVE,
    RULE_INTEGER_TIMESTAMP,
)
from hyperarousal.errors import (
    DuplicateSampleError,
    MalformedRowError,
    UnknownParticipantError,
)
from hyperarousal.logger import Logger
from hyperarousal.utils.file_utils import atomic_write

SAMPLE_COLUMNS = ["participant_id", "timestamp", "hr", "acc_x", "acc_y", "acc_z"]
EVENT_COLUMNS = ["participant_id", "timestamp"]

# Header is line 1; data row i (0-based) is on line i + 2.
_FIRST_DATA_LINE = 2


def read_table(path, columns: Sequence[str]) -> pd.DataFrame:
    """Read a CSV as strings and check that its header is exactly ``columns``."""
    if not os.path.exists(path):
        raise FileNotFoundError(errno.ENOENT, "input file not found", str(path))
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False)
    except pd.errors.EmptyDataError:
        raise MalformedRowError(path, 1, f"missing header row {','.join(columns)}")
    except pd.errors.ParserError as error:
        raise MalformedRowError(path, 1, f"unparseable CSV: {error}")
    if list(frame.columns) != list(columns):
        raise MalformedRowError(
            path, 1, f"header must be exactly {','.join(columns)}"
        )
    return frame


def parse_timestamp(text: str, path, line: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise MalformedRowError(path, line, f"{RULE_INTEGER_TIMESTAMP} (got {text!r})")


def _parse_optional_real(text: str, name: str, path, line: int):
    text = text.strip()
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise MalformedRowError(path, line, f"{name} is not a number (got {text!r})")


def _parse_sample(row, path, line: int) -> Sample:
    timestamp = parse_timestamp(row.timestamp, path, line)
    hr = _parse_optional_real(row.hr, "hr", path, line)
    if hr is not None and not (math.isfinite(hr) and hr > 0):
        raise MalformedRowError(path, line, RULE_HR_POSITIVE)
    acc = [
        _parse_optional_real(getattr(row, name), name, path, line)
        for name in ("acc_x", "acc_y", "acc_z")
    ]
    present = [value is not None for value in acc]
    if any(present) and not all(present):
        raise MalformedRowError(path, line, RULE_ACC_ALL_OR_NONE)
    if all(present) and not all(math.isfinite(value) for value in acc):
        raise MalformedRowError(path, line, RULE_ACC_FINITE)
    return Sample(timestamp, hr, *acc)


def load_recordings(samples_path, events_path) -> List[Recording]:
    """Load one Recording per participant from a samples file and an events file.

    Participants appear in order of first occurrence in the samples file;
    samples and events are sorted by timestamp within each participant.

    Raises:
        FileNotFoundError: An input file does not exist.
        MalformedRowError: Bad header, unparseable field or a Sample rule broken
            (the line number is reported).
        DuplicateSampleError: A (participant, timestamp) pair occurs twice.
        UnknownParticipantError: An event names a participant with no samples.
    """
    samples_frame = read_table(samples_path, SAMPLE_COLUMNS)
    by_participant: "OrderedDict[str, Dict[int, Sample]]" = OrderedDict()
    for index, row in enumerate(samples_frame.itertuples(index=False)):
        line = index + _FIRST_DATA_LINE
        participant_id = row.participant_id.strip()
        if participant_id == "":
            raise MalformedRowError(samples_path, line, "participant_id is empty")
        sample = _parse_sample(row, samples_path, line)
        bucket = by_participant.setdefault(participant_id, {})
        if sample.timestamp in bucket:
            raise DuplicateSampleError(samples_path, line, participant_id, sample.timestamp)
        bucket[sample.timestamp] = sample

    events_frame = read_table(events_path, EVENT_COLUMNS)
    events: Dict[str, List[EventMark]] = {pid: [] for pid in by_participant}
    for index, row in enumerate(events_frame.itertuples(index=False)):
        line = index + _FIRST_DATA_LINE
        participant_id = row.participant_id.strip()
        if participant_id not in by_participant:
            raise UnknownParticipantError(events_path, line, participant_id)
        events[participant_id].append(
            EventMark(parse_timestamp(row.timestamp, events_path, line))
        )

    recordings = []
    for participant_id, bucket in by_participant.items():
        samples = tuple(bucket[t] for t in sorted(bucket))
        marks = tuple(sorted(events[participant_id], key=lambda e: e.timestamp))
        recordings.append(Recording(participant_id, samples, marks))
    Logger.print_debug(
        f"loaded {len(samples_frame)} samples and {len(events_frame)} events "
        f"for {len(recordings)} participants"
    )
    return recordings


def _format_optional(value) -> str:
    return "" if value is None else repr(float(value))


def write_recordings(recordings: Sequence[Recording], samples_path, events_path=None):
    """Write recordings back in the samples/events file schemas (atomically).

    The events file is skipped when ``events_path`` is None.
    """
    with atomic_write(samples_path) as handle:
        handle.write(",".join(SAMPLE_COLUMNS) + "\n")
        for recording in recordings:
            pid = recording.participant_id
            for s in recording.samples:
                handle.write(
                    f"{pid},{s.timestamp},{_format_optional(s.hr)},"
                    f"{_format_optional(s.acc_x)},{_format_optional(s.acc_y)},"
                    f"{_format_optional(s.acc_z)}\n"
                )
    if events_path is None:
        return
    with atomic_write(events_path) as handle:
        handle.write(",".join(EVENT_COLUMNS) + "\n")
        for recording in recordings:
            for event in recording.events:
                handle.write(f"{recording.participant_id},{event.timestamp}\n")
