"""Invariant checks for samples and recordings.

Findings are returned as ``Violation`` records; nothing here raises.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

from hyperarousal.data.types import Recording, Sample

RULE_HR_POSITIVE = "hr must be finite and > 0"
RULE_ACC_ALL_OR_NONE = "acceleration components must be all present or all absent"
RULE_ACC_FINITE = "acceleration components must be finite"
RULE_SAMPLES_INCREASING = "sample timestamps must be strictly increasing"
RULE_EVENTS_ORDERED = "event timestamps must be non-decreasing"
RULE_EVENT_IN_SPAN = "event timestamp must lie within the recording's sample span"
RULE_INTEGER_TIMESTAMP = "timestamp must be an integer number of seconds"


@dataclass(frozen=True)
class Violation:
    """One broken invariant: which field, at which timestamp, and the rule."""

    field: str
    timestamp: Optional[int]
    rule: str

    def __str__(self) -> str:
        return f"{self.field} at t={self.timestamp}: {self.rule}"


def sample_violations(sample: Sample) -> List[Violation]:
    """Check the per-sample invariants."""
    found = []
    if not isinstance(sample.timestamp, int) or isinstance(sample.timestamp, bool):
        found.append(Violation("timestamp", sample.timestamp, RULE_INTEGER_TIMESTAMP))
    if sample.hr is not None and not (math.isfinite(sample.hr) and sample.hr > 0):
        found.append(Violation("hr", sample.timestamp, RULE_HR_POSITIVE))
    components = (sample.acc_x, sample.acc_y, sample.acc_z)
    present = [c is not None for c in components]
    if any(present) and not all(present):
        found.append(Violation("acc", sample.timestamp, RULE_ACC_ALL_OR_NONE))
    elif all(present) and not all(math.isfinite(c) for c in components):
        found.append(Violation("acc", sample.timestamp, RULE_ACC_FINITE))
    return found


def validate_recording(recording: Recording) -> List[Violation]:
    """Return every Sample/Recording invariant violation; empty iff valid."""
    violations: List[Violation] = []
    previous = None
    for sample in recording.samples:
        violations.extend(sample_violations(sample))
        if previous is not None and sample.timestamp <= previous:
            violations.append(
                Violation("timestamp", sample.timestamp, RULE_SAMPLES_INCREASING)
            )
        previous = sample.timestamp

    previous_event = None
    stamps = [sample.timestamp for sample in recording.samples]
    first = min(stamps) if stamps else None
    last = max(stamps) if stamps else None
    for event in recording.events:
        if previous_event is not None and event.timestamp < previous_event:
            violations.append(Violation("event", event.timestamp, RULE_EVENTS_ORDERED))
        previous_event = event.timestamp
        if first is None or not (first <= event.timestamp <= last):
            violations.append(Violation("event", event.timestamp, RULE_EVENT_IN_SPAN))
    return violations
