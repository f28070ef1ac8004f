"""Core data types, file ingestion and validation."""

from .io import load_recordings, write_recordings
from .types import ChannelArrays, EventMark, Recording, Sample
from .validation import Violation, validate_recording

__all__ = [
    "ChannelArrays",
    "EventMark",
    "Recording",
    "Sample",
    "Violation",
    "load_recordings",
    "validate_recording",
    "write_recordings",
]
