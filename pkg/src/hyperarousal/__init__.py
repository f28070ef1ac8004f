"""Hyperarousal detection - wearable heart rate and acceleration classifiers."""

__version__ = "0.1.0"
