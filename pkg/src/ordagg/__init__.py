"""Aggregate noisy local ordinal constraints into global rankings, partitions,
and trees by cutting a signed constraint graph."""

__version__ = "0.1.0"
