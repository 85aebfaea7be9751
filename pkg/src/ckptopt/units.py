"""Unit-suffixed quantity parsing.

Every quantity inside the package is measured in minutes (rates per minute).
Conversions happen exactly once, at an ingestion boundary: CLI flags here,
measurement log files in :mod:`ckptopt.estimator`.

Durations carry one of the suffixes ``s``, ``min`` or ``hr`` (``5min``,
``30s``, ``0.5hr``); rates carry ``/s``, ``/min`` or ``/hr`` (``0.005/min``,
``11/hr``).  Bare numbers are rejected: the quantities this package deals
with are quoted in mixed units often enough that an implicit default is a
foot-gun.
"""

from __future__ import annotations

import math
import re

from .errors import DomainError

__all__ = ["parse_duration", "parse_rate", "minutes_from", "UNIT_WORDS"]

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_DURATION_RE = re.compile(rf"^({_NUMBER})\s*(s|min|hr)$")
_RATE_RE = re.compile(rf"^({_NUMBER})\s*/\s*(s|min|hr)$")

# Full-word spellings used by measurement log headers.
UNIT_WORDS = {"seconds": "s", "minutes": "min", "hours": "hr"}


def minutes_from(value: float, unit: str) -> float:
    """Convert a duration in the given unit (s | min | hr) to minutes."""
    if unit == "min":
        return value
    if unit == "s":
        return value / 60.0
    if unit == "hr":
        return value * 60.0
    raise DomainError(f"unknown time unit {unit!r}; expected s, min or hr")


def parse_duration(text: str) -> float:
    """Parse a suffixed duration such as ``5min``, ``23.1s`` or ``2hr`` to minutes."""
    m = _DURATION_RE.match(text.strip())
    if m is None:
        raise DomainError(
            f"invalid duration {text!r}: expected a number with an s, min or hr suffix"
        )
    converted = minutes_from(float(m.group(1)), m.group(2))
    if not math.isfinite(converted):
        raise DomainError(f"duration {text!r} is out of range")
    return converted


def parse_rate(text: str) -> float:
    """Parse a suffixed rate such as ``0.005/min`` or ``0.0022/hr`` to per-minute."""
    m = _RATE_RE.match(text.strip())
    if m is None:
        raise DomainError(
            f"invalid rate {text!r}: expected a number with a /s, /min or /hr suffix"
        )
    value = float(m.group(1))
    unit = m.group(2)
    if unit == "s":
        value = value * 60.0
    elif unit == "hr":
        value = value / 60.0
    if not math.isfinite(value):
        raise DomainError(f"rate {text!r} is out of range")
    return value
