"""Timestamp helpers for run manifests.

All run timestamps are timezone-aware UTC and serialized as ISO-8601.
"""

from datetime import datetime, timezone
from typing import Optional

UTC_TZ = timezone.utc


def now() -> datetime:
    """Get current datetime in UTC (aware)."""
    return datetime.now(UTC_TZ)


def isoformat(dt: Optional[datetime] = None) -> str:
    """Format a datetime as ISO-8601 UTC; naive datetimes are treated as UTC.

    Args:
        dt: Datetime to format (defaults to now)

    Returns:
        str: e.g. '2024-05-01T12:00:00+00:00'
    """
    if dt is None:
        dt = now()
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC_TZ)
    return dt.astimezone(UTC_TZ).isoformat(timespec='seconds')
