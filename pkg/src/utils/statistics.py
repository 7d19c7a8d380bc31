#!/usr/bin/env python3
"""
Statistics Collector Module

Run bookkeeping shared by the experiment runner and the self-test: integer
counters that go into report.json, a per-item log and session timing. Only
the counters are part of a report; timing lives next to them so reruns
compare equal once the wall clock is dropped.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger(__name__)


@dataclass
class RunStatistics:
    """Counters of one run. Every int field is a counter."""
    items_processed: int = 0
    items_failed: int = 0
    criteria_passed: int = 0
    criteria_failed: int = 0
    artifacts_written: int = 0
    start_time: Optional[datetime] = field(default_factory=datetime.now)
    end_time: Optional[datetime] = None

    @classmethod
    def counter_names(cls) -> List[str]:
        return [f.name for f in fields(cls) if f.type in (int, 'int')]

    def counters(self) -> Dict[str, int]:
        return {name: getattr(self, name) for name in self.counter_names()}


@dataclass
class ItemRecord:
    """A family member, atom, criterion or other unit of work."""
    label: str
    success: bool
    error: Optional[str] = None


class StatisticsCollector:
    """
    Collects counters and the item log of the current run.

    ``reset`` starts over; ``start_session``/``end_session`` bracket the
    timed part.
    """

    def __init__(self):
        self.stats = RunStatistics()
        self.items: List[ItemRecord] = []

    def reset(self):
        self.stats = RunStatistics()
        self.items = []

    def start_session(self):
        self.stats.start_time = datetime.now()
        self.stats.end_time = None

    def end_session(self):
        self.stats.end_time = datetime.now()

    def increment(self, counter: str, amount: int = 1):
        """Add to a counter; unknown names are logged and ignored."""
        if counter not in RunStatistics.counter_names():
            logger.warning(f"Unknown counter: {counter}")
            return
        setattr(self.stats, counter, getattr(self.stats, counter) + amount)

    def record_item(self, label: str, success: bool, error: Optional[str] = None):
        """Log one unit of work and count it as processed or failed."""
        self.items.append(ItemRecord(label, success, error))
        self.increment('items_processed' if success else 'items_failed')
        if not success:
            logger.debug(f"Item failed: {label}" + (f" ({error})" if error else ""))

    def get_duration(self) -> Optional[float]:
        """Seconds between start and end of the session, None while it runs."""
        if self.stats.start_time is None or self.stats.end_time is None:
            return None
        return (self.stats.end_time - self.stats.start_time).total_seconds()

    def get_counters(self) -> Dict[str, int]:
        return self.stats.counters()

    def failed_items(self) -> List[str]:
        return [item.label for item in self.items if not item.success]

    def get_summary(self) -> Dict[str, Any]:
        start, end = self.stats.start_time, self.stats.end_time
        return {
            'counters': self.get_counters(),
            'timing': {
                'start_time': start.isoformat() if start else None,
                'end_time': end.isoformat() if end else None,
                'duration_seconds': self.get_duration(),
            },
            'failed_items': self.failed_items(),
        }

    def export_log(self, file_path: Union[str, Path]):
        """Write the summary and the item log as JSON."""
        payload = {'summary': self.get_summary(), 'items': [asdict(item) for item in self.items]}
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2, default=str)
        logger.info(f"Statistics exported to {file_path}")
