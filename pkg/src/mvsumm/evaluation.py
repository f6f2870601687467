"""Event-level precision / recall / F-measure of a summary."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .dataset import GroundTruthEvent


@dataclass(frozen=True)
class EvalResult:
    precision: float
    recall: float
    f_measure: float
    detected_events: frozenset
    matched_reps: frozenset
    n_events: int
    n_entries: int

    def table_row(self) -> str:
        """``P / R / F`` in percent, formatted like a results table row."""
        return f"{100 * self.precision:.0f} / {100 * self.recall:.0f} / {100 * self.f_measure:.2f}"


def f_measure(precision: float, recall: float) -> float:
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def match_events(summary, events: Sequence[GroundTruthEvent]) -> tuple[frozenset, frozenset]:
    """An event is detected when some representative falls inside its interval.

    Intervals are inclusive, compared against source frame ids, and restricted
    to the event's view unless it is an any-view event. Returns the set of
    detected event ids and the set of global indices of matching entries.
    """
    detected, matched = set(), set()
    for entry in summary.entries:
        for ev in events:
            if ev.admits(entry.view_id, entry.frame_id):
                detected.add(ev.event_id)
                matched.add(entry.global_index)
    return frozenset(detected), frozenset(matched)


def score(summary, events: Sequence[GroundTruthEvent]) -> EvalResult:
    """Precision over summary entries, recall over distinct event ids."""
    detected, matched = match_events(summary, events)
    n_entries = len({e.global_index for e in summary.entries})
    n_events = len({ev.event_id for ev in events})
    precision = len(matched) / n_entries if n_entries else 0.0
    recall = len(detected) / n_events if n_events else 0.0
    return EvalResult(precision, recall, f_measure(precision, recall), detected, matched, n_events, n_entries)


def write_scores(path, result: EvalResult, events: Sequence[GroundTruthEvent]) -> None:
    ids = sorted({ev.event_id for ev in events})
    doc = {
        "precision": result.precision,
        "recall": result.recall,
        "f_measure": result.f_measure,
        "table_row": result.table_row(),
        "events": [{"event_id": i, "detected": i in result.detected_events} for i in ids],
        "matched_global_indices": sorted(result.matched_reps),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
