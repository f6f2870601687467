"""Representative selection on the embedding and ranked, truncatable summaries."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse.csgraph

from .dataset import GlobalIndexMap
from .errors import DataError
from .solvers import AdmmConfig, SolveReport, solve_l21

THRESHOLD_REL = 0.01
LINK_REL = 0.25
SUMMARY_FIELDS = ("rank", "view_id", "frame_id", "local_index", "global_index", "importance")


@dataclass(frozen=True)
class RepresentativeSet:
    """``rows`` holds ``(global_index, importance)`` by decreasing importance.

    After :func:`group_representatives`, ``members[i]`` lists the global
    indices of every representative folded into row i.
    """

    rows: tuple
    members: tuple | None = None

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class SummaryEntry:
    rank: int
    view_id: int
    frame_id: int
    local_index: int
    global_index: int
    importance: float


@dataclass(frozen=True)
class Summary:
    entries: tuple
    requested_length: int

    def __len__(self):
        return len(self.entries)


def select(Y, cfg: AdmmConfig | None = None) -> tuple[np.ndarray, SolveReport]:
    """Row-sparse self-representation of the embedded frames.

    ``Y`` is an :class:`~mvsumm.embedding.Embedding` or an N x d array with
    one embedded frame per row. Frames embedded exactly at the origin can
    neither represent nor be represented usefully; their rows and columns of
    ``Z`` are left at zero.
    """
    Y = np.asarray(getattr(Y, "Y", Y), dtype=np.float64)
    N = Y.shape[0]
    if N < 2:
        raise DataError("selection needs at least two frames")
    live = np.flatnonzero(np.any(Y != 0.0, axis=1))
    if live.size == N:
        return solve_l21(Y.T, cfg, zero_diag=True)
    if live.size < 2:
        raise DataError(f"only {live.size} frame(s) have a nonzero embedding")
    Z_live, report = solve_l21(Y[live].T, cfg, zero_diag=True)
    Z = np.zeros((N, N))
    Z[np.ix_(live, live)] = Z_live
    return Z, report


def rank(Z, threshold_rel: float = THRESHOLD_REL, index_map: GlobalIndexMap | None = None) -> RepresentativeSet:
    """Rows of ``Z`` whose l2 norm exceeds ``threshold_rel`` times the largest.

    Sorted by norm, largest first; equal norms go by ascending global index.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if index_map is not None and index_map.total != Z.shape[0]:
        raise DataError(f"Z has {Z.shape[0]} rows but the index map covers {index_map.total} frames")
    norms = np.linalg.norm(Z, axis=1)
    top = float(norms.max()) if norms.size else 0.0
    if top == 0.0:
        return RepresentativeSet(())
    keep = np.flatnonzero(norms > threshold_rel * top)
    order = keep[np.lexsort((keep, -norms[keep]))]
    return RepresentativeSet(tuple((int(i), float(norms[i])) for i in order))


def group_representatives(reps: RepresentativeSet, Z, link_rel: float = LINK_REL) -> RepresentativeSet:
    """Fold representatives that reconstruct one another into a single entry.

    The zero-diagonal constraint means a dominant representative must itself
    be reconstructed by another frame, usually one from the same event, which
    then also gets a nonzero row. Representatives a and b are linked when
    ``|Z[a, b]|`` is at least ``link_rel`` times the largest coefficient any
    representative contributes to frame b (or the same with a and b
    swapped). Each connected group is reported once, by its highest-ranked
    member, so the list keeps its importance order.
    """
    if not reps.rows:
        return RepresentativeSet((), ())
    Z = np.asarray(Z, dtype=np.float64)
    idx = np.array([g for g, _ in reps.rows])
    B = np.abs(Z[np.ix_(idx, idx)])
    col_max = B.max(axis=0)
    links = (B > 0) & (B >= link_rel * col_max[None, :])
    _, labels = scipy.sparse.csgraph.connected_components(links | links.T, directed=False)
    leaders, members = {}, {}
    for (g, importance), label in zip(reps.rows, labels):
        if label not in leaders:
            leaders[label] = (g, importance)
            members[label] = []
        members[label].append(g)
    # dicts keep insertion order, which is rank order
    return RepresentativeSet(tuple(leaders.values()), tuple(tuple(m) for m in members.values()))


def summarize(reps: RepresentativeSet, length: int, index_map: GlobalIndexMap,
              frame_ids: Sequence | None = None) -> Summary:
    """The ``length`` highest-ranked representatives.

    ``frame_ids[k]`` maps local indices of view k to source frame ids; when
    omitted, frame id and local index coincide.
    """
    if length < 1:
        raise ValueError(f"summary length must be >= 1, got {length}")
    entries = []
    for r, (g, importance) in enumerate(reps.rows[:length], start=1):
        view, local = index_map.local_index(g)
        fid = int(frame_ids[view][local]) if frame_ids is not None else local
        entries.append(SummaryEntry(r, view, fid, local, g, importance))
    return Summary(tuple(entries), int(length))


# -- serialization --------------------------------------------------------------

def write_summary_csv(path, summary: Summary) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for e in summary.entries:
            w.writerow([e.rank, e.view_id, e.frame_id, e.local_index, e.global_index, repr(e.importance)])


def write_summary_json(path, summary: Summary) -> None:
    doc = {
        "requested_length": summary.requested_length,
        "entries": [{f: getattr(e, f) for f in SUMMARY_FIELDS} for e in summary.entries],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_summary(path) -> Summary:
    """Read a summary written by :func:`write_summary_csv` or :func:`write_summary_json`."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"summary file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            doc = json.loads(path.read_text())
            rows = doc["entries"]
            requested = int(doc.get("requested_length", len(rows)))
        else:
            with open(path, newline="") as fh:
                reader = csv.DictReader(fh)
                if reader.fieldnames is None or not set(SUMMARY_FIELDS) <= set(reader.fieldnames):
                    raise DataError(f"{path}: header must contain {list(SUMMARY_FIELDS)}")
                rows = list(reader)
            requested = len(rows)
        entries = tuple(
            SummaryEntry(int(r["rank"]), int(r["view_id"]), int(r["frame_id"]), int(r["local_index"]),
                         int(r["global_index"]), float(r["importance"]))
            for r in rows
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: malformed summary: {exc}") from None
    return Summary(entries, max(requested, 1))
