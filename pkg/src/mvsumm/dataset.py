"""Frame-feature ingestion, manifests and global frame indexing.

Feature files come in two flavours:

* CSV with a header line ``frame_id,f0,f1,...``; one frame per row.
* Raw binary: an 16-byte header (8-byte magic ``MVSFEAT\\0``, uint32 D,
  uint32 N, both little-endian) followed by ``D * N`` little-endian float64
  values stored frame by frame (i.e. the D x N matrix in column-major order).
  Frame ids default to ``0..N-1`` unless the manifest lists them.

Events files are CSV with header ``event_id,view_id,start_frame,end_frame``;
``view_id`` may be ``*`` to match any view. Several rows may share an
``event_id`` (one interval per view).
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError

ANY_VIEW = -1

BINARY_MAGIC = b"MVSFEAT\x00"
_HEADER = struct.Struct("<8sII")


@dataclass(frozen=True)
class FeatureMatrix:
    """Descriptors of one view, one column per frame."""

    view_id: int
    data: np.ndarray  # D x N_k
    frame_ids: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DataError(f"view {self.view_id}: feature matrix must be D x N with D, N >= 1, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DataError(f"view {self.view_id}: non-finite feature values")
        zero = np.flatnonzero(~np.any(data != 0.0, axis=0))
        if zero.size:
            raise DataError(f"view {self.view_id}: all-zero descriptor at column(s) {zero.tolist()}")
        ids = np.asarray(self.frame_ids, dtype=np.int64)
        if ids.shape != (data.shape[1],):
            raise DataError(f"view {self.view_id}: {ids.size} frame ids for {data.shape[1]} frames")
        if ids.size > 1 and np.any(np.diff(ids) <= 0):
            raise DataError(f"view {self.view_id}: frame ids must be strictly increasing")
        data.flags.writeable = False
        ids.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "frame_ids", ids)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    def normalized(self) -> "FeatureMatrix":
        """Copy with every column scaled to unit l2 norm."""
        return FeatureMatrix(self.view_id, self.data / np.linalg.norm(self.data, axis=0), self.frame_ids)


@dataclass(frozen=True)
class GroundTruthEvent:
    event_id: int
    view_id: int  # ANY_VIEW matches every view
    start_frame: int
    end_frame: int

    def __post_init__(self):
        if self.start_frame > self.end_frame:
            raise DataError(f"event {self.event_id}: start {self.start_frame} > end {self.end_frame}")

    def admits(self, view_id: int, frame_id: int) -> bool:
        if self.view_id != ANY_VIEW and self.view_id != view_id:
            return False
        return self.start_frame <= frame_id <= self.end_frame


@dataclass(frozen=True)
class GlobalIndexMap:
    """Cumulative frame offsets; ``offsets[k]`` is the first global index of view k."""

    offsets: tuple

    def __post_init__(self):
        offs = tuple(int(o) for o in self.offsets)
        if len(offs) < 2 or offs[0] != 0 or any(b <= a for a, b in zip(offs, offs[1:])):
            raise DataError(f"invalid offsets {offs}")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "GlobalIndexMap":
        return cls(tuple(np.concatenate([[0], np.cumsum(sizes)]).tolist()))

    @property
    def n_views(self) -> int:
        return len(self.offsets) - 1

    @property
    def total(self) -> int:
        return self.offsets[-1]

    def size(self, view_id: int) -> int:
        return self.offsets[view_id + 1] - self.offsets[view_id]

    def block(self, view_id: int) -> slice:
        return slice(self.offsets[view_id], self.offsets[view_id + 1])

    def global_index(self, view_id: int, local_index: int) -> int:
        if not 0 <= view_id < self.n_views:
            raise IndexError(f"view {view_id} out of range [0, {self.n_views})")
        if not 0 <= local_index < self.size(view_id):
            raise IndexError(f"local index {local_index} out of range for view {view_id} (size {self.size(view_id)})")
        return self.offsets[view_id] + local_index

    def local_index(self, global_index: int) -> tuple[int, int]:
        """Inverse of :meth:`global_index`: returns ``(view_id, local_index)``."""
        if not 0 <= global_index < self.total:
            raise IndexError(f"global index {global_index} out of range [0, {self.total})")
        view = int(np.searchsorted(self.offsets, global_index, side="right")) - 1
        return view, global_index - self.offsets[view]


def global_index(index_map: GlobalIndexMap, view_id: int, local_index: int) -> int:
    return index_map.global_index(view_id, local_index)


@dataclass(frozen=True)
class MultiViewDataset:
    views: tuple
    events: tuple = ()
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        views = tuple(self.views)
        if not views:
            raise DataError("dataset needs at least one view")
        dims = {v.dim for v in views}
        if len(dims) != 1:
            raise DataError(f"dimension mismatch across views: {sorted(dims)}")
        for k, v in enumerate(views):
            if v.view_id != k:
                raise DataError(f"view at position {k} has view_id {v.view_id}")
        events = tuple(self.events)
        for e in events:
            targets = views if e.view_id == ANY_VIEW else None
            if targets is None:
                if not 0 <= e.view_id < len(views):
                    raise DataError(f"event {e.event_id} refers to unknown view {e.view_id}")
                targets = (views[e.view_id],)
            lo = min(int(v.frame_ids[0]) for v in targets)
            hi = max(int(v.frame_ids[-1]) for v in targets)
            if e.start_frame < lo or e.end_frame > hi:
                raise DataError(f"event {e.event_id} interval [{e.start_frame}, {e.end_frame}] outside frames [{lo}, {hi}]")
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "events", events)

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def dim(self) -> int:
        return self.views[0].dim

    @property
    def total_frames(self) -> int:
        return sum(v.n_frames for v in self.views)

    @property
    def index_map(self) -> GlobalIndexMap:
        return GlobalIndexMap.from_sizes([v.n_frames for v in self.views])

    def frame_id(self, global_index: int) -> int:
        view, local = self.index_map.local_index(global_index)
        return int(self.views[view].frame_ids[local])


# -- feature files ------------------------------------------------------------

def read_features_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(data, frame_ids)`` with ``data`` shaped D x N."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty feature file") from None
        if not header or header[0].strip() != "frame_id" or len(header) < 2:
            raise DataError(f"{path}: header must start with 'frame_id' followed by feature columns")
        ids, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                ids.append(int(row[0]))
                rows.append([float(x) for x in row[1:]])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: no frames")
    return np.array(rows, dtype=np.float64).T.copy(), np.array(ids, dtype=np.int64)


def write_features_csv(path, data: np.ndarray, frame_ids=None) -> None:
    data = np.asarray(data, dtype=np.float64)
    D, N = data.shape
    ids = np.arange(N) if frame_ids is None else frame_ids
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame_id"] + [f"f{i}" for i in range(D)])
        for j in range(N):
            w.writerow([int(ids[j])] + [repr(float(x)) for x in data[:, j]])


def read_matrix_binary(path) -> np.ndarray:
    """Read a D x N float64 matrix from the binary format."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise DataError(f"{path}: truncated header")
    magic, D, N = _HEADER.unpack_from(raw)
    if magic != BINARY_MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 8 * D * N
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes for {D}x{N}, got {len(raw)}")
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return flat.reshape(N, D).T.astype(np.float64)


def write_matrix_binary(path, data: np.ndarray) -> None:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    D, N = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, D, N))
        fh.write(np.ascontiguousarray(data.T, dtype="<f8").tobytes())


def read_features(path, frame_ids=None) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"feature file not found: {path}")
    if path.suffix.lower() == ".csv":
        data, ids = read_features_csv(path)
        if frame_ids is not None:
            raise DataError(f"{path}: CSV features carry their own frame ids")
        return data, ids
    data = read_matrix_binary(path)
    ids = np.arange(data.shape[1]) if frame_ids is None else np.asarray(frame_ids, dtype=np.int64)
    return data, ids


# -- events ---------------------------------------------------------------------

def read_events(path) -> list[GroundTruthEvent]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"events file not found: {path}")
    events = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"event_id", "view_id", "start_frame", "end_frame"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DataError(f"{path}: header must contain {sorted(need)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                view = row["view_id"].strip()
                events.append(GroundTruthEvent(
                    event_id=int(row["event_id"]),
                    view_id=ANY_VIEW if view in ("*", "any") else int(view),
                    start_frame=int(row["start_frame"]),
                    end_frame=int(row["end_frame"]),
                ))
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return events


def write_events(path, events: Sequence[GroundTruthEvent]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["event_id", "view_id", "start_frame", "end_frame"])
        for e in events:
            w.writerow([e.event_id, "*" if e.view_id == ANY_VIEW else e.view_id, e.start_frame, e.end_frame])


# -- manifests ------------------------------------------------------------------

def load_dataset(manifest_path, normalize: bool | None = None) -> MultiViewDataset:
    """Load and validate a dataset described by a JSON manifest.

    The manifest looks like::

        {"name": "office",
         "views": [{"features": "view0.csv"}, {"features": "view1.bin", "frame_ids": [...]}],
         "events": "events.csv",
         "normalize": true,
         "params": {"dim": 4, "gamma": 5.0}}

    Paths are resolved relative to the manifest. ``normalize`` (default on)
    rescales every descriptor to unit l2 norm; the argument overrides the
    manifest setting.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{manifest_path}: malformed manifest: {exc}") from None
    if not isinstance(manifest, dict) or not isinstance(manifest.get("views"), list) or not manifest["views"]:
        raise DataError(f"{manifest_path}: manifest needs a non-empty 'views' list")

    root = manifest_path.parent
    if normalize is None:
        normalize = bool(manifest.get("normalize", True))
    views = []
    for k, entry in enumerate(manifest["views"]):
        if isinstance(entry, str):
            entry = {"features": entry}
        if not isinstance(entry, dict) or "features" not in entry:
            raise DataError(f"{manifest_path}: view {k} lacks a 'features' path")
        data, ids = read_features(root / entry["features"], entry.get("frame_ids"))
        fm = FeatureMatrix(k, data, ids)
        views.append(fm.normalized() if normalize else fm)

    events = []
    if manifest.get("events"):
        events = read_events(root / manifest["events"])
    params = manifest.get("params", {})
    if not isinstance(params, dict):
        raise DataError(f"{manifest_path}: 'params' must be an object")
    return MultiViewDataset(tuple(views), tuple(events), name=str(manifest.get("name", "")), params=params)


def write_dataset(directory, views: Sequence[np.ndarray], events: Sequence[GroundTruthEvent] = (),
                  name: str = "", params: dict | None = None, fmt: str = "csv",
                  extra: dict | None = None) -> Path:
    """Write feature files, events and a manifest; return the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, data in enumerate(views):
        if fmt == "csv":
            fname = f"view{k}.csv"
            write_features_csv(directory / fname, data)
        elif fmt == "bin":
            fname = f"view{k}.bin"
            write_matrix_binary(directory / fname, data)
        else:
            raise ValueError(f"unknown feature format {fmt!r}")
        entries.append({"features": fname})
    manifest = {"name": name, "views": entries, "normalize": True}
    if events:
        write_events(directory / "events.csv", events)
        manifest["events"] = "events.csv"
    manifest["params"] = dict(params or {})
    if extra:
        manifest.update(extra)
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
