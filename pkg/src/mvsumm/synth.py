"""Synthetic multi-view datasets with planted events, and reference solvers.

Every event is a low-dimensional linear subspace shared by all views; each
view draws a run of frames from every event subspace in turn. The reference
solvers use accelerated proximal gradient (FISTA with restart), a different
algorithm family from the ADMM solvers they are used to check.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dataset import FeatureMatrix, GroundTruthEvent, MultiViewDataset, write_dataset
from .errors import DataError
from .solvers import l1_objective, l21_objective, shrink_rows, shrink_scalar


@dataclass(frozen=True)
class SynthSpec:
    n_views: int = 2
    n_events: int = 3
    subspace_dim: int = 2
    frames_per_event: tuple = (5,)  # one count for all views, or one per view
    ambient_dim: int = 20
    noise_sigma: float = 0.0
    orthogonal: bool = True
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        fpe = self.frames_per_event
        fpe = (int(fpe),) if np.ndim(fpe) == 0 else tuple(int(x) for x in fpe)
        object.__setattr__(self, "frames_per_event", fpe)
        if self.n_views < 1 or self.n_events < 1:
            raise DataError("need at least one view and one event")
        if len(fpe) not in (1, self.n_views) or min(fpe) < 1:
            raise DataError(f"frames_per_event must be one positive count or one per view, got {fpe}")
        if not 1 <= self.subspace_dim < self.ambient_dim:
            raise DataError(f"subspace dim {self.subspace_dim} must be in [1, ambient dim {self.ambient_dim})")
        if self.orthogonal and self.n_events * self.subspace_dim > self.ambient_dim:
            raise DataError(
                f"{self.n_events} orthogonal subspaces of dim {self.subspace_dim} "
                f"do not fit in dimension {self.ambient_dim}"
            )
        if self.noise_sigma < 0:
            raise DataError("noise_sigma must be >= 0")

    def frames_for(self, view: int) -> int:
        return self.frames_per_event[0] if len(self.frames_per_event) == 1 else self.frames_per_event[view]

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise DataError(f"unknown synth spec keys: {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["frames_per_event"] = list(self.frames_per_event)
        return d


def generate(spec: SynthSpec) -> tuple[MultiViewDataset, list[GroundTruthEvent]]:
    """Draw a dataset; features are returned raw (not column-normalized)."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    D, r, E = spec.ambient_dim, spec.subspace_dim, spec.n_events
    if spec.orthogonal:
        Q, _ = np.linalg.qr(rng.standard_normal((D, E * r)))
        bases = [Q[:, e * r:(e + 1) * r] for e in range(E)]
    else:
        bases = [np.linalg.qr(rng.standard_normal((D, r)))[0] for _ in range(E)]

    views, events = [], []
    for k in range(spec.n_views):
        n = spec.frames_for(k)
        cols = []
        for e in range(E):
            coeff = rng.standard_normal((r, n))
            X = bases[e] @ coeff
            if spec.noise_sigma > 0:
                X = X + spec.noise_sigma * rng.standard_normal((D, n))
            cols.append(X)
            events.append(GroundTruthEvent(e, k, e * n, (e + 1) * n - 1))
        data = np.hstack(cols)
        views.append(FeatureMatrix(k, data, np.arange(data.shape[1])))
    dataset = MultiViewDataset(tuple(views), tuple(events), name=f"synth-{spec.seed}", params=dict(spec.params))
    return dataset, events


def write_synth(spec: SynthSpec, directory, fmt: str = "csv") -> Path:
    """Generate and write a dataset; the spec (with seed) is echoed into the manifest."""
    dataset, events = generate(spec)
    return write_dataset(directory, [v.data for v in dataset.views], events, name=dataset.name,
                         params=spec.params, fmt=fmt, extra={"synth": spec.to_dict()})


def load_spec(path) -> SynthSpec:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"synth spec not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed spec: {exc}") from None
    if not isinstance(doc, dict):
        raise DataError(f"{path}: spec must be a JSON object")
    try:
        return SynthSpec.from_dict(doc)
    except TypeError as exc:
        raise DataError(f"{path}: {exc}") from None


# -- reference solvers ------------------------------------------------------------

def _fista(grad, prox, objective, x0, step, tol, max_iter):
    x = x0.copy()
    v = x0.copy()
    t = 1.0
    f_prev = objective(x)
    for _ in range(max_iter):
        x_new = prox(v - step * grad(v), step)
        f_new = objective(x_new)
        if f_new > f_prev + 1e-14 * max(1.0, abs(f_prev)):
            # adaptive restart keeps the sequence monotone; the slack stops
            # rounding noise near the optimum from restarting forever
            v, t = x.copy(), 1.0
            continue
        gap = np.max(np.abs(x_new - v)) / step
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        v = x_new + ((t - 1.0) / t_new) * (x_new - x)
        done = abs(f_prev - f_new) < tol * max(1.0, abs(f_new)) and gap < 1e-9
        x, f_prev, t = x_new, f_new, t_new
        if done:
            break
    return x


def reference_l21(Y, lam: float, zero_diag: bool = True, tol: float = 1e-10,
                  max_iter: int = 500_000) -> np.ndarray:
    """Minimize ``||Z||_{2,1} + lam/2 ||Y - YZ||_F^2`` by proximal gradient.

    Meant for small problems (N up to ~16) in tests.
    """
    Y = np.asarray(Y, dtype=np.float64)
    N = Y.shape[1]
    G = Y.T @ Y
    L = lam * float(np.linalg.eigvalsh(G)[-1])
    if L == 0.0:
        return np.zeros((N, N))

    def grad(Z):
        return lam * (G @ Z - G)

    def prox(V, step):
        V = V.copy()
        if zero_diag:
            np.fill_diagonal(V, 0.0)
        return shrink_rows(V, step)

    return _fista(grad, prox, lambda Z: l21_objective(Y, Z, lam), np.zeros((N, N)), 1.0 / L, tol, max_iter)


def reference_l1(X_dict, X_target, lam: float, zero_diag: bool = False, tol: float = 1e-10,
                 max_iter: int = 500_000) -> np.ndarray:
    """Minimize ``||C||_1 + lam/2 ||X_target - X_dict C||_F^2`` by proximal gradient."""
    X_dict = np.asarray(X_dict, dtype=np.float64)
    X_target = np.asarray(X_target, dtype=np.float64)
    G = X_dict.T @ X_dict
    H = X_dict.T @ X_target
    shape = (X_dict.shape[1], X_target.shape[1])
    L = lam * float(np.linalg.eigvalsh(G)[-1])
    if L == 0.0:
        return np.zeros(shape)

    def grad(C):
        return lam * (G @ C - H)

    def prox(V, step):
        V = shrink_scalar(V, step)
        if zero_diag:
            np.fill_diagonal(V, 0.0)
        return V

    return _fista(grad, prox, lambda C: l1_objective(X_dict, X_target, C, lam), np.zeros(shape), 1.0 / L,
                  tol, max_iter)
