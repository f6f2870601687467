# 03_laplacian_embedding.py
#
# Frames are placed in a low-dimensional space where strongly similar frames
# sit close together, by solving L y = lambda D y on the similarity graph.
import numpy as np

from mvsumm.dataset import MultiViewDataset
from mvsumm.embedding import build_laplacian, embed, embedding_objective
from mvsumm.similarity import build_graph
from mvsumm.synth import SynthSpec, generate

np.set_printoptions(precision=3, suppress=True)

raw, _ = generate(SynthSpec(n_views=2, n_events=3, noise_sigma=0.02, seed=3))
dataset = MultiViewDataset(tuple(v.normalized() for v in raw.views))
graph, _ = build_graph(dataset)
pair = build_laplacian(graph)

emb = embed(pair, d=4)
print("connected components:", emb.n_components)
print("eigenvalues kept:", emb.eigenvalues)

# The constraint Y^T D Y = I and the objective identity.
print("max |Y'DY - I|:", np.abs(emb.Y.T @ pair.D @ emb.Y - np.eye(4)).max())
print("objective / 2:", embedding_objective(emb, pair) / 2, " sum of eigenvalues:", emb.eigenvalues.sum())

# Frames of one event land near each other: how often is a frame's nearest
# embedded neighbour from the same event?
labels = np.tile(np.repeat(np.arange(3), 5), 2)
dist = np.linalg.norm(emb.Y[:, None] - emb.Y[None, :], axis=-1)
np.fill_diagonal(dist, np.inf)
agree = np.mean(labels[np.argmin(dist, axis=1)] == labels)
print(f"nearest neighbour shares the event for {100 * agree:.0f}% of frames")
