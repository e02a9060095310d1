"""Exact k-nearest-neighbor search under cosine and CSLS scores.

CSLS(x, y) = 2 cos(x, y) - r_T(x) - r_S(y), where r_T(x) is the query's
mean cosine to its csls_k nearest target rows and r_S(y) is the cached
density of target y. Densities are computed against a registered source
space when one is given, otherwise against the target space itself with
self-similarity excluded. Penalizing dense neighborhoods this way keeps
hub vectors from dominating nearest-neighbor retrieval.

Search is exact brute force. Ties are broken by ascending vocabulary
index, so results are reproducible. Batch entry points may fan work out
over a thread pool (size capped by the MEEMI_THREADS environment
variable, 0 or unset = auto) and always return results in input order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSpace, normalize_unit

DEFAULT_CSLS_K = 10


@dataclass
class RetrievalIndex:
    """A queryable view of a target space: unit rows plus CSLS densities."""

    space: EmbeddingSpace
    csls_k: int
    csls_density: np.ndarray

    def __post_init__(self):
        density = np.ascontiguousarray(self.csls_density, dtype=np.float64)
        if density.shape != (len(self.space),):
            raise ValueError("density vector must have one entry per vocabulary row")
        if density.size and (density.min() < -1.0 - 1e-9 or density.max() > 1.0 + 1e-9):
            raise ValueError("densities must lie in [-1, 1]")
        density.setflags(write=False)
        self.csls_density = density

    def __len__(self) -> int:
        return len(self.space)


def worker_count() -> int:
    """Thread-pool size for batch queries; MEEMI_THREADS caps it, 0 = auto."""
    raw = os.environ.get("MEEMI_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, min(n, 64))


def _unit_rows(matrix: np.ndarray, what: str) -> np.ndarray:
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    if (norms == 0.0).any():
        raise ValueError(f"zero {what} vector cannot be scored by cosine")
    return matrix / norms[:, None]


def _chunked_matmul(queries: np.ndarray, target_t: np.ndarray, threads: int | None = None) -> np.ndarray:
    """queries @ target_t with row chunks spread over a thread pool."""
    m = queries.shape[0]
    out = np.empty((m, target_t.shape[1]), dtype=np.float64)
    threads = worker_count() if threads is None else max(1, threads)
    chunk = max(1, min(1024, -(-m // threads)))
    spans = [(start, min(start + chunk, m)) for start in range(0, m, chunk)]
    if threads == 1 or len(spans) == 1:
        for start, stop in spans:
            np.dot(queries[start:stop], target_t, out=out[start:stop])
        return out
    def work(span):
        start, stop = span
        np.dot(queries[start:stop], target_t, out=out[start:stop])
    with ThreadPoolExecutor(max_workers=min(threads, len(spans))) as pool:
        list(pool.map(work, spans))
    return out


def _stable_topk(scores: np.ndarray, k: int) -> np.ndarray:
    """Top-k indexes per row, descending score, ties to the lower index."""
    order = np.argsort(-scores, axis=1, kind="stable")
    return order[:, :k]


def _mean_topk(scores: np.ndarray, k: int) -> np.ndarray:
    """Row-wise mean of the k largest scores."""
    if k >= scores.shape[1]:
        return scores.mean(axis=1)
    top = np.partition(scores, scores.shape[1] - k, axis=1)[:, -k:]
    return top.mean(axis=1)


def build_index(
    space: EmbeddingSpace, csls_k: int = DEFAULT_CSLS_K, source_space: EmbeddingSpace | None = None
) -> RetrievalIndex:
    """Normalize a target space and precompute its CSLS densities.

    The density of a target row is its mean cosine to its csls_k nearest
    rows of ``source_space`` when given, else of the target space itself
    (excluding the row's own self-similarity).
    """
    if len(space) == 0:
        raise ValueError("cannot index an empty space")
    if csls_k < 1:
        raise ValueError(f"csls_k must be positive, got {csls_k}")
    if csls_k >= len(space):
        raise ValueError(f"csls_k={csls_k} must be smaller than the vocabulary ({len(space)})")
    unit = normalize_unit(space)
    if source_space is not None:
        if source_space.dim != space.dim:
            raise ValueError("source space dimension does not match the indexed space")
        if csls_k > len(source_space):
            raise ValueError("csls_k exceeds the registered source vocabulary")
        other = _unit_rows(source_space.matrix, "source")
        density = np.empty(len(space), dtype=np.float64)
        for start in range(0, len(space), 1024):
            stop = min(start + 1024, len(space))
            sims = unit.matrix[start:stop] @ other.T
            density[start:stop] = _mean_topk(sims, csls_k)
    else:
        density = np.empty(len(space), dtype=np.float64)
        for start in range(0, len(space), 1024):
            stop = min(start + 1024, len(space))
            sims = unit.matrix[start:stop] @ unit.matrix.T
            sims[np.arange(stop - start), np.arange(start, stop)] = -np.inf
            density[start:stop] = _mean_topk(sims, csls_k)
    return RetrievalIndex(unit, csls_k, density)


def batch_cosine_topk(
    space: EmbeddingSpace, queries: np.ndarray, k: int, threads: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Top-k cosine neighbors for every query row; returns (indexes, scores)."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    k = min(k, len(space))
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if queries.shape[1] != space.dim:
        raise ValueError(f"query dimension {queries.shape[1]} != space dimension {space.dim}")
    unit = normalize_unit(space)
    q = _unit_rows(queries, "query")
    scores = _chunked_matmul(q, unit.matrix.T, threads)
    idx = _stable_topk(scores, k)
    return idx, np.take_along_axis(scores, idx, axis=1)


def batch_csls_topk(
    index: RetrievalIndex,
    queries: np.ndarray,
    k: int,
    query_density: np.ndarray | None = None,
    threads: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Top-k CSLS neighbors for every query row; returns (indexes, scores).

    ``query_density`` overrides r_T per query; by default it is computed
    here as the mean cosine of each query to its csls_k nearest index rows.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    k = min(k, len(index))
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if queries.shape[1] != index.space.dim:
        raise ValueError(f"query dimension {queries.shape[1]} != index dimension {index.space.dim}")
    q = _unit_rows(queries, "query")
    cos = _chunked_matmul(q, index.space.matrix.T, threads)
    if query_density is None:
        r_query = _mean_topk(cos, index.csls_k)
    else:
        r_query = np.broadcast_to(
            np.asarray(query_density, dtype=np.float64), (queries.shape[0],)
        )
    scores = 2.0 * cos - r_query[:, None] - index.csls_density[None, :]
    idx = _stable_topk(scores, k)
    return idx, np.take_along_axis(scores, idx, axis=1)


def knn_cosine(index: RetrievalIndex, query: np.ndarray, k: int) -> list[tuple[str, float]]:
    """Ranked (token, cosine) list of the k nearest rows to one query."""
    idx, scores = batch_cosine_topk(index.space, query, k, threads=1)
    return [(index.space.vocab[i], float(s)) for i, s in zip(idx[0], scores[0])]


def knn_csls(
    index: RetrievalIndex, query: np.ndarray, query_density: float | None = None, k: int = 1
) -> list[tuple[str, float]]:
    """Ranked (token, CSLS score) list of the k best rows for one query."""
    density = None if query_density is None else np.array([query_density])
    idx, scores = batch_csls_topk(index, query, k, query_density=density, threads=1)
    return [(index.space.vocab[i], float(s)) for i, s in zip(idx[0], scores[0])]
