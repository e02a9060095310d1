"""Evaluation metrics: dictionary induction P@k, word-similarity
correlations, and hypernym-discovery MRR / MAP / P@k.

Every metric is cosine-based, so all reports are invariant under positive
uniform scaling of the embedding spaces. Per-query work is independent;
batch retrieval preserves input order, so aggregation is deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .alignment import AlignedPair
from .embeddings import EmbeddingSpace, lookup
from .lexicon import BilingualLexicon, HypernymDataset, SimilarityDataset
from .retrieval import batch_cosine_topk, batch_csls_topk, build_index
from .solvers import LinearMap, PairedData, fit_least_squares

log = logging.getLogger(__name__)

RETRIEVAL_MODES = ("cosine", "csls")
DEFAULT_HYPERNYM_K = 15


@dataclass
class EvalReport:
    """Named metric values with their provenance (task, dataset, retrieval)."""

    task: str
    dataset: str
    retrieval: str
    metrics: dict[str, float]
    resolved: int
    total: int

    def __post_init__(self):
        for name, value in self.metrics.items():
            if not np.isfinite(value):
                raise ValueError(f"metric {name} is not finite")

    def to_text(self) -> str:
        width = max(len(name) for name in self.metrics) if self.metrics else 0
        lines = [
            f"task        {self.task}",
            f"dataset     {self.dataset}",
            f"retrieval   {self.retrieval}",
            f"resolved    {self.resolved}/{self.total}",
        ]
        lines += [f"{name.ljust(width)}  {value:.4f}" for name, value in self.metrics.items()]
        return "\n".join(lines)

    def to_tsv(self) -> str:
        lines = [
            f"task\t{self.task}",
            f"dataset\t{self.dataset}",
            f"retrieval\t{self.retrieval}",
            f"resolved\t{self.resolved}",
            f"total\t{self.total}",
        ]
        lines += [f"{name}\t{value:.6f}" for name, value in self.metrics.items()]
        return "\n".join(lines)


def _check_retrieval(retrieval: str) -> None:
    if retrieval not in RETRIEVAL_MODES:
        raise ValueError(f"unknown retrieval mode {retrieval!r}; use 'cosine' or 'csls'")


def _topk_indexes(
    queries: np.ndarray,
    candidates: EmbeddingSpace,
    k: int,
    retrieval: str,
    csls_k: int,
    density_space: EmbeddingSpace | None = None,
) -> np.ndarray:
    if retrieval == "cosine":
        idx, _ = batch_cosine_topk(candidates, queries, k)
    else:
        index = build_index(candidates, csls_k, source_space=density_space)
        idx, _ = batch_csls_topk(index, queries, k)
    return idx


def eval_bli(
    aligned: AlignedPair,
    test_lexicon: BilingualLexicon,
    retrieval: str = "cosine",
    ks: tuple[int, ...] = (1, 5, 10),
    csls_k: int = 10,
    dataset: str = "",
) -> EvalReport:
    """Precision at k for dictionary induction.

    Each unique source token is one query; its gold set is every target
    listed for it. A query scores at k when any gold member appears in the
    top-k retrieved tokens. Queries whose source token or entire gold set
    is out of vocabulary are skipped and counted in the totals.
    """
    _check_retrieval(retrieval)
    if not ks or min(ks) < 1:
        raise ValueError("ks must be positive ranks")
    gold_tokens: dict[str, list[str]] = {}
    for s, t in test_lexicon.pairs:
        gold_tokens.setdefault(s, []).append(t)
    queries = []
    gold_sets = []
    for source, targets in gold_tokens.items():
        v = lookup(aligned.source, source)
        gold = {aligned.target.index_of(t) for t in targets}
        gold.discard(None)
        if v is None or not gold:
            continue
        queries.append(v)
        gold_sets.append(gold)
    total = len(gold_tokens)
    if not queries:
        raise ValueError("no evaluable dictionary query resolves in the aligned spaces")
    idx = _topk_indexes(
        np.vstack(queries), aligned.target, max(ks), retrieval, csls_k,
        density_space=aligned.source if retrieval == "csls" else None,
    )
    first_hit = np.full(len(queries), np.inf)
    for q, gold in enumerate(gold_sets):
        for rank, j in enumerate(idx[q]):
            if j in gold:
                first_hit[q] = rank
                break
    metrics = {f"P@{k}": float((first_hit < k).mean()) for k in ks}
    return EvalReport("bli", dataset, retrieval, metrics, len(queries), total)


def eval_similarity(
    space_a: EmbeddingSpace,
    space_b: EmbeddingSpace,
    dataset: SimilarityDataset,
    dataset_name: str = "",
) -> EvalReport:
    """Pearson and Spearman correlation of cosine scores against gold.

    Pass the same space twice for monolingual benchmarks. Spearman uses
    average ranks for ties. Triples with an unresolvable token are skipped
    and counted.
    """
    preds, golds = [], []
    for w1, w2, gold in dataset.triples:
        v1 = lookup(space_a, w1)
        v2 = lookup(space_b, w2)
        if v1 is None or v2 is None:
            continue
        n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
        if n1 == 0.0 or n2 == 0.0:
            continue
        preds.append(float(v1 @ v2 / (n1 * n2)))
        golds.append(gold)
    if len(preds) < 2:
        raise ValueError("need at least 2 resolvable triples for correlation")
    preds_arr, golds_arr = np.array(preds), np.array(golds)
    for name, series in (("predicted", preds_arr), ("gold", golds_arr)):
        if np.ptp(series) == 0.0:
            raise ValueError(f"{name} scores have zero variance; correlation is undefined")
    r = float(stats.pearsonr(golds_arr, preds_arr).statistic)
    rho = float(stats.spearmanr(golds_arr, preds_arr).statistic)
    metrics = {"pearson_r": r, "spearman_rho": rho}
    return EvalReport("similarity", dataset_name, "cosine", metrics, len(preds), len(dataset.triples))


def _joint_lookup(space: EmbeddingSpace | AlignedPair, token: str) -> np.ndarray | None:
    if isinstance(space, AlignedPair):
        v = lookup(space.source, token)
        return v if v is not None else lookup(space.target, token)
    return lookup(space, token)


def fit_hypernym_projection(
    space: EmbeddingSpace | AlignedPair, train: HypernymDataset
) -> LinearMap:
    """Least-squares map from hyponym vectors to their hypernym vectors.

    Each (query, gold) combination contributes one regression row, in
    dataset order. With an aligned pair, tokens are looked up in the
    source space first and then in the target space, so training pairs
    from either language can be mixed in one file.
    """
    inputs, targets = [], []
    for query, golds in train.entries:
        qv = _joint_lookup(space, query)
        if qv is None:
            continue
        for gold in golds:
            gv = _joint_lookup(space, gold)
            if gv is None:
                continue
            inputs.append(qv)
            targets.append(gv)
    if not inputs:
        raise ValueError("no training pair resolves in the embedding space")
    return fit_least_squares(PairedData(np.vstack(inputs), np.vstack(targets)))


def eval_hypernyms(
    space: EmbeddingSpace | AlignedPair,
    projection: LinearMap,
    test: HypernymDataset,
    k: int = DEFAULT_HYPERNYM_K,
    retrieval: str = "cosine",
    csls_k: int = 10,
    candidates: EmbeddingSpace | None = None,
    dataset_name: str = "",
) -> EvalReport:
    """MRR, MAP and P@5 over projected hypernym candidates.

    Candidates default to the target space of an aligned pair (or the
    single space itself) and never include the query token. Per query,
    the reciprocal rank is 1/rank of the first gold in the top-k list (0
    when absent), average precision is the mean precision over gold hits
    normalized by min(|gold|, k), and P@5 counts gold hits in the top 5
    against min(|gold|, 5).
    """
    _check_retrieval(retrieval)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if candidates is None:
        candidates = space.target if isinstance(space, AlignedPair) else space
    queries, gold_sets, tokens = [], [], []
    for query, golds in test.entries:
        qv = _joint_lookup(space, query)
        gold = {candidates.index_of(g) for g in golds}
        gold.discard(None)
        if qv is None or not gold:
            continue
        queries.append(qv)
        gold_sets.append(gold)
        tokens.append(query)
    if not queries:
        raise ValueError("no test query resolves in the embedding space")
    projected = np.vstack(queries) @ projection.matrix
    # one extra rank so dropping the query token itself still leaves k
    idx = _topk_indexes(projected, candidates, min(k + 1, len(candidates)), retrieval, csls_k)
    rr, ap, p5 = [], [], []
    for q, gold in enumerate(gold_sets):
        ranked = [j for j in idx[q] if candidates.vocab[j] != tokens[q]][:k]
        hits = [rank for rank, j in enumerate(ranked, start=1) if j in gold]
        rr.append(1.0 / hits[0] if hits else 0.0)
        precisions = [n / rank for n, rank in enumerate(hits, start=1)]
        ap.append((float(np.mean(precisions)) if hits else 0.0) / min(len(gold), k))
        top5_hits = sum(1 for rank in hits if rank <= 5)
        p5.append(top5_hits / min(len(gold), 5))
    metrics = {
        "MRR": float(np.mean(rr)),
        "MAP": float(np.mean(ap)),
        "P@5": float(np.mean(p5)),
    }
    return EvalReport("hypernym", dataset_name, retrieval, metrics, len(queries), len(test.entries))
