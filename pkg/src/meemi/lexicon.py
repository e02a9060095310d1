"""Bilingual dictionaries plus word-similarity and hypernym datasets.

All loaders read UTF-8 text, skip blank lines and ``#`` comments, and
report parse failures with the offending line number. Loaded datasets are
plain immutable-by-convention containers, safe for concurrent reads.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSpace, lookup

log = logging.getLogger(__name__)


@dataclass
class BilingualLexicon:
    """Ordered (source, target) translation pairs.

    Exact duplicates never occur; a source token may repeat with
    different targets.
    """

    pairs: list[tuple[str, str]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass
class SimilarityDataset:
    """(token A, token B, gold score) triples for correlation benchmarks."""

    triples: list[tuple[str, str, float]]

    def __len__(self) -> int:
        return len(self.triples)


@dataclass
class HypernymDataset:
    """Per-query gold hypernym lists, deduplicated, each nonempty."""

    entries: list[tuple[str, list[str]]]

    def __len__(self) -> int:
        return len(self.entries)


def _content_lines(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield line_no, line


def load_lexicon(path) -> BilingualLexicon:
    """Read a two-column dictionary; exact-duplicate pairs are dropped."""
    pairs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for line_no, line in _content_lines(path):
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"{path}:{line_no}: expected 'source target', got {len(fields)} fields")
        pair = (fields[0], fields[1])
        if pair in seen:
            continue
        seen.add(pair)
        pairs.append(pair)
    return BilingualLexicon(pairs)


def save_lexicon(lexicon: BilingualLexicon, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for src, tgt in lexicon.pairs:
            fh.write(f"{src}\t{tgt}\n")


def save_hypernyms(dataset: HypernymDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for query, golds in dataset.entries:
            fh.write(query + "\t" + "\t".join(golds) + "\n")


def resolve(
    lexicon: BilingualLexicon, src_space: EmbeddingSpace, tgt_space: EmbeddingSpace
) -> tuple[BilingualLexicon, float]:
    """Keep pairs whose two tokens both resolve; return them with coverage.

    Coverage is kept/total. Zero kept pairs is an error because nothing
    can be fitted from an empty lexicon.
    """
    if not lexicon.pairs:
        raise ValueError("cannot resolve an empty lexicon")
    kept = [
        (s, t)
        for s, t in lexicon.pairs
        if lookup(src_space, s) is not None and lookup(tgt_space, t) is not None
    ]
    if not kept:
        raise ValueError("no lexicon pair resolves against both vocabularies")
    return BilingualLexicon(kept), len(kept) / len(lexicon.pairs)


def load_similarity(path) -> SimilarityDataset:
    """Read three-column `w1 w2 score` similarity data."""
    triples: list[tuple[str, str, float]] = []
    for line_no, line in _content_lines(path):
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"{path}:{line_no}: expected 'w1 w2 score', got {len(fields)} fields")
        try:
            score = float(fields[2])
        except ValueError:
            raise ValueError(f"{path}:{line_no}: non-numeric score {fields[2]!r}") from None
        if not np.isfinite(score):
            raise ValueError(f"{path}:{line_no}: non-finite score")
        triples.append((fields[0], fields[1], score))
    return SimilarityDataset(triples)


def load_hypernyms(path) -> HypernymDataset:
    """Read tab-separated hypernym data: query first, then its gold hypernyms.

    Repeated queries (the two-column one-pair-per-line layout) are grouped
    into a single entry; gold lists keep first-seen order without duplicates.
    """
    order: list[str] = []
    golds: dict[str, list[str]] = {}
    for line_no, line in _content_lines(path):
        fields = [f.strip() for f in line.split("\t") if f.strip()]
        if len(fields) < 2:
            raise ValueError(f"{path}:{line_no}: expected 'query<TAB>hypernym...', got 1 field")
        query, hypernyms = fields[0], fields[1:]
        if query not in golds:
            golds[query] = []
            order.append(query)
        for h in hypernyms:
            if h not in golds[query]:
                golds[query].append(h)
    if not order:
        raise ValueError(f"{path}: no hypernym entries")
    return HypernymDataset([(q, golds[q]) for q in order])


def split_lexicon(
    lexicon: BilingualLexicon, n_train: int, seed: int
) -> tuple[BilingualLexicon, BilingualLexicon]:
    """Deterministic seeded train/test split with disjoint source tokens.

    All pairs sharing a source token land on the same side, so the train
    side may overshoot ``n_train`` by at most one group.
    """
    total = len(lexicon.pairs)
    if not 0 < n_train < total:
        raise ValueError(f"n_train must be in (0, {total}), got {n_train}")
    groups: dict[str, list[tuple[str, str]]] = {}
    for pair in lexicon.pairs:
        groups.setdefault(pair[0], []).append(pair)
    sources = list(groups)
    random.Random(seed).shuffle(sources)
    train: list[tuple[str, str]] = []
    test: list[tuple[str, str]] = []
    for source in sources:
        bucket = train if len(train) < n_train else test
        bucket.extend(groups[source])
    return BilingualLexicon(train), BilingualLexicon(test)
