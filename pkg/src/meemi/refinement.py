"""Meeting-in-the-middle refinement of an aligned bilingual space.

For every dictionary pair (w, w') the midpoint mu = (v_w + v_w') / 2 is
the regression target: one unconstrained least-squares map sends source
vectors toward mu, a second one sends target vectors toward mu. Applied
to the whole vocabularies, the two maps pull each word and its
translation toward their average. Unlike the orthogonal alignment this
is not an isometry: monolingual structure is deliberately allowed to
change. Vectors are not re-normalized afterwards; downstream scoring is
cosine-based and absorbs scale.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .alignment import AlignedPair
from .embeddings import lookup
from .lexicon import BilingualLexicon
from .solvers import LinearMap, PairedData, apply_map, fit_least_squares, load_map, save_map

log = logging.getLogger(__name__)


@dataclass
class MeemiModel:
    """The two directional midpoint maps plus the training pair count."""

    map_src: LinearMap
    map_tgt: LinearMap
    train_pair_count: int

    def __post_init__(self):
        for m in (self.map_src, self.map_tgt):
            if m.d_in != m.d_out:
                raise ValueError("midpoint maps must be square")
            if m.orthogonal:
                raise ValueError("midpoint maps are unconstrained, not orthogonal")
        if self.map_src.d_in != self.map_tgt.d_in:
            raise ValueError("source and target maps must share one dimension")


class SimilarityShift(NamedTuple):
    mean_delta: float
    std_delta: float
    fraction_positive: float


def compute_averages(
    aligned: AlignedPair, lexicon: BilingualLexicon
) -> tuple[PairedData, PairedData]:
    """Midpoint regression rows for both directions, in lexicon order.

    Returns (source rows -> mu, target rows -> mu). Pairs with an
    out-of-vocabulary side are skipped and counted.
    """
    src_rows, tgt_rows = [], []
    skipped = 0
    for s, t in lexicon.pairs:
        v_s = lookup(aligned.source, s)
        v_t = lookup(aligned.target, t)
        if v_s is None or v_t is None:
            skipped += 1
            continue
        src_rows.append(v_s)
        tgt_rows.append(v_t)
    if not src_rows:
        raise ValueError("no lexicon pair resolves in the aligned spaces")
    if skipped:
        log.info("skipped %d lexicon pairs with out-of-vocabulary tokens", skipped)
    a = np.vstack(src_rows)
    b = np.vstack(tgt_rows)
    mu = (a + b) / 2.0
    return PairedData(a, mu), PairedData(b, mu)


def fit_meemi(aligned: AlignedPair, lexicon: BilingualLexicon) -> MeemiModel:
    """Fit the two independent least-squares maps toward the midpoints."""
    toward_mu_src, toward_mu_tgt = compute_averages(aligned, lexicon)
    return MeemiModel(
        map_src=fit_least_squares(toward_mu_src),
        map_tgt=fit_least_squares(toward_mu_tgt),
        train_pair_count=len(toward_mu_src),
    )


def apply_meemi(model: MeemiModel, aligned: AlignedPair) -> AlignedPair:
    """Map both full vocabularies through their midpoint maps."""
    return AlignedPair(
        source=apply_map(model.map_src, aligned.source),
        target=apply_map(model.map_tgt, aligned.target),
        map=aligned.map,
        iterations_run=aligned.iterations_run,
    )


def similarity_shift_report(
    before: AlignedPair, after: AlignedPair, lexicon: BilingualLexicon
) -> SimilarityShift:
    """Per-pair cosine deltas between two aligned states of the same data.

    Reports the mean and standard deviation of cos(after) - cos(before)
    over resolved pairs, and the fraction of pairs that moved closer.
    """
    deltas = []
    for s, t in lexicon.pairs:
        vecs = (
            lookup(before.source, s),
            lookup(before.target, t),
            lookup(after.source, s),
            lookup(after.target, t),
        )
        if any(v is None for v in vecs):
            continue
        b_s, b_t, a_s, a_t = vecs
        deltas.append(_cosine(a_s, a_t) - _cosine(b_s, b_t))
    if not deltas:
        raise ValueError("no lexicon pair resolves in both aligned states")
    deltas = np.array(deltas)
    return SimilarityShift(
        mean_delta=float(deltas.mean()),
        std_delta=float(deltas.std()),
        fraction_positive=float((deltas > 0).mean()),
    )


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


def save_meemi(model: MeemiModel, manifest_path) -> None:
    """Persist as two map files plus a 3-line manifest next to them."""
    manifest_path = os.fspath(manifest_path)
    stem, _ = os.path.splitext(manifest_path)
    src_path = stem + ".src.map"
    tgt_path = stem + ".tgt.map"
    save_map(model.map_src, src_path)
    save_map(model.map_tgt, tgt_path)
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(os.path.basename(src_path) + "\n")
        fh.write(os.path.basename(tgt_path) + "\n")
        fh.write(f"{model.train_pair_count}\n")


def load_meemi(manifest_path) -> MeemiModel:
    manifest_path = os.fspath(manifest_path)
    base = os.path.dirname(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if len(lines) != 3:
        raise ValueError(f"{manifest_path}: expected 3 manifest lines, found {len(lines)}")
    try:
        count = int(lines[2])
    except ValueError:
        raise ValueError(f"{manifest_path}:3: train pair count must be an integer") from None
    return MeemiModel(
        map_src=load_map(os.path.join(base, lines[0])),
        map_tgt=load_map(os.path.join(base, lines[1])),
        train_pair_count=count,
    )
