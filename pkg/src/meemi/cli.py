"""Command-line front end: align, refine, induce, eval, inspect, fixture.

Exit codes: 0 success, 1 runtime or data error, 2 usage error. Every
command accepts ``--config FILE`` holding ``key=value`` lines that act as
flag defaults; flags given on the command line win. All randomness flows
from ``--seed``, so identical inputs and seed produce byte-identical
output files.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import (
    AlignedPair,
    AlignmentConfig,
    align_supervised,
    induce_dictionary,
)
from .embeddings import load_space, lookup, save_space
from .evaluation import (
    eval_bli,
    eval_hypernyms,
    eval_similarity,
    fit_hypernym_projection,
)
from .fixtures import SyntheticSpec, make_hub_set, make_rotated_pair, make_taxonomy
from .lexicon import (
    load_hypernyms,
    load_lexicon,
    load_similarity,
    resolve,
    save_hypernyms,
    save_lexicon,
)
from .refinement import apply_meemi, fit_meemi, save_meemi, similarity_shift_report
from .retrieval import batch_cosine_topk, build_index, knn_csls
from .solvers import LinearMap, load_map, save_map


class UsageError(Exception):
    """Bad arguments or missing input files; maps to exit code 2."""


@dataclass
class PipelineConfig:
    """Validated bundle of paths and settings for one pipeline step."""

    src: str | None = None
    tgt: str | None = None
    dictionary: str | None = None
    test: str | None = None
    out: str | None = None
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)
    retrieval: str = "cosine"
    csls_k: int = 10
    seed: int = 42
    limit: int | None = None

    def validate(self) -> None:
        for label, path in (
            ("--src", self.src),
            ("--tgt", self.tgt),
            ("--dict", self.dictionary),
            ("--test", self.test),
        ):
            if path is not None and not os.path.exists(path):
                raise UsageError(f"{label} path does not exist: {path}")


def _identity_pair(src, tgt, limit=None) -> AlignedPair:
    src_space = load_space(src, limit)
    tgt_space = load_space(tgt, limit)
    identity = LinearMap(np.eye(src_space.dim), orthogonal=True)
    return AlignedPair(src_space, tgt_space, identity, iterations_run=0)


def _parse_normalize(raw: str) -> tuple[str, ...]:
    if raw.strip().lower() in ("", "none"):
        return ()
    return tuple(step.strip() for step in raw.split(",") if step.strip())


def _parse_ks(raw: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"--k expects integers like '1,5,10', got {raw!r}") from None
    if not ks or min(ks) < 1:
        raise UsageError("--k ranks must be positive")
    return ks


def _emit_report(report, args) -> None:
    print(report.to_tsv() if args.format == "tsv" else report.to_text())
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_tsv() + "\n")


def cmd_align(args) -> int:
    cfg = PipelineConfig(
        src=args.src, tgt=args.tgt, dictionary=args.dict, out=args.out,
        alignment=AlignmentConfig(
            normalize=_parse_normalize(args.normalize),
            self_learning=args.self_learning,
            max_iterations=args.max_iter,
            convergence_tol=args.tol,
            induction_vocab_cap=args.cap,
        ),
        seed=args.seed, limit=args.limit,
    )
    cfg.validate()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    src = load_space(cfg.src, cfg.limit)
    tgt = load_space(cfg.tgt, cfg.limit)
    lexicon = load_lexicon(cfg.dictionary)
    _, coverage = resolve(lexicon, src, tgt)
    pair = align_supervised(src, tgt, lexicon, cfg.alignment)
    save_space(pair.source, out / "source_mapped.vec")
    save_space(pair.target, out / "target_normalized.vec")
    save_map(pair.map, out / "alignment.map")
    print(f"coverage {coverage:.4f}")
    print(f"iterations {pair.iterations_run}")
    return 0


def cmd_refine(args) -> int:
    cfg = PipelineConfig(
        src=args.src, tgt=args.tgt, dictionary=args.dict, out=args.out,
        seed=args.seed, limit=args.limit,
    )
    cfg.validate()
    if args.map and not os.path.exists(args.map):
        raise UsageError(f"--map path does not exist: {args.map}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    src = load_space(cfg.src, cfg.limit)
    tgt = load_space(cfg.tgt, cfg.limit)
    alignment_map = (
        load_map(args.map) if args.map else LinearMap(np.eye(src.dim), orthogonal=True)
    )
    before = AlignedPair(src, tgt, alignment_map, iterations_run=0)
    lexicon = load_lexicon(cfg.dictionary)
    model = fit_meemi(before, lexicon)
    after = apply_meemi(model, before)
    shift = similarity_shift_report(before, after, lexicon)
    save_space(after.source, out / "source_refined.vec")
    save_space(after.target, out / "target_refined.vec")
    save_meemi(model, out / "meemi.model")
    print(f"pairs {model.train_pair_count}")
    print(f"mean_delta {shift.mean_delta:.6f}")
    print(f"std_delta {shift.std_delta:.6f}")
    print(f"fraction_positive {shift.fraction_positive:.6f}")
    return 0


def cmd_induce(args) -> int:
    cfg = PipelineConfig(src=args.src, tgt=args.tgt, limit=args.limit)
    cfg.validate()
    pair = _identity_pair(cfg.src, cfg.tgt, cfg.limit)
    induced = induce_dictionary(pair, args.cap)
    save_lexicon(induced, args.out)
    print(f"induced {len(induced)} pairs")
    return 0


def cmd_eval_bli(args) -> int:
    cfg = PipelineConfig(
        src=args.src, tgt=args.tgt, test=args.test,
        retrieval=args.retrieval, csls_k=args.csls_k, limit=args.limit,
    )
    cfg.validate()
    pair = _identity_pair(cfg.src, cfg.tgt, cfg.limit)
    report = eval_bli(
        pair,
        load_lexicon(cfg.test),
        retrieval=cfg.retrieval,
        ks=_parse_ks(args.k),
        csls_k=cfg.csls_k,
        dataset=Path(cfg.test).name,
    )
    _emit_report(report, args)
    return 0


def cmd_eval_sim(args) -> int:
    cfg = PipelineConfig(src=args.src, tgt=args.tgt, limit=args.limit)
    cfg.validate()
    if not os.path.exists(args.dataset):
        raise UsageError(f"--dataset path does not exist: {args.dataset}")
    if args.cross and not args.tgt:
        raise UsageError("--cross requires --tgt")
    space_a = load_space(cfg.src, cfg.limit)
    space_b = load_space(cfg.tgt, cfg.limit) if args.cross else space_a
    report = eval_similarity(
        space_a, space_b, load_similarity(args.dataset), dataset_name=Path(args.dataset).name
    )
    _emit_report(report, args)
    return 0


def cmd_eval_hyper(args) -> int:
    cfg = PipelineConfig(
        src=args.src, tgt=args.tgt, test=args.test,
        retrieval=args.retrieval, csls_k=args.csls_k, limit=args.limit,
    )
    cfg.validate()
    if not os.path.exists(args.train):
        raise UsageError(f"--train path does not exist: {args.train}")
    if args.tgt:
        space = _identity_pair(cfg.src, cfg.tgt, cfg.limit)
    else:
        space = load_space(cfg.src, cfg.limit)
    projection = fit_hypernym_projection(space, load_hypernyms(args.train))
    report = eval_hypernyms(
        space,
        projection,
        load_hypernyms(cfg.test),
        k=args.k,
        retrieval=cfg.retrieval,
        csls_k=cfg.csls_k,
        dataset_name=Path(cfg.test).name,
    )
    _emit_report(report, args)
    return 0


def cmd_inspect(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    cfg = PipelineConfig(
        src=args.src, tgt=args.tgt, retrieval=args.retrieval,
        csls_k=args.csls_k, limit=args.limit,
    )
    cfg.validate()
    src = load_space(cfg.src, cfg.limit)
    query = lookup(src, args.word)
    if query is None:
        raise ValueError(f"word {args.word!r} is not in the source vocabulary")
    if cfg.tgt:
        candidates = load_space(cfg.tgt, cfg.limit)
        drop_self = False
        density_space = src if cfg.retrieval == "csls" else None
    else:
        candidates = src
        drop_self = True
        density_space = None
    k = args.k + 1 if drop_self else args.k
    if cfg.retrieval == "csls":
        index = build_index(candidates, cfg.csls_k, source_space=density_space)
        neighbors = knn_csls(index, query, None, k)
    else:
        idx, scores = batch_cosine_topk(candidates, query, k)
        neighbors = [(candidates.vocab[i], float(s)) for i, s in zip(idx[0], scores[0])]
    if drop_self:
        neighbors = [(t, s) for t, s in neighbors if t != args.word][: args.k]
    for rank, (token, score) in enumerate(neighbors, start=1):
        print(f"{rank}\t{token}\t{score:.4f}")
    return 0


def cmd_fixture(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "rotated":
        fx = make_rotated_pair(
            SyntheticSpec(args.vocab, args.dim, args.sigma, args.seed, args.shared_vocab)
        )
        save_space(fx.src, out / "src.vec")
        save_space(fx.tgt, out / "tgt.vec")
        save_lexicon(fx.gold, out / "gold.dict")
        save_map(fx.rotation, out / "rotation.map")
    elif args.kind == "hub":
        hub = make_hub_set(args.seed)
        save_space(hub.targets, out / "targets.vec")
        save_space(hub.queries, out / "queries.vec")
        save_lexicon(hub.gold, out / "gold.dict")
    else:
        tax = make_taxonomy(SyntheticSpec(args.vocab, args.dim, args.sigma, args.seed))
        save_space(tax.space, out / "space.vec")
        save_hypernyms(tax.train, out / "train.tsv")
        save_hypernyms(tax.test, out / "test.tsv")
        save_map(tax.true_map, out / "true.map")
    print(f"fixture written to {out}")
    return 0


def _add_common(parser, *, tgt_required=True, with_out=False):
    parser.add_argument("--src", required=True, help="source embedding file (.vec)")
    parser.add_argument("--tgt", required=tgt_required, default=None, help="target embedding file")
    parser.add_argument("--limit", type=int, default=None, help="max vocabulary per space")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--config", default=None, help="key=value defaults file")
    if with_out:
        parser.add_argument("--out", required=True, help="output directory")


def _add_retrieval(parser):
    parser.add_argument("--retrieval", choices=("cosine", "csls"), default="cosine")
    parser.add_argument("--csls-k", type=int, default=10, dest="csls_k")


def _add_report(parser):
    parser.add_argument("--format", choices=("text", "tsv"), default="text")
    parser.add_argument("--out", default=None, help="also write a tsv report file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meemi",
        description="Align two embedding spaces, then pull translations toward their midpoint.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("align", help="supervised orthogonal alignment")
    _add_common(p, with_out=True)
    p.add_argument("--dict", required=True, help="training dictionary")
    p.add_argument("--normalize", default="unit,center,unit",
                   help="comma list of unit/center steps, or 'none'")
    p.add_argument("--self-learning", action="store_true", dest="self_learning")
    p.add_argument("--max-iter", type=int, default=50, dest="max_iter")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--cap", type=int, default=20000, help="induction vocabulary cap")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("refine", help="meeting-in-the-middle refinement")
    _add_common(p, with_out=True)
    p.add_argument("--dict", required=True, help="training dictionary")
    p.add_argument("--map", default=None, help="alignment map file (optional)")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("induce", help="write the induced nearest-neighbor dictionary")
    _add_common(p)
    p.add_argument("--cap", type=int, default=20000)
    p.add_argument("--out", required=True, help="output dictionary file")
    p.set_defaults(func=cmd_induce)

    ev = sub.add_parser("eval", help="evaluation tasks")
    ev_sub = ev.add_subparsers(dest="task")

    p = ev_sub.add_parser("bli", help="bilingual dictionary induction P@k")
    _add_common(p)
    p.add_argument("--test", required=True, help="test dictionary")
    p.add_argument("--k", default="1,5,10", help="comma list of ranks")
    _add_retrieval(p)
    _add_report(p)
    p.set_defaults(func=cmd_eval_bli)

    p = ev_sub.add_parser("sim", help="word-similarity correlations")
    _add_common(p, tgt_required=False)
    p.add_argument("--dataset", required=True, help="w1 w2 score file")
    p.add_argument("--cross", action="store_true", help="look up w2 in --tgt")
    _add_report(p)
    p.set_defaults(func=cmd_eval_sim)

    p = ev_sub.add_parser("hyper", help="hypernym discovery MRR/MAP/P@5")
    _add_common(p, tgt_required=False)
    p.add_argument("--train", required=True, help="training tsv")
    p.add_argument("--test", required=True, help="test tsv")
    p.add_argument("--k", type=int, default=15)
    _add_retrieval(p)
    _add_report(p)
    p.set_defaults(func=cmd_eval_hyper)

    p = sub.add_parser("inspect", help="print nearest neighbors of one word")
    p.add_argument("word")
    _add_common(p, tgt_required=False)
    p.add_argument("--k", type=int, default=10)
    _add_retrieval(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("fixture", help="write synthetic benchmark files")
    p.add_argument("kind", choices=("rotated", "hub", "taxonomy"))
    p.add_argument("--vocab", type=int, default=1000)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--shared-vocab", action="store_true", dest="shared_vocab")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="key=value defaults file")
    p.set_defaults(func=cmd_fixture)

    return parser


BOOL_KEYS = {"self-learning", "self_learning", "cross", "shared-vocab", "shared_vocab"}
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


def _load_config_args(path) -> list[str]:
    if not os.path.exists(path):
        raise UsageError(f"--config path does not exist: {path}")
    flags: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{line_no}: expected key=value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            flag = "--" + key.replace("_", "-")
            if key in BOOL_KEYS:
                if value.lower() in TRUE_WORDS:
                    flags.append(flag)
                elif value.lower() not in FALSE_WORDS:
                    raise UsageError(f"{path}:{line_no}: boolean key {key} needs true/false")
            else:
                flags.extend([flag, value])
    return flags


def _apply_config(argv: list[str]) -> list[str]:
    """Splice config-file defaults in ahead of explicit flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    defaults = _load_config_args(argv[i + 1])
    rest = argv[:i] + argv[i + 2:]
    lead = 0
    while lead < len(rest) and not rest[lead].startswith("-"):
        lead += 1
    return rest[:lead] + defaults + rest[lead:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
