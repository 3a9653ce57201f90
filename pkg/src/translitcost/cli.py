"""Command line entry point: clean, train, transliterate, pivot, match,
evaluate, heatmap and friends.

Every input and output is an explicit path flag. A JSON ``--config`` file
may supply defaults for any flag, either at top level or under a key named
after the subcommand; flags given on the command line always win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .evaluation import candidates_tsv, evaluate, export_heatmap
from .generation import construct_topk, pivot_topk
from .ingestion import (
    LoadError,
    PairCorpus,
    clean_corpus,
    load_lexicon,
    load_pairs,
    split_corpus,
)
from .matching import detect_best
from .model import ContractError, deserialize, serialize
from .semantics import (
    POLICIES,
    FriendConfig,
    classify_counts,
    eval_gold,
    load_dictionary,
    load_embeddings,
    load_gold,
    records_tsv,
    scan_friends,
)
from .training import TrainConfig, train, write_stats_csv

logger = logging.getLogger("translitcost")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
COMMANDS = ("clean", "train", "transliterate", "pivot", "match", "evaluate", "heatmap", "friends")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _k_list(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("k values must be positive integers")
    return ks


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _read_corpus(path, src_lang, tgt_lang) -> PairCorpus:
    corpus = clean_corpus(load_pairs(path, keep_malformed=True), source_lang=src_lang, target_lang=tgt_lang)
    if corpus.dropped:
        logger.info("%s: dropped %d rejected and %d duplicate lines",
                    path, len(corpus.rejects), corpus.duplicates)
    return corpus


def _pairs_tsv(pairs) -> str:
    return "".join(f"{s}\t{t}\n" for s, t in pairs)


def cmd_clean(args) -> int:
    corpus = _read_corpus(args.pairs, args.src_lang, args.tgt_lang)
    _write(_pairs_tsv(corpus.pairs), args.out)
    if args.split_dir:
        split = split_corpus(corpus, args.seed)
        out_dir = Path(args.split_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for tag in ("train", "tune", "test"):
            (out_dir / f"{tag}.tsv").write_text(_pairs_tsv(split.bucket(tag)), encoding="utf-8")
    logger.info("kept %d pairs", len(corpus))
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = TrainConfig(
        rounds=args.rounds,
        lmax=args.lmax,
        alpha=args.alpha,
        delta_flaw=args.delta,
        flaw_ratio=args.flaw_ratio,
        bootstrap=args.bootstrap,
    )
    corpus = _read_corpus(args.pairs, args.src_lang, args.tgt_lang)
    if args.split:
        corpus = split_corpus(corpus, args.seed)
        if args.test_out:
            Path(args.test_out).write_text(_pairs_tsv(corpus.test), encoding="utf-8")
    model, history = train(corpus, cfg)
    serialize(model, args.out)
    stats = args.stats or f"{args.out}.stats.csv"
    write_stats_csv(history, stats)
    logger.info("model written to %s, round stats to %s", args.out, stats)
    return EXIT_OK


def cmd_transliterate(args) -> int:
    model = deserialize(args.model)
    _write(candidates_tsv(construct_topk(model, args.word, args.k)), args.out)
    return EXIT_OK


def cmd_pivot(args) -> int:
    first = deserialize(args.model1)
    second = deserialize(args.model2)
    if first.target_lang != second.source_lang:
        logger.warning("pivot languages differ: %s vs %s", first.target_lang, second.source_lang)
    _write(candidates_tsv(pivot_topk(first, second, args.word, args.k, args.beam)), args.out)
    return EXIT_OK


def cmd_match(args) -> int:
    model = deserialize(args.model)
    lexicon = load_lexicon(args.lexicon, model.target_lang)
    rows = detect_best(model, lexicon, args.word, args.k)
    _write("".join(f"{r}\t{w}\t{c!r}\n" for r, (w, c) in enumerate(rows, 1)), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = deserialize(args.model)
    pairs = load_pairs(args.test)
    report = evaluate(
        model, pairs, args.k, args.direction, args.lang or model.target_lang, args.label, args.threads
    )
    _write(report.to_text() if args.format == "text" else report.to_csv(), args.out)
    return EXIT_OK


def cmd_heatmap(args) -> int:
    model = deserialize(args.model)
    chars_src = args.chars_src if args.chars_src else sorted(model.alphabet_src)
    chars_tgt = args.chars_tgt if args.chars_tgt else sorted(model.alphabet_tgt)
    export_heatmap(model, chars_src, chars_tgt, args.out)
    return EXIT_OK


def cmd_friends(args) -> int:
    model = deserialize(args.model)
    cfg = FriendConfig(args.d_max, args.next_cohort, args.min_len, args.neighbors, args.tau)
    lex_src = load_lexicon(args.src_lexicon, model.source_lang)
    lex_tgt = load_lexicon(args.tgt_lexicon, model.target_lang)
    e1 = load_embeddings(args.src_emb, model.source_lang)
    e2 = load_embeddings(args.tgt_emb, model.target_lang)
    dictionary = load_dictionary(args.dictionary)
    records, summary = scan_friends(model, lex_src, lex_tgt, dictionary, e1, e2, cfg)
    _write(records_tsv(records), args.out)
    if args.summary:
        Path(args.summary).write_text(summary.to_csv(), encoding="utf-8")
    if args.counts:
        lang = args.lang or model.source_lang
        Path(args.counts).write_text(classify_counts(records).to_csv(lang), encoding="utf-8")
    if args.gold_true or args.gold_false:
        if not (args.gold_true and args.gold_false):
            raise UsageError("--gold-true and --gold-false go together")
        f1, acc = eval_gold(records, load_gold(args.gold_true), load_gold(args.gold_false), args.policy)
        print(f"f1\t{f1!r}\naccuracy\t{acc!r}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="translitcost", description="Learned substring-cost transliteration tools")
    parser.add_argument("--config", help="JSON file with flag defaults")
    parser.add_argument("--seed", type=int, default=42, help="seed for every random choice (default 42)")
    parser.add_argument("--threads", type=int, default=1, help="maximum worker processes")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("clean", help="normalize, filter and deduplicate a pair file")
    p.add_argument("--pairs", required=True, help="raw source<TAB>target file")
    p.add_argument("--out", required=True, help="cleaned pair file")
    p.add_argument("--split-dir", help="also write train/tune/test.tsv here")
    p.add_argument("--src-lang", default="src")
    p.add_argument("--tgt-lang", default="tgt")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("train", help="train a cost matrix")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True, help="model file")
    p.add_argument("--stats", help="round stats CSV (default: <out>.stats.csv)")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--lmax", type=int, default=3)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5, help="absolute saving needed to count as matched")
    p.add_argument("--flaw-ratio", type=float, default=0.65, help="relative saving needed to count as matched")
    p.add_argument("--bootstrap", choices=("uniform", "none"), default="uniform")
    p.add_argument("--split", action="store_true", help="hold out tune/test pairs before training")
    p.add_argument("--test-out", help="with --split, write the held-out test pairs here")
    p.add_argument("--src-lang", default="src")
    p.add_argument("--tgt-lang", default="tgt")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("transliterate", help="k cheapest constructed transliterations")
    p.add_argument("--model", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--out", help="TSV output (default stdout)")
    p.set_defaults(func=cmd_transliterate)

    p = sub.add_parser("pivot", help="transliterate through an intermediate language")
    p.add_argument("--model1", required=True, help="source to pivot model")
    p.add_argument("--model2", required=True, help="pivot to target model")
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--beam", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pivot)

    p = sub.add_parser("match", help="closest lexicon words")
    p.add_argument("--model", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("evaluate", help="Top-k and Levenshtein-1 on a test file")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--k", type=_k_list, default=[1, 20, 100], help="comma-separated, e.g. 1,20,100")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.add_argument("--direction", default="")
    p.add_argument("--lang", default="")
    p.add_argument("--label", default="Ours")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("heatmap", help="single-character cost matrix as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--chars-src", help="row characters (default: model source alphabet)")
    p.add_argument("--chars-tgt", help="column characters (default: model target alphabet)")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("friends", help="true and false friend scan")
    p.add_argument("--model", required=True)
    p.add_argument("--src-lexicon", required=True)
    p.add_argument("--tgt-lexicon", required=True)
    p.add_argument("--src-emb", required=True)
    p.add_argument("--tgt-emb", required=True)
    p.add_argument("--dictionary", required=True)
    p.add_argument("--out", help="FriendRecord TSV (default stdout)")
    p.add_argument("--summary", help="cohort summary CSV")
    p.add_argument("--counts", help="TP/EP/B/N counts CSV")
    p.add_argument("--lang", default="")
    p.add_argument("--d-max", type=float, default=2.0)
    p.add_argument("--next-cohort", type=int, default=10000)
    p.add_argument("--min-len", type=int, default=5)
    p.add_argument("--neighbors", type=int, default=300)
    p.add_argument("--tau", type=int, default=3)
    p.add_argument("--gold-true", help="gold true-friend pairs TSV")
    p.add_argument("--gold-false", help="gold false-friend pairs TSV")
    p.add_argument("--policy", choices=POLICIES, default="either")
    p.set_defaults(func=cmd_friends)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Install config-file values as parser defaults (flags still override them)."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        conf = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise LoadError(known.config, None, f"unreadable config ({exc})") from exc
    if not isinstance(conf, dict):
        raise LoadError(known.config, None, "config must be a JSON object")
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    top_dests = {a.dest for a in parser._actions}
    flat = {k.replace("-", "_"): v for k, v in conf.items() if not isinstance(v, dict)}
    parser.set_defaults(**{k: v for k, v in flat.items() if k in top_dests})
    for name, sp in sub_action.choices.items():
        dests = {a.dest for a in sp._actions}
        section = {k.replace("-", "_"): v for k, v in conf.get(name, {}).items()}
        values = {k: v for k, v in {**flat, **section}.items() if k in dests}
        for action in sp._actions:
            if action.dest in values:
                action.required = False
        sp.set_defaults(**values)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except LoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        print("usage error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LoadError, ContractError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
