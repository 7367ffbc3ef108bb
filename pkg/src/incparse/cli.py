"""Command-line interface.

One executable, nine subcommands covering the whole pipeline:

    encode   treebank -> per-token label TSV
    decode   label TSV -> treebank
    oracle   treebank -> action log
    replay   action log -> treebank
    train    treebank -> model file
    parse    model + raw sentences -> treebank
    eval     gold + predicted treebanks -> bracketing report
    stats    treebank -> constituent frequency/length table
    audit    model -> prefix-determinism report on generated pairs

File arguments accept "-" for stdin.  Exit status is 0 on success, 1 for
input or validation problems, and 2 for internal invariant violations.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict

from .audit import audit_incrementality
from .evaluate import EvalParams, corpus_stats, per_constituent, read_prm, score
from .linearize import MODES, decode, encode, iter_labeled, write_labeled
from .model import (
    ModelFormatError,
    SequenceLabelingParser,
    TransitionParser,
    load_model,
)
from .synthetic import prefix_pairs
from .transitions import TransitionError, iter_actions, oracle, replay, write_actions
from .trees import (
    Sentence,
    TreebankError,
    collapse_unary,
    expand_unary,
    iter_treebank,
    serialize,
    unescape_token,
)


@contextmanager
def _open_in(path):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as handle:
            yield handle


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as handle:
            yield handle


def _check_delay(parser: argparse.ArgumentParser, args):
    if getattr(args, "delay", 0) > 2 and not getattr(args, "allow_large_delay", False):
        parser.error("--delay above 2 requires --allow-large-delay")


def cmd_encode(args) -> int:
    with _open_in(args.trees) as src, _open_out(args.output) as out:
        def blocks():
            for tree in iter_treebank(src, strip_pos=args.strip_pos):
                collapsed = collapse_unary(tree, args.join)
                yield collapsed.sentence, encode(collapsed, args.mode)
        write_labeled(blocks(), out)
    return 0


def cmd_decode(args) -> int:
    with _open_in(args.labels) as src, _open_out(args.output) as out:
        for sentence, labels in iter_labeled(src):
            tree = decode(labels, sentence, args.mode, fallback_label=args.fallback)
            out.write(serialize(expand_unary(tree, args.join)) + "\n")
    return 0


def cmd_oracle(args) -> int:
    with _open_in(args.trees) as src, _open_out(args.output) as out:
        def rows():
            for tree in iter_treebank(src, strip_pos=args.strip_pos):
                collapsed = collapse_unary(tree, args.join)
                yield collapsed.sentence, oracle(collapsed)
        write_actions(rows(), out)
    return 0


def cmd_replay(args) -> int:
    with _open_in(args.actions) as src, _open_out(args.output) as out:
        for sentence, actions in iter_actions(src):
            tree = replay(sentence, actions)
            out.write(serialize(expand_unary(tree, args.join)) + "\n")
    return 0


def cmd_train(args) -> int:
    with _open_in(args.trees) as src:
        corpus = list(iter_treebank(src, strip_pos=args.strip_pos))
    common = dict(
        delay=args.delay,
        epochs=args.epochs,
        seed=args.seed,
        join_char=args.join,
    )
    if args.decoder == "sl":
        parser = SequenceLabelingParser(mode=args.mode, **common)
    else:
        parser = TransitionParser(**common)
    parser.fit(corpus)
    parser.save(args.output)
    print(
        "trained %s decoder on %d sentences: training accuracy %.4f"
        % (args.decoder, len(corpus), parser.train_accuracy_),
        file=sys.stderr,
    )
    return 0


def _parse_chunk(payload):
    parser, lines = payload
    sentences = [
        Sentence(tuple(unescape_token(tok) for tok in line.split())) for line in lines
    ]
    return [serialize(tree) for tree in parser.predict(sentences)]


def cmd_parse(args) -> int:
    parser = load_model(args.model)
    with _open_in(args.sentences) as src:
        lines = [line.strip() for line in src if line.strip()]
    if args.jobs > 1 and len(lines) > 1:
        size = (len(lines) + args.jobs - 1) // args.jobs
        chunks = [(parser, lines[at : at + size]) for at in range(0, len(lines), size)]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = pool.map(_parse_chunk, chunks)
        rendered = [line for chunk in results for line in chunk]
    else:
        rendered = _parse_chunk((parser, lines))
    with _open_out(args.output) as out:
        for line in rendered:
            out.write(line + "\n")
    return 0


def _read_corpus(path, strip_pos=False):
    with _open_in(path) as src:
        return list(iter_treebank(src, strip_pos=strip_pos))


def _report_json(report) -> dict:
    payload = asdict(report)
    payload["per_label"] = {
        label: {"matched": s.matched, "gold": s.gold, "pred": s.pred, "f1": s.f1}
        for label, s in report.per_label.items()
    }
    return payload


def cmd_eval(args) -> int:
    params = read_prm(args.prm, args.strip_functional) if args.prm else EvalParams(
        strip_functional=args.strip_functional
    )
    gold = _read_corpus(args.gold)
    pred = _read_corpus(args.pred)
    report = score(gold, pred, params)
    with _open_out(args.output) as out:
        if args.json:
            json.dump(_report_json(report), out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write("sentences    %d\n" % report.sentences)
            out.write("exact match  %d\n" % report.exact_match)
            out.write("gold spans   %d\n" % report.gold_total)
            out.write("pred spans   %d\n" % report.pred_total)
            out.write("matched      %d\n" % report.matched)
            out.write("precision    %.4f\n" % report.precision)
            out.write("recall       %.4f\n" % report.recall)
            out.write("f1           %.4f\n" % report.f1)
            out.write("functional tags: %s\n" % ("stripped" if params.strip_functional else "kept"))
            rows = per_constituent(gold, pred, params)
            if rows:
                out.write("\nlabel        matched  gold  pred  f1\n")
                for label, cell in rows:
                    out.write(
                        "%-12s %7d %5d %5d  %.4f\n"
                        % (label, cell.matched, cell.gold, cell.pred, cell.f1)
                    )
    return 0


def cmd_stats(args) -> int:
    corpus = _read_corpus(args.trees, strip_pos=args.strip_pos)
    rows = corpus_stats(corpus)
    with _open_out(args.output) as out:
        if args.json:
            payload = [
                {"label": label, "frequency": freq, "length": lam}
                for label, freq, lam in rows
            ]
            json.dump(payload, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write("label        freq%   lambda\n")
            for label, freq, lam in rows:
                out.write("%-12s %5.2f  %6.2f\n" % (label, freq, lam))
    return 0


def cmd_audit(args) -> int:
    parser = load_model(args.model)
    pairs = prefix_pairs(args.pairs, seed=args.seed)
    report = audit_incrementality(parser, pairs, k=parser.delay)
    with _open_out(args.output) as out:
        if args.json:
            payload = {
                "k": report.k,
                "pairs": len(report.pairs),
                "violations": report.violations,
                "passed": report.passed,
                "detail": [
                    {
                        "shared": pair.shared,
                        "divergence": pair.divergence,
                        "boundary": pair.boundary,
                        "violation": pair.violation,
                    }
                    for pair in report.pairs
                ],
            }
            json.dump(payload, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write("pairs        %d\n" % len(report.pairs))
            out.write("delay k      %d\n" % report.k)
            out.write("violations   %d\n" % report.violations)
            out.write("result       %s\n" % ("PASS" if report.passed else "FAIL"))
            for at, pair in enumerate(report.pairs):
                if pair.violation:
                    out.write(
                        "pair %d: diverged at %d, boundary %d (shared %d)\n"
                        % (at, pair.divergence, pair.boundary, pair.shared)
                    )
    return 0


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the contract here is 1."""

    def error(self, message):
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def build_parser() -> argparse.ArgumentParser:
    top = _ArgumentParser(prog="incparse", description=__doc__.split("\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        return cmd

    enc = add("encode", "linearize a treebank into per-token labels")
    enc.add_argument("trees")
    enc.add_argument("--mode", choices=MODES, default="absolute")
    enc.add_argument("--join", default="+", help="unary-chain join character")
    enc.add_argument("--strip-pos", action="store_true", help="treat preterminals as POS tags")

    dec = add("decode", "rebuild a treebank from per-token labels")
    dec.add_argument("labels")
    dec.add_argument("--mode", choices=MODES, default="absolute")
    dec.add_argument("--join", default="+")
    dec.add_argument("--fallback", default="X", help="label for unlabeled rebuilt nodes")

    orc = add("oracle", "derive gold transition actions from a treebank")
    orc.add_argument("trees")
    orc.add_argument("--join", default="+")
    orc.add_argument("--strip-pos", action="store_true")

    rep = add("replay", "rebuild a treebank from an action log")
    rep.add_argument("actions")
    rep.add_argument("--join", default="+")

    trn = add("train", "train an incremental parser")
    trn.add_argument("trees")
    trn.add_argument("--decoder", choices=("sl", "tb"), required=True)
    trn.add_argument("--mode", choices=MODES, default="absolute")
    trn.add_argument("--delay", type=int, default=0, help="lookahead tokens k")
    trn.add_argument("--allow-large-delay", action="store_true")
    trn.add_argument("--epochs", type=int, default=10)
    trn.add_argument("--seed", type=int, default=0)
    trn.add_argument("--join", default="+")
    trn.add_argument("--strip-pos", action="store_true")

    par = add("parse", "parse whitespace-tokenized sentences with a model")
    par.add_argument("model")
    par.add_argument("sentences")
    par.add_argument("--jobs", type=int, default=1)

    ev = add("eval", "score a predicted treebank against gold")
    ev.add_argument("gold")
    ev.add_argument("pred")
    ev.add_argument("--prm", default=None, help="evalb parameter file")
    ev.add_argument("--strip-functional", action="store_true")
    ev.add_argument("--json", action="store_true")

    st = add("stats", "constituent frequency and average length")
    st.add_argument("trees")
    st.add_argument("--strip-pos", action="store_true")
    st.add_argument("--json", action="store_true")

    aud = add("audit", "check prefix determinism of a trained model")
    aud.add_argument("model")
    aud.add_argument("--pairs", type=int, default=100)
    aud.add_argument("--seed", type=int, default=0)
    aud.add_argument("--json", action="store_true")

    return top


_COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "oracle": cmd_oracle,
    "replay": cmd_replay,
    "train": cmd_train,
    "parse": cmd_parse,
    "eval": cmd_eval,
    "stats": cmd_stats,
    "audit": cmd_audit,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "train":
        _check_delay(parser, args)
        if args.output is None:
            parser.error("train requires -o MODEL")
    try:
        return _COMMANDS[args.command](args)
    except (TreebankError, TransitionError, ModelFormatError, ValueError, OSError) as err:
        print("incparse: error: %s" % err, file=sys.stderr)
        return 1
    except Exception as err:  # pragma: no cover - internal invariant violations
        print("incparse: internal error: %r" % err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
