"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .conllu import Treebank, read_conllu, serialize_conllu
from .ensemble import check_compatible, ensemble_predict
from .errors import ConfigError, DataError
from .evaluation import evaluate, evaluate_many
from .harmonizer import DEFAULT_DEP_RULES, add_dummy_punct, fixed_numerals_to_flat, read_rules, relabel_dep, strip_dummy_punct
from .model import load_config, load_model, predict, save_model, train
from .sampler import sample_report

log = logging.getLogger("treeparse")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _unique_names(treebanks: list[Treebank]) -> list[Treebank]:
    seen: dict[str, int] = {}
    out = []
    for tb in treebanks:
        count = seen.get(tb.name, 0)
        seen[tb.name] = count + 1
        out.append(tb if count == 0 else Treebank(f"{tb.name}-{count + 1}", tb.sentences))
    return out


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_train(args) -> int:
    config, schedule = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    treebanks = _unique_names([read_conllu(p) for p in args.treebank])
    model = train(config, schedule, treebanks)
    save_model(model, args.out)
    for tb in treebanks:
        predicted = Treebank(tb.name, tuple(predict(model, s) for s in tb.sentences))
        scores = evaluate(tb, predicted)
        print(f"train {tb.name} LAS: {scores.las:.2f}", file=sys.stderr)
    return 0


def cmd_parse(args) -> int:
    models = [load_model(p) for p in args.model]
    check_compatible(models)
    if args.use_gold_upos and not models[0].config.use_gold_upos:
        raise UsageError("--use-gold-upos given but the model was trained without gold UPOS input")
    treebank = read_conllu(args.input)

    def parse_one(sentence):
        marker = None
        if args.add_dummy_punct:
            sentence, marker = add_dummy_punct(sentence)
        result = predict(models[0], sentence) if len(models) == 1 else ensemble_predict(models, sentence)
        if marker is not None:
            result = strip_dummy_punct(result, marker)
        return result

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        parsed = list(pool.map(parse_one, treebank.sentences))
    _write_output(serialize_conllu(parsed), args.output)
    return 0


def cmd_eval(args) -> int:
    if len(args.gold) != len(args.system):
        raise UsageError("give one --system file for every --gold file")
    golds = _unique_names([read_conllu(p) for p in args.gold])
    pairs = [(g, read_conllu(s, g.name)) for g, s in zip(golds, args.system)]
    report = evaluate_many(pairs, strip_subtypes=not args.strict_deprel)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print("\n".join(report.lines()))
    return 0


def cmd_harmonize(args) -> int:
    rules = read_rules(args.rules) if args.rules else DEFAULT_DEP_RULES
    both = not (args.fixed_to_flat or args.relabel_dep)
    treebank = read_conllu(args.input)
    out = []
    for sentence in treebank.sentences:
        if both or args.fixed_to_flat:
            sentence = fixed_numerals_to_flat(sentence)
        if both or args.relabel_dep:
            sentence = relabel_dep(sentence, rules)
        out.append(sentence)
    _write_output(serialize_conllu(out), args.output)
    return 0


def cmd_sample_report(args) -> int:
    treebanks = _unique_names([read_conllu(p) for p in args.treebank])
    print("\n".join(sample_report(treebanks)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treeparse", description="Graph-based dependency parsing toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a parser on one or more treebanks")
    p.add_argument("--config", required=True, help="JSON config file (may be empty)")
    p.add_argument("--treebank", action="append", required=True, help="training CoNLL-U file; repeat for multi-treebank training")
    p.add_argument("--out", required=True, help="where to write the model")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="annotate a CoNLL-U file")
    p.add_argument("--model", action="append", required=True, help="model file; repeat to ensemble")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="output file (default: standard output)")
    p.add_argument("--add-dummy-punct", action="store_true", help="append a period before parsing and remove it afterwards")
    p.add_argument("--use-gold-upos", action="store_true", help="require models that read the input UPOS column")
    p.add_argument("--threads", type=int, default=1, help="sentences parsed concurrently")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="score system output against gold")
    p.add_argument("--gold", action="append", required=True)
    p.add_argument("--system", action="append", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strip-subtypes", dest="strict_deprel", action="store_false",
                      help="compare deprels without subtypes (default)")
    mode.add_argument("--strict-deprel", dest="strict_deprel", action="store_true",
                      help="compare full deprels including subtypes")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_eval, strict_deprel=False)

    p = sub.add_parser("harmonize", help="rewrite annotation style (both transforms unless one is selected)")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--rules", help="rule table for relabelling 'dep'")
    p.add_argument("--fixed-to-flat", action="store_true", help="fixed -> flat between numerals")
    p.add_argument("--relabel-dep", action="store_true", help="replace 'dep' using the rule table")
    p.set_defaults(func=cmd_harmonize)

    p = sub.add_parser("sample-report", help="show multi-treebank sampling weights")
    p.add_argument("--treebank", action="append", required=True)
    p.set_defaults(func=cmd_sample_report)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return 1
    except SystemExit as exit_:  # --help
        return int(exit_.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (DataError, OSError, UnicodeDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001
        log.debug("unexpected failure", exc_info=True)
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
