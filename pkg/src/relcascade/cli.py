"""Command-line entry point: train, extract, evaluate, stats,
simulate-posterior, gradcheck.

Exit codes: 0 success, 1 runtime/data error, 2 usage error (argparse default).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import evaluation
from .config import ModelConfig, load_config
from .data import (
    CorpusError,
    RelationSchema,
    SchemaError,
    corpus_stats,
    format_stats,
    infer_schema,
    parse_corpus,
)
from .theory import (
    BandError,
    GaussianSimParams,
    ParameterError,
    conditional_gaussian_closed_form,
    monte_carlo_conditional,
    mse_comparison,
)


class CliError(Exception):
    pass


def _load_corpus(path: str, schema: RelationSchema | None = None, strict: bool = False):
    p = Path(path)
    if not p.exists():
        raise CliError(f"file not found: {path}")
    fmt = "canonical"
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                if "triple_list" in json.loads(line):
                    fmt = "legacy-list"
                break
    return parse_corpus(p, fmt=fmt, schema=schema, strict=strict)


def _cmd_train(args: argparse.Namespace) -> int:
    from .engine import train

    config = load_config(args.config) if args.config else ModelConfig()
    overrides = {
        "encoder": args.encoder,
        "learning_rate": args.learning_rate,
        "batch_size": args.batch_size,
        "max_epochs": args.max_epochs,
    }
    for key, val in overrides.items():
        if val is not None:
            setattr(config, key, val)
    config.validate()
    schema = RelationSchema.load(args.schema) if args.schema else None
    train_corpus = _load_corpus(args.train, schema, strict=schema is not None)
    dev_corpus = _load_corpus(args.dev, schema, strict=schema is not None)
    if schema is None:
        schema = infer_schema(train_corpus + dev_corpus)
    model, report = train(
        train_corpus, dev_corpus, schema, config, seed=args.seed,
        out_path=args.out, pretrained_path=args.pretrained_path,
    )
    print(f"best dev exact F1 {report.best_f1:.4f} at epoch {report.best_epoch}")
    print(f"checkpoint written to {args.out}")
    report_path = Path(args.out).with_suffix(".report.json")
    report_path.write_text(
        json.dumps(dataclasses.asdict(report), indent=2) + "\n", encoding="utf-8"
    )
    return 0


def _cmd_extract(args: argparse.Namespace) -> int:
    from .engine import load_checkpoint, predict_corpus

    model, schema, vocab = load_checkpoint(args.model)
    sentences = _load_corpus(args.input)
    predict_corpus(
        model, sentences, vocab, schema, args.output,
        delta=args.delta, span_threshold=args.span_threshold,
    )
    print(f"wrote {len(sentences)} records to {args.output}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    pred_sents = _load_corpus(args.pred)
    gold_sents = _load_corpus(args.gold)
    if len(pred_sents) != len(gold_sents):
        raise CliError(
            f"prediction/gold record counts differ: {len(pred_sents)} vs {len(gold_sents)}"
        )
    pred = [evaluation.triples_of(s) for s in pred_sents]
    gold = [evaluation.triples_of(s) for s in gold_sents]
    results = {"triples": evaluation.score(pred, gold, args.mode)}
    if args.elements:
        results.update(evaluation.element_scores(pred, gold, args.mode))
    if args.breakdown:
        axis = "overlap" if args.breakdown == "overlap" else "triple_count"
        table = evaluation.breakdown_scores(pred, gold, gold_sents, axis, args.mode)
        for name, res in table.rows.items():
            results[f"{axis}:{name}"] = res
    text = evaluation.format_report(
        results, args.mode, args.format, extra_header=[args.pred, args.gold]
    )
    print(text, end="")
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    schema = RelationSchema.load(args.schema) if args.schema else None
    sentences = _load_corpus(args.data, schema, strict=False)
    if schema is None:
        schema = infer_schema(sentences)
    print(format_stats(corpus_stats(sentences, schema)), end="")
    return 0


def _cmd_simulate_posterior(args: argparse.Namespace) -> int:
    params = GaussianSimParams(
        m_h=args.mh, m_r=args.mr, p11=args.p11, p12=args.p12, p22=args.p22
    )
    band = args.band if args.band is not None else 0.01 * args.p22 ** 0.5
    result = monte_carlo_conditional(params, args.robs, band, args.samples, args.seed)
    mses = mse_comparison(params, args.samples, args.seed)
    cf_mean, cf_var = conditional_gaussian_closed_form(params, args.robs)
    record = {
        "closed_form_mean": cf_mean,
        "closed_form_var": cf_var,
        "mc_mean": result.mc_mean,
        "mc_var": result.mc_var,
        "mc_stderr": result.mc_stderr,
        "n_in_band": result.n_in_band,
        **mses,
    }
    print(json.dumps(record, indent=2))
    return 0


def _cmd_gradcheck(args: argparse.Namespace) -> int:
    from .gradcheck import default_gradcheck

    config = load_config(args.config) if args.config else None
    result = default_gradcheck(config=config, seed=args.seed, eps=args.eps)
    for name, err in sorted(result.per_param.items()):
        print(f"{name}: {err:.3e}")
    status = "PASS" if result.passed(args.tol) else "FAIL"
    print(f"max relative error {result.max_rel_err:.3e} ({result.worst_param}) [{status}]")
    return 0 if status == "PASS" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relcascade",
        description="Relation-first cascade extraction of relational triples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--train", required=True, help="training corpus file")
    p.add_argument("--dev", required=True, help="development corpus file")
    p.add_argument("--schema", help="relation schema file (one label per line)")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--encoder", choices=["toy", "pretrained"], default=None)
    p.add_argument("--pretrained-path", help="weights path for the pretrained encoder")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--max-epochs", type=int, default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("extract", help="extract triples with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--delta", type=float, default=None, help="relation threshold")
    p.add_argument("--span-threshold", type=float, default=None)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--mode", choices=list(evaluation.MODES), default="exact")
    p.add_argument("--elements", action="store_true", help="element-level F1")
    p.add_argument("--breakdown", choices=["overlap", "count"], default=None)
    p.add_argument("--report", help="also write the report to this file")
    p.add_argument("--format", choices=["table", "delimited"], default="table")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--data", required=True)
    p.add_argument("--schema")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("simulate-posterior", help="conditional-Gaussian verifier")
    p.add_argument("--mh", type=float, default=0.0)
    p.add_argument("--mr", type=float, default=0.0)
    p.add_argument("--p11", type=float, default=1.0)
    p.add_argument("--p12", type=float, default=0.5)
    p.add_argument("--p22", type=float, default=1.0)
    p.add_argument("--robs", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--band", type=float, default=None)
    p.set_defaults(func=_cmd_simulate_posterior)

    p = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=_cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, CorpusError, SchemaError, ParameterError, BandError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
