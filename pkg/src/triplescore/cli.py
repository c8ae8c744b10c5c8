"""Command-line pipeline: ingest -> gen-train -> train -> score -> eval.

Every option can also come from a flat ``key = value`` config file passed with
``--config``; flags given on the command line win over the file.

Exit codes: 0 success, 1 usage/config error, 2 data or parse error,
3 insufficient training data.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import corpus as corpus_io
from .distsup import read_triples, write_triples
from .embeddings import EmbeddingConfig, EmbeddingError
from .evaluation import (
    MetricError,
    evaluate_files,
    format_error_table,
    per_feature_error,
    write_report,
)
from .features import DISTINCT, OCC_VARIANTS
from .lexicon import LexiconError, Relation, load_lexicon
from .scorer import (
    InsufficientDataError,
    ModelFormatError,
    ScoreFileError,
    TrainingConfig,
    generate_all,
    load_model,
    save_model,
    score_file,
    train_model,
)

logger = logging.getLogger("triplescore")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INSUFFICIENT = 0, 1, 2, 3

INDEX_FILE = "index.json"
TRAIN_FILE = "train.tsv"
MODEL_DIR = "model"
ERRORS_FILE = "training_errors.tsv"


class UsageError(Exception):
    pass


@dataclass
class PipelineConfig:
    sentences: str | None = None
    persons: str | None = None
    professions: str | None = None
    nationalities: str | None = None
    workdir: str = "work"
    seed: int = 1
    dimension: int = 100
    window: int = 5
    negative: int = 5
    epochs: int = 5
    min_count: int = 2
    learning_rate: float = 0.025
    max_pos: int | None = None
    max_neg: int | None = None
    negatives_per_person: int = 3
    occ_variant: str = DISTINCT
    threads: int = 1

    def embedding(self) -> EmbeddingConfig:
        return EmbeddingConfig(
            dimension=self.dimension, window=self.window, negative_samples=self.negative,
            epochs=self.epochs, min_count=self.min_count, learning_rate=self.learning_rate,
            seed=self.seed,
        )

    def training(self) -> TrainingConfig:
        return TrainingConfig(
            embedding=self.embedding(), max_pos=self.max_pos, max_neg=self.max_neg,
            negatives_per_person=self.negatives_per_person, seed=self.seed,
            occ_variant=self.occ_variant,
        )

    @property
    def work(self) -> Path:
        return Path(self.workdir)


_CONFIG_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _convert(key: str, value: str):
    kind = _CONFIG_TYPES[key]
    if value.lower() in ("", "none") and "None" in kind:
        return None
    try:
        if kind.startswith("int"):
            return int(value)
        if kind.startswith("float"):
            return float(value)
    except ValueError:
        raise UsageError(f"config key {key!r}: cannot parse {value!r}") from None
    return value


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_TYPES:
            raise UsageError(f"{path}:{lineno}: expected 'key = value' with a known key, got {raw!r}")
        out[key] = _convert(key, value.strip())
    return out


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = read_config(args.config) if args.config else {}
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = PipelineConfig(**values)
    if cfg.occ_variant not in OCC_VARIANTS:
        raise UsageError(f"occ_variant must be one of {OCC_VARIANTS}, got {cfg.occ_variant!r}")
    if cfg.threads < 1:
        raise UsageError("threads must be at least 1")
    try:
        cfg.training()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _need(path: str | None, what: str) -> Path:
    if not path:
        raise UsageError(f"missing required setting: {what}")
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{what} not found: {p}")
    return p


def _lexicons(cfg: PipelineConfig):
    lexicons = {}
    if cfg.professions:
        lexicons[Relation.PROFESSION] = load_lexicon(_need(cfg.professions, "professions lexicon"), Relation.PROFESSION)
    if cfg.nationalities:
        lexicons[Relation.NATIONALITY] = load_lexicon(_need(cfg.nationalities, "nationalities lexicon"), Relation.NATIONALITY)
    if not lexicons:
        raise UsageError("give at least one of --professions / --nationalities")
    return lexicons


def _load_index(cfg: PipelineConfig):
    return corpus_io.load_index(_need(str(cfg.work / INDEX_FILE), "index cache (run 'ingest' first)"))


def cmd_ingest(cfg: PipelineConfig, args) -> int:
    index = corpus_io.ingest_sentences(
        _need(cfg.sentences, "sentences file"), _need(cfg.persons, "persons file")
    )
    cfg.work.mkdir(parents=True, exist_ok=True)
    corpus_io.save_index(index, cfg.work / INDEX_FILE)
    try:
        cov = f"{corpus_io.coverage_fraction(index):.4f}"
    except corpus_io.UndefinedCoverageError:
        cov = "undefined"
    print(f"coverage={cov} persons_found={index.persons_found} persons_requested={index.persons_requested}")
    return EXIT_OK


def cmd_gen_train(cfg: PipelineConfig, args) -> int:
    index = _load_index(cfg)
    training = generate_all(index, _lexicons(cfg), cfg.training())
    triples = [t for rel in sorted(training) for t in training[rel]]
    out = Path(args.output) if args.output else cfg.work / TRAIN_FILE
    write_triples(triples, out, header=f"seed={cfg.seed}")
    for rel, ts in sorted(training.items()):
        pos = sum(t.score == 7 for t in ts)
        print(f"{rel.value}: {pos} positive, {len(ts) - pos} negative")
    return EXIT_OK


def cmd_train(cfg: PipelineConfig, args) -> int:
    index = _load_index(cfg)
    lexicons = _lexicons(cfg)
    training = None
    if args.train:
        training = {rel: [] for rel in lexicons}
        for t in read_triples(_need(args.train, "training triples")):
            if t.relation in training:
                training[t.relation].append(t)
    model, training = train_model(index, lexicons, cfg.training(), training)
    bundle = Path(args.model) if args.model else cfg.work / MODEL_DIR
    save_model(model, bundle)
    errors = {rel: per_feature_error(ts, model) for rel, ts in training.items()}
    lines = [f"{rel.value}\t{name}\t{err!r}" for rel in sorted(errors) for name, err in errors[rel].items()]
    (bundle / ERRORS_FILE).write_text("".join(x + "\n" for x in lines), encoding="utf-8")
    print(f"model written to {bundle}")
    print(format_error_table(errors), end="")
    return EXIT_OK


def cmd_score(cfg: PipelineConfig, args) -> int:
    bundle = _need(args.model or str(cfg.work / MODEL_DIR), "model bundle")
    model = load_model(bundle)
    skipped = score_file(_need(args.input, "triples file"), model, args.output,
                         skip_bad=args.skip_bad, threads=cfg.threads)
    for lineno, msg in skipped:
        print(f"warning: {args.input}:{lineno}: skipped: {msg}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(cfg: PipelineConfig, args) -> int:
    report = evaluate_files(_need(args.pred, "predictions"), _need(args.truth, "ground truth"))
    if args.report:
        write_report(report, args.report)
    print(report.as_text(), end="")
    print(report.as_kv(), end="")
    return EXIT_OK


def cmd_report(cfg: PipelineConfig, args) -> int:
    bundle = _need(args.model or str(cfg.work / MODEL_DIR), "model bundle")
    model = load_model(bundle)
    print(f"seed={model.seed} occ_variant={model.occ_variant} "
          f"vocab={len(model.embeddings)} dim={model.embeddings.dimension}")
    for rel in sorted(model.regressions):
        reg = model.regressions[rel]
        weights = " ".join(f"{n}={w:.4f}" for n, w in zip(reg.features, reg.weights))
        print(f"{rel.value}: {weights} bias={reg.bias:.4f}")
        for entity, profile in sorted(model.profiles[rel].items()):
            if profile.top_words:
                top = ", ".join(f"{w} {x:.4f}" for w, x in profile.top_words[: args.top])
                print(f"  {entity}: {top}")
    errors_path = Path(bundle) / ERRORS_FILE
    if errors_path.exists():
        errors: dict = {}
        for line in errors_path.read_text(encoding="utf-8").splitlines():
            rel, name, err = line.split("\t")
            errors.setdefault(Relation(rel), {})[name] = float(err)
        print(format_error_table(errors), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--workdir", help="directory for the index cache, train.tsv and model")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    lex = argparse.ArgumentParser(add_help=False)
    lex.add_argument("--professions", help="professions lexicon TSV")
    lex.add_argument("--nationalities", help="nationalities lexicon TSV")
    lex.add_argument("--max-pos", dest="max_pos", type=int)
    lex.add_argument("--max-neg", dest="max_neg", type=int)
    lex.add_argument("--negatives-per-person", dest="negatives_per_person", type=int)

    parser = argparse.ArgumentParser(prog="triplescore", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="build the per-person index cache")
    p.add_argument("--sentences")
    p.add_argument("--persons")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("gen-train", parents=[common, lex], help="write distant-supervision triples")
    p.add_argument("--output", help=f"default: <workdir>/{TRAIN_FILE}")
    p.set_defaults(func=cmd_gen_train)

    p = sub.add_parser("train", parents=[common, lex], help="train embeddings, profiles and regression")
    p.add_argument("--train", help="reuse triples from gen-train instead of regenerating")
    p.add_argument("--model", help=f"bundle directory, default <workdir>/{MODEL_DIR}")
    p.add_argument("--dimension", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--negative", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--min-count", dest="min_count", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--occ-variant", dest="occ_variant", choices=OCC_VARIANTS)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", parents=[common], help="score person/relation/entity triples")
    p.add_argument("--model")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--skip-bad", dest="skip_bad", action="store_true",
                   help="skip malformed lines and unknown entities instead of failing")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", parents=[common], help="accuracy, avg. score difference, Kendall's tau")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--report", help="also write the report to this file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", parents=[common], help="summarize a model bundle")
    p.add_argument("--model")
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientDataError, EmbeddingError) as exc:
        print(f"error: insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (OSError, ValueError, KeyError, LexiconError, MetricError, ModelFormatError, ScoreFileError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
