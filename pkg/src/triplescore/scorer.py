"""Regression, score combination and the per-triple scoring workflow.

For a (person, relation, entity) triple:

1. no document for the person: score 3;
2. distant supervision is certain: 7 for a positive, 0 for a negative;
3. otherwise ``0.5 * occurrence_order + 0.5 * clamp(linear_regression, 0, 7)``;
4. round half away from zero and clamp to ``[0, 7]``.

The regression uses the embedding and TF-IDF features only. The occurrence
order enters through the fixed 50/50 combination.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import corpus as corpus_io
from .corpus import CorpusIndex
from .distsup import (
    MAX_SCORE,
    MIN_SCORE,
    LabeledTriple,
    Verdict,
    generate_training_set,
    summarize,
)
from .embeddings import EmbeddingConfig, EmbeddingTable, load_embeddings, save_embeddings, train_skipgram
from .features import (
    DISTINCT,
    OCC_VARIANTS,
    EntityProfile,
    FeatureVector,
    PersonNotFoundError,
    assemble_features,
    build_entity_profiles,
    load_profiles,
    save_profiles,
)
from .lexicon import EntityLexicon, Relation, load_lexicon, normalize_text, save_lexicon

logger = logging.getLogger(__name__)

MISSING_PERSON_SCORE = 3
REGRESSION_FEATURES = ("w2v", "tfidf")
RIDGE = 1e-8
BUNDLE_FORMAT = 1


class InsufficientDataError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionModel:
    weights: tuple[float, ...]
    bias: float
    features: tuple[str, ...] = REGRESSION_FEATURES

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "bias", float(self.bias))
        if len(self.weights) != len(self.features):
            raise ValueError("one weight per feature required")
        if not all(math.isfinite(x) for x in (*self.weights, self.bias)):
            raise ValueError("regression weights must be finite")


def fit_ols(X, y, ridge: float = RIDGE, features: Sequence[str] = REGRESSION_FEATURES) -> RegressionModel:
    """Least squares with intercept via the normal equations.

    ``ridge`` is added to the whole diagonal of ``A^T A`` (intercept included),
    which keeps duplicated or constant columns solvable.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 rows to fit, got {X.shape[0]}")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} rows but {y.shape[0]} targets")
    A = np.column_stack([np.ones(len(X)), X])
    gram = A.T @ A + ridge * np.eye(A.shape[1])
    coef = np.linalg.solve(gram, A.T @ y)
    return RegressionModel(weights=tuple(coef[1:]), bias=coef[0], features=tuple(features))


def _as_row(model: RegressionModel, f) -> list[float]:
    if isinstance(f, FeatureVector):
        return [getattr(f, name) for name in model.features]
    return [float(x) for x in f]


def predict_raw(model: RegressionModel, f) -> float:
    row = _as_row(model, f)
    return model.bias + math.fsum(w * x for w, x in zip(model.weights, row))


def predict(model: RegressionModel, f) -> float:
    """Linear prediction clamped to ``[0, 7]``; ``f`` is a FeatureVector or a row."""
    return min(max(predict_raw(model, f), float(MIN_SCORE)), float(MAX_SCORE))


def combined_score(occ: float, linreg: float) -> float:
    return 0.5 * occ + 0.5 * linreg


def round_score(x: float) -> int:
    """Nearest integer, halves away from zero, clamped to [0, 7]."""
    r = math.floor(x + 0.5) if x >= 0 else -math.floor(-x + 0.5)
    return int(min(max(r, MIN_SCORE), MAX_SCORE))


@dataclass(frozen=True)
class TrainingConfig:
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    max_pos: int | None = None
    max_neg: int | None = None
    negatives_per_person: int = 3
    seed: int = 1
    occ_variant: str = DISTINCT

    def __post_init__(self):
        if self.occ_variant not in OCC_VARIANTS:
            raise ValueError(f"unknown occurrence-order variant {self.occ_variant!r}")


@dataclass(eq=False)
class ScoringModel:
    index: CorpusIndex
    lexicons: dict[Relation, EntityLexicon]
    embeddings: EmbeddingTable
    profiles: dict[Relation, dict[str, EntityProfile]]
    regressions: dict[Relation, RegressionModel]
    occ_variant: str = DISTINCT
    seed: int = 1

    def lexicon(self, relation) -> EntityLexicon:
        try:
            return self.lexicons[Relation(relation)]
        except (KeyError, ValueError):
            raise ModelFormatError(f"model has no lexicon for relation {relation!r}") from None

    def features(self, person_id: str, relation, entity: str) -> FeatureVector:
        relation = Relation(relation)
        return assemble_features(
            person_id, entity, self.index, self.lexicon(relation), self.embeddings,
            self.profiles[relation], self.occ_variant,
        )


def embedding_corpus(index: CorpusIndex, lexicons: Sequence[EntityLexicon]) -> list[str]:
    """All person documents, normalized with every lexicon, concatenated in person_id order."""
    tokens: list[str] = []
    for doc in index:
        tokens.extend(normalize_text(doc.text, list(lexicons), doc.full_name))
    return tokens


def generate_all(index: CorpusIndex, lexicons: Mapping[Relation, EntityLexicon],
                 config: TrainingConfig) -> dict[Relation, list[LabeledTriple]]:
    return {
        rel: generate_training_set(
            index, lex, max_pos=config.max_pos, max_neg=config.max_neg,
            negatives_per_person=config.negatives_per_person, seed=config.seed,
        )
        for rel, lex in sorted(lexicons.items())
    }


def check_training_data(training: Mapping[Relation, Sequence[LabeledTriple]]) -> None:
    problems = []
    for rel, triples in sorted(training.items()):
        pos = sum(t.score == MAX_SCORE for t in triples)
        neg = sum(t.score == MIN_SCORE for t in triples)
        if pos < 1 or neg < 1:
            problems.append(f"{rel}: {pos} positive / {neg} negative")
    if problems:
        raise InsufficientDataError(
            "distant supervision needs at least one positive and one negative per relation ("
            + "; ".join(problems) + ")"
        )


def feature_matrix(model: ScoringModel, triples: Sequence[LabeledTriple]) -> list[FeatureVector]:
    return [model.features(t.person_id, t.relation, t.entity) for t in triples]


def train_model(
    index: CorpusIndex,
    lexicons: Mapping[Relation, EntityLexicon] | Sequence[EntityLexicon],
    config: TrainingConfig | None = None,
    training: Mapping[Relation, Sequence[LabeledTriple]] | None = None,
) -> tuple[ScoringModel, dict[Relation, list[LabeledTriple]]]:
    """Fit everything a :class:`ScoringModel` needs.

    Returns the model and the distant-supervision training triples used. Pass
    ``training`` to reuse triples generated earlier (e.g. a ``train.tsv``).
    """
    config = config or TrainingConfig()
    if not isinstance(lexicons, Mapping):
        lexicons = {lex.relation_type: lex for lex in lexicons}
    lexicons = dict(sorted(lexicons.items()))
    if training is None:
        training = generate_all(index, lexicons, config)
    training = {rel: sorted(training.get(rel, ())) for rel in lexicons}
    check_training_data(training)

    emb_config = dataclasses.replace(config.embedding, seed=config.seed)
    table = train_skipgram(embedding_corpus(index, list(lexicons.values())), emb_config)
    profiles = {rel: build_entity_profiles(index, lex, training[rel]) for rel, lex in lexicons.items()}

    model = ScoringModel(
        index=index, lexicons=lexicons, embeddings=table, profiles=profiles,
        regressions={}, occ_variant=config.occ_variant, seed=config.seed,
    )
    for rel, triples in training.items():
        fvs = feature_matrix(model, triples)
        X = [[getattr(f, name) for name in REGRESSION_FEATURES] for f in fvs]
        y = [t.score for t in triples]
        model.regressions[rel] = fit_ols(X, y)
        logger.info("%s: fitted on %d triples: %s", rel, len(triples), model.regressions[rel])
    return model, training


def score_triple(person_id: str, relation, entity: str, model: ScoringModel) -> int:
    relation = Relation(relation)
    lexicon = model.lexicon(relation)
    lexicon.require(entity)
    doc = model.index.get(person_id)
    if doc is None:
        return MISSING_PERSON_SCORE
    verdict = summarize(doc, lexicon).verdict(entity)
    if verdict is Verdict.POSITIVE:
        return MAX_SCORE
    if verdict is Verdict.NEGATIVE:
        return MIN_SCORE
    f = model.features(person_id, relation, entity)
    return round_score(combined_score(f.occ, predict(model.regressions[relation], f)))


class ScoreFileError(ValueError):
    def __init__(self, problems: list[tuple[int, str]], path):
        self.problems = problems
        listing = "\n".join(f"  {path}:{lineno}: {msg}" for lineno, msg in problems)
        super().__init__(f"{len(problems)} bad line(s) in {path}:\n{listing}")


def _parse_triple_line(line: str):
    parts = line.split("\t")
    if len(parts) != 3:
        raise ValueError(f"expected 3 tab-separated fields, got {len(parts)}")
    pid, rel, entity = parts
    try:
        rel = Relation(rel)
    except ValueError:
        raise ValueError(f"unknown relation {rel!r}") from None
    return pid, rel, entity


def score_file(triples_path, model: ScoringModel, output_path,
               skip_bad: bool = False, threads: int = 1) -> list[tuple[int, str]]:
    """Score ``person<TAB>relation<TAB>entity`` lines, appending ``<TAB>score``.

    Input order is kept. Bad lines (wrong field count, unknown relation or
    entity) either abort with :class:`ScoreFileError` listing all of them, or
    with ``skip_bad`` are left out of the output. Returns the skipped lines.
    """
    with open(triples_path, encoding="utf-8") as f:
        raw_lines = [line.rstrip("\r\n") for line in f]

    parsed, problems = [], []
    for lineno, line in enumerate(raw_lines, start=1):
        if not line:
            continue
        try:
            pid, rel, entity = _parse_triple_line(line)
            model.lexicon(rel).require(entity)
        except (ValueError, KeyError) as exc:
            msg = exc.args[0] if exc.args else str(exc)
            problems.append((lineno, str(msg)))
            continue
        parsed.append((line, pid, rel, entity))

    if problems and not skip_bad:
        raise ScoreFileError(problems, triples_path)
    for lineno, msg in problems:
        logger.warning("%s:%d: skipped: %s", triples_path, lineno, msg)

    def run(item):
        _, pid, rel, entity = item
        return score_triple(pid, rel, entity, model)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(run, parsed))
    else:
        scores = [run(item) for item in parsed]
    out = "".join(f"{line}\t{score}\n" for (line, *_), score in zip(parsed, scores))
    Path(output_path).write_text(out, encoding="utf-8")
    return problems


def save_model(model: ScoringModel, directory) -> None:
    """Write the bundle; file contents depend only on the model."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    relations = sorted(model.lexicons)
    manifest = [
        ("format", str(BUNDLE_FORMAT)),
        ("seed", str(model.seed)),
        ("occ_variant", model.occ_variant),
        ("relations", ",".join(r.value for r in relations)),
        ("regression_features", ",".join(REGRESSION_FEATURES)),
    ]
    (d / "manifest.tsv").write_text("".join(f"{k}\t{v}\n" for k, v in manifest), encoding="utf-8")
    corpus_io.save_index(model.index, d / "corpus.json")
    save_embeddings(model.embeddings, d / "embeddings.txt")
    for rel in relations:
        sub = d / rel.value
        sub.mkdir(exist_ok=True)
        save_lexicon(model.lexicons[rel], sub / "lexicon.tsv")
        save_profiles(model.profiles[rel], sub / "profiles.tsv")
        reg = model.regressions[rel]
        lines = [f"{name}\t{w!r}" for name, w in zip(reg.features, reg.weights)]
        lines.append(f"bias\t{reg.bias!r}")
        (sub / "weights.tsv").write_text("".join(x + "\n" for x in lines), encoding="utf-8")


def _read_kv(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line:
            k, _, v = line.partition("\t")
            out[k] = v
    return out


def load_model(directory) -> ScoringModel:
    d = Path(directory)
    if not (d / "manifest.tsv").exists():
        raise ModelFormatError(f"{d} is not a model bundle (manifest.tsv missing)")
    manifest = _read_kv(d / "manifest.tsv")
    if manifest.get("format") != str(BUNDLE_FORMAT):
        raise ModelFormatError(f"unsupported bundle format {manifest.get('format')!r}")
    features = tuple(manifest["regression_features"].split(","))
    lexicons, profiles, regressions = {}, {}, {}
    for name in manifest["relations"].split(","):
        rel = Relation(name)
        sub = d / rel.value
        lexicons[rel] = load_lexicon(sub / "lexicon.tsv", rel)
        profiles[rel] = load_profiles(sub / "profiles.tsv", lexicons[rel].entities)
        w = _read_kv(sub / "weights.tsv")
        regressions[rel] = RegressionModel(
            weights=tuple(float(w[f]) for f in features), bias=float(w["bias"]), features=features,
        )
    return ScoringModel(
        index=corpus_io.load_index(d / "corpus.json"),
        lexicons=lexicons,
        embeddings=load_embeddings(d / "embeddings.txt"),
        profiles=profiles,
        regressions=regressions,
        occ_variant=manifest["occ_variant"],
        seed=int(manifest["seed"]),
    )


__all__ = [
    "InsufficientDataError", "ModelFormatError", "PersonNotFoundError", "RegressionModel",
    "ScoreFileError", "ScoringModel", "TrainingConfig", "combined_score", "fit_ols",
    "load_model", "predict", "round_score", "save_model", "score_file", "score_triple",
    "train_model",
]
