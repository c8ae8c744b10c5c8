"""Entity TF-IDF profiles, the TF-IDF feature and the occurrence-order score."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import CorpusIndex, PersonDocument
from .distsup import MAX_SCORE, LabeledTriple
from .embeddings import EmbeddingTable, w2v_feature
from .lexicon import (
    EntityLexicon,
    mentions,
    normalize_text,
    person_token,
    strip_quoted,
)

PROFILE_SIZE = 20

DISTINCT = "distinct-entities"
RAW = "raw-mentions"
OCC_VARIANTS = (DISTINCT, RAW)


class PersonNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class EntityProfile:
    entity: str
    top_words: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "top_words", tuple((w, float(x)) for w, x in self.top_words))
        weights = [x for _, x in self.top_words]
        if any(x < 0 for x in weights) or any(a < b for a, b in zip(weights, weights[1:])):
            raise ValueError(f"profile weights of {self.entity!r} must be non-negative and non-increasing")

    @property
    def max_weight(self) -> float:
        return self.top_words[0][1] if self.top_words else 0.0

    def __len__(self) -> int:
        return len(self.top_words)


@dataclass(frozen=True)
class FeatureVector:
    w2v: float
    tfidf: float
    occ: int


def document_tokens(doc: PersonDocument, lexicon) -> list[str]:
    return normalize_text(doc.text, lexicon, doc.full_name)


def build_entity_profiles(
    index: CorpusIndex,
    lexicon: EntityLexicon,
    labels: Iterable[LabeledTriple],
    size: int = PROFILE_SIZE,
) -> dict[str, EntityProfile]:
    """Top-``size`` tf-idf words per entity.

    Each entity's pseudo-document concatenates the normalized documents of the
    persons labeled positive for it. With ``N`` non-empty pseudo-documents,

        weight(t, D) = count(t, D) / len(D) * ln(N / df(t))

    Entity tokens, person tokens and zero-weight words are never profile words.
    Ties are broken alphabetically.
    """
    positives: dict[str, list[str]] = {e: [] for e in lexicon.entities}
    for t in labels:
        if t.relation == lexicon.relation_type and t.score == MAX_SCORE and t.entity in positives:
            if t.person_id in index:
                positives[t.entity].append(t.person_id)

    pseudo: dict[str, list[str]] = {}
    excluded = set(lexicon.token_to_entity)
    for entity, pids in positives.items():
        tokens: list[str] = []
        for pid in sorted(set(pids)):
            doc = index.documents[pid]
            tokens.extend(document_tokens(doc, lexicon))
            excluded.add(person_token(doc.full_name))
        if tokens:
            pseudo[entity] = tokens

    n_docs = len(pseudo)
    df: Counter = Counter()
    for tokens in pseudo.values():
        df.update(set(tokens))

    profiles = {}
    for entity in lexicon.entities:
        tokens = pseudo.get(entity)
        if not tokens:
            profiles[entity] = EntityProfile(entity)
            continue
        tf = Counter(tokens)
        length = len(tokens)
        scored = []
        for word, count in tf.items():
            if word in excluded:
                continue
            weight = count / length * math.log(n_docs / df[word])
            if weight > 0:
                scored.append((word, weight))
        scored.sort(key=lambda wx: (-wx[1], wx[0]))
        profiles[entity] = EntityProfile(entity, tuple(scored[:size]))
    return profiles


def tfidf_feature(tokens: Iterable[str], profile: EntityProfile) -> float:
    """Sum of ``weight / max_weight`` over profile words present in ``tokens``, over 20."""
    if not profile.top_words or profile.max_weight <= 0:
        return 0.0
    present = set(tokens)
    top = profile.max_weight
    total = sum(weight / top for word, weight in profile.top_words if word in present)
    return min(total / PROFILE_SIZE, 1.0)


def occurrence_order_scores(
    doc: PersonDocument,
    lexicon: EntityLexicon,
    variant: str = DISTINCT,
) -> dict[str, int]:
    """Scores of every entity mentioned outside double quotes.

    With ``distinct-entities`` the k-th distinct entity by first mention gets
    ``max(0, 8 - k)``. With ``raw-mentions`` every mention, repeats included,
    steps the score down and an entity keeps the score of its first mention.
    Entities not in the result score 0.
    """
    if variant not in OCC_VARIANTS:
        raise ValueError(f"unknown occurrence-order variant {variant!r}")
    tokens = normalize_text(strip_quoted(doc.text), lexicon, doc.full_name)
    scores: dict[str, int] = {}
    rank = 0
    for entity, _ in mentions(tokens, lexicon):
        if variant == RAW:
            rank += 1
            if entity not in scores:
                scores[entity] = max(0, MAX_SCORE + 1 - rank)
        elif entity not in scores:
            rank += 1
            scores[entity] = max(0, MAX_SCORE + 1 - rank)
    return scores


def occurrence_order_score(
    doc: PersonDocument,
    entity: str,
    lexicon: EntityLexicon,
    variant: str = DISTINCT,
) -> int:
    lexicon.require(entity)
    return occurrence_order_scores(doc, lexicon, variant).get(entity, 0)


def assemble_features(
    person_id: str,
    entity: str,
    index: CorpusIndex,
    lexicon: EntityLexicon,
    table: EmbeddingTable,
    profiles: Mapping[str, EntityProfile],
    variant: str = DISTINCT,
) -> FeatureVector:
    lexicon.require(entity)
    doc = index.get(person_id)
    if doc is None:
        raise PersonNotFoundError(person_id)
    tokens = document_tokens(doc, lexicon)
    profile = profiles.get(entity) or EntityProfile(entity)
    return FeatureVector(
        w2v=w2v_feature(person_token(doc.full_name), lexicon.token(entity), table),
        tfidf=tfidf_feature(tokens, profile),
        occ=occurrence_order_score(doc, entity, lexicon, variant),
    )


def save_profiles(profiles: Mapping[str, EntityProfile], path) -> None:
    lines = []
    for entity in sorted(profiles):
        for word, weight in profiles[entity].top_words:
            lines.append(f"{entity}\t{word}\t{weight!r}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_profiles(path, entities: Sequence[str] = ()) -> dict[str, EntityProfile]:
    """Read ``entity<TAB>word<TAB>weight``; ``entities`` adds empty profiles for the rest."""
    words: dict[str, list[tuple[str, float]]] = {e: [] for e in entities}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            words.setdefault(parts[0], []).append((parts[1], float(parts[2])))
    return {e: EntityProfile(e, tuple(ws)) for e, ws in words.items()}
