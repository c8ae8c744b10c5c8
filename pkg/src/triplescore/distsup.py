"""Training triples from distant supervision.

A (person, entity) pair is labeled

* negative when the entity is never mentioned in the person's document;
* positive when the entity is mentioned in the first sentence and no other
  entity of the same relation is mentioned anywhere in the document;
* unknown otherwise.

Only positives (score 7) and negatives (score 0) become training triples.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import CorpusIndex, PersonDocument, first_sentence
from .lexicon import EntityLexicon, Relation, mentions, normalize_text, strip_quoted

MAX_SCORE = 7
MIN_SCORE = 0


class Verdict(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


@dataclass(frozen=True, order=True)
class LabeledTriple:
    person_id: str
    relation: Relation
    entity: str
    score: int

    def __post_init__(self):
        object.__setattr__(self, "relation", Relation(self.relation))
        if not (MIN_SCORE <= self.score <= MAX_SCORE) or int(self.score) != self.score:
            raise ValueError(f"score must be an integer in [0, 7], got {self.score!r}")

    def to_tsv(self) -> str:
        return f"{self.person_id}\t{self.relation.value}\t{self.entity}\t{self.score}"


@dataclass(frozen=True)
class DistantLabels:
    """Mention summary of one document, enough to label any entity of the lexicon."""

    in_document: frozenset
    in_first_sentence: frozenset
    # first entity mentioned once quoted spans are removed
    first_unquoted: str | None

    def verdict(self, entity: str) -> Verdict:
        if entity not in self.in_document:
            return Verdict.NEGATIVE
        others = self.in_document - {entity}
        # also demand the entity lead the quote-stripped text, which is what the
        # occurrence-order feature reads; otherwise a title like "The Actor" could pass
        if entity in self.in_first_sentence and not others and entity == self.first_unquoted:
            return Verdict.POSITIVE
        return Verdict.UNKNOWN


def summarize(doc: PersonDocument, lexicon: EntityLexicon) -> DistantLabels:
    name = doc.full_name

    def found(text):
        return [e for e, _ in mentions(normalize_text(text, lexicon, name), lexicon)]

    unquoted = found(strip_quoted(doc.text))
    return DistantLabels(
        in_document=frozenset(found(doc.text)),
        in_first_sentence=frozenset(found(first_sentence(doc))),
        first_unquoted=unquoted[0] if unquoted else None,
    )


def label(doc: PersonDocument, entity: str, lexicon: EntityLexicon) -> Verdict:
    lexicon.require(entity)
    return summarize(doc, lexicon).verdict(entity)


def generate_training_set(
    index: CorpusIndex,
    lexicon: EntityLexicon,
    max_pos: int | None = None,
    max_neg: int | None = None,
    negatives_per_person: int = 3,
    seed: int = 0,
) -> list[LabeledTriple]:
    """Label every person in ``index`` and emit score-7/score-0 triples.

    Persons are visited in ``person_id`` order; ``max_pos``/``max_neg`` cap the
    totals (``None`` = unlimited). Each person's negatives are drawn from the
    entities absent from their document by an RNG seeded with
    ``(seed, person_id)``, so one person's sample does not depend on the rest
    of the corpus. Output is sorted by (person_id, entity).
    """
    for name, value in (("max_pos", max_pos), ("max_neg", max_neg),
                        ("negatives_per_person", negatives_per_person)):
        if value is not None and value < 0:
            raise ValueError(f"{name} must be non-negative, got {value}")
    relation = lexicon.relation_type
    entities = lexicon.entities
    out: list[LabeledTriple] = []
    n_pos = n_neg = 0
    for doc in index:
        summary = summarize(doc, lexicon)
        if max_pos is None or n_pos < max_pos:
            for entity in sorted(summary.in_document):
                if summary.verdict(entity) is Verdict.POSITIVE:
                    out.append(LabeledTriple(doc.person_id, relation, entity, MAX_SCORE))
                    n_pos += 1
        if max_neg is not None and n_neg >= max_neg:
            continue
        absent = [e for e in entities if e not in summary.in_document]
        k = min(negatives_per_person, len(absent))
        if max_neg is not None:
            k = min(k, max_neg - n_neg)
        rng = random.Random(f"{seed}:{doc.person_id}")
        for entity in rng.sample(absent, k):
            out.append(LabeledTriple(doc.person_id, relation, entity, MIN_SCORE))
        n_neg += k
    out.sort(key=lambda t: (t.person_id, t.relation.value, t.entity))
    return out


def write_triples(triples: Iterable[LabeledTriple], path, header: str | None = None) -> None:
    lines = [f"# {header}"] if header else []
    lines += [t.to_tsv() for t in triples]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_triples(path) -> list[LabeledTriple]:
    """Read ``person<TAB>relation<TAB>entity<TAB>score`` lines; ``#`` lines are comments."""
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields, got {len(parts)}")
            pid, rel, entity, score = parts
            try:
                out.append(LabeledTriple(pid, Relation(rel), entity, int(score)))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out
