"""Per-person documents assembled from a person-annotated sentences file.

Input is two UTF-8 TSV files:

* ``sentences.tsv`` -- ``person_id<TAB>sentence``, one sentence per line;
* ``persons.tsv`` -- ``person_id<TAB>full_name``, the manifest of persons to look up.

Every person with at least one sentence gets a :class:`PersonDocument`; persons
listed in the manifest without sentences only count towards ``persons_requested``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

logger = logging.getLogger(__name__)

INDEX_FORMAT_VERSION = 1


class CorpusError(Exception):
    """Base class for ingestion problems."""


class CorpusParseError(CorpusError, ValueError):
    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{self.path}:{lineno}: {message}")


class CorpusValidationError(CorpusError, ValueError):
    pass


class UndefinedCoverageError(CorpusError, ZeroDivisionError):
    pass


@dataclass(frozen=True)
class PersonDocument:
    person_id: str
    full_name: str
    sentences: tuple[str, ...]

    def __post_init__(self):
        if not self.sentences:
            raise CorpusValidationError(f"document for {self.person_id!r} has no sentences")
        # lists sneak in from callers and json; keep the dataclass hashable
        object.__setattr__(self, "sentences", tuple(self.sentences))

    @property
    def text(self) -> str:
        return " ".join(self.sentences)


@dataclass(frozen=True)
class CorpusIndex:
    documents: Mapping[str, PersonDocument]
    persons_requested: int
    # names of manifest persons, including those without sentences
    names: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.documents) > self.persons_requested:
            raise CorpusValidationError(
                f"{len(self.documents)} documents but only {self.persons_requested} persons requested"
            )

    @property
    def persons_found(self) -> int:
        return len(self.documents)

    def __contains__(self, person_id: str) -> bool:
        return person_id in self.documents

    def __iter__(self) -> Iterator[PersonDocument]:
        for pid in sorted(self.documents):
            yield self.documents[pid]

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, person_id: str) -> PersonDocument | None:
        return self.documents.get(person_id)


def _split_tsv(path, lineno: int, line: str, nfields: int) -> list[str]:
    parts = line.split("\t")
    if len(parts) != nfields:
        raise CorpusParseError(
            path, lineno, f"expected {nfields} tab-separated fields, got {len(parts)}"
        )
    return parts


def read_persons(persons_path) -> dict[str, str]:
    """Read the ``person_id<TAB>full_name`` manifest, preserving file order."""
    names: dict[str, str] = {}
    with open(persons_path, encoding="utf-8", newline="\n") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            pid, name = _split_tsv(persons_path, lineno, line, 2)
            if pid in names:
                raise CorpusValidationError(
                    f"{persons_path}:{lineno}: duplicate person_id {pid!r}"
                )
            names[pid] = name
    return names


def ingest_sentences(sentences_path, persons_path) -> CorpusIndex:
    """Build a :class:`CorpusIndex` from a sentences file and a person manifest.

    Sentences keep their file order per person no matter how lines of
    different persons are interleaved. Sentences of persons missing from the
    manifest are dropped (their display name is unknown) with a warning.
    Blank lines are ignored; any other line must have exactly one TAB.
    """
    names = read_persons(persons_path)
    collected: dict[str, list[str]] = {}
    unknown: dict[str, int] = {}
    with open(sentences_path, encoding="utf-8", newline="\n") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            pid, sentence = _split_tsv(sentences_path, lineno, line, 2)
            if pid not in names:
                unknown[pid] = unknown.get(pid, 0) + 1
                continue
            collected.setdefault(pid, []).append(sentence)
    if unknown:
        logger.warning(
            "dropped sentences of %d person(s) absent from %s", len(unknown), persons_path
        )
    documents = {
        pid: PersonDocument(pid, names[pid], tuple(sents))
        for pid, sents in sorted(collected.items())
    }
    return CorpusIndex(documents=documents, persons_requested=len(names), names=names)


def first_sentence(doc: PersonDocument) -> str:
    return doc.sentences[0]


def coverage_fraction(index: CorpusIndex) -> float:
    if index.persons_requested == 0:
        raise UndefinedCoverageError("coverage is undefined for an empty person manifest")
    return index.persons_found / index.persons_requested


def dumps_index(index: CorpusIndex) -> str:
    """Serialize deterministically: sorted keys, fixed separators, trailing newline."""
    payload = {
        "format": INDEX_FORMAT_VERSION,
        "persons_requested": index.persons_requested,
        "names": dict(sorted(index.names.items())),
        "documents": {
            pid: {"full_name": doc.full_name, "sentences": list(doc.sentences)}
            for pid, doc in sorted(index.documents.items())
        },
    }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


def loads_index(data: str) -> CorpusIndex:
    payload = json.loads(data)
    if payload.get("format") != INDEX_FORMAT_VERSION:
        raise CorpusValidationError(f"unsupported index format {payload.get('format')!r}")
    documents = {
        pid: PersonDocument(pid, d["full_name"], tuple(d["sentences"]))
        for pid, d in payload["documents"].items()
    }
    return CorpusIndex(
        documents=documents,
        persons_requested=payload["persons_requested"],
        names=payload["names"],
    )


def save_index(index: CorpusIndex, path) -> None:
    Path(path).write_text(dumps_index(index), encoding="utf-8", newline="\n")


def load_index(path) -> CorpusIndex:
    return loads_index(Path(path).read_text(encoding="utf-8"))
