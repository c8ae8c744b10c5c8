"""Entity lexicons and text normalization.

Matching works on word tokens (maximal alphanumeric runs) rather than raw
characters, so "Iran" never matches inside "Irani" and punctuation between the
words of a multi-word alias does not matter. Comparison is case-insensitive.
Recognised entity mentions are emitted as the canonical token form (the
canonical name with spaces removed, original casing kept); the person's name
parts are emitted as the collapsed full name. Everything else is lowercased.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

_WORD = re.compile(r"[^\W_]+")

# minimum length of a name part that gets collapsed into the person token
MIN_NAME_PART = 3

TokenStream = list  # list[str]; tokens never contain whitespace


class Relation(str, enum.Enum):
    PROFESSION = "profession"
    NATIONALITY = "nationality"

    def __str__(self) -> str:
        return self.value


class LexiconError(ValueError):
    pass


class LexiconConflictError(LexiconError):
    pass


class UnknownEntityError(KeyError):
    pass


def words(text: str) -> list[str]:
    return _WORD.findall(text)


def _key(surface: str) -> tuple[str, ...]:
    return tuple(w.lower() for w in _WORD.findall(surface))


def entity_token(canonical: str) -> str:
    return "".join(canonical.split())


def person_token(full_name: str) -> str:
    return "".join(full_name.split())


@dataclass(frozen=True)
class EntityLexicon:
    relation_type: Relation
    entries: Mapping[str, frozenset]

    def __post_init__(self):
        object.__setattr__(self, "relation_type", Relation(self.relation_type))
        entries = {}
        for canonical, aliases in self.entries.items():
            entries[canonical] = frozenset(aliases) | {canonical}
        object.__setattr__(self, "entries", entries)
        self.patterns  # validate eagerly

    @classmethod
    def from_entries(cls, relation_type, entries: Mapping[str, Iterable[str]]) -> "EntityLexicon":
        return cls(Relation(relation_type), {c: frozenset(a) for c, a in entries.items()})

    @cached_property
    def patterns(self) -> dict[tuple[str, ...], str]:
        """Lowercased word sequence -> canonical token."""
        owner: dict[tuple[str, ...], str] = {}
        patterns: dict[tuple[str, ...], str] = {}
        for canonical in sorted(self.entries):
            tok = entity_token(canonical)
            surfaces = sorted(self.entries[canonical]) + [tok]
            for surface in surfaces:
                key = _key(surface)
                if not key:
                    raise LexiconError(f"alias {surface!r} of {canonical!r} has no word characters")
                prev = owner.get(key)
                if prev is not None and prev != canonical:
                    raise LexiconConflictError(
                        f"alias {surface!r} is claimed by both {prev!r} and {canonical!r}"
                    )
                owner[key] = canonical
                patterns[key] = tok
        return patterns

    @cached_property
    def token_to_entity(self) -> dict[str, str]:
        return {entity_token(c): c for c in self.entries}

    @property
    def entities(self) -> list[str]:
        return sorted(self.entries)

    def __contains__(self, entity: str) -> bool:
        return entity in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def token(self, entity: str) -> str:
        self.require(entity)
        return entity_token(entity)

    def require(self, entity: str) -> None:
        if entity not in self.entries:
            raise UnknownEntityError(f"{entity!r} is not a canonical {self.relation_type} entity")

    def resolve(self, alias: str) -> str | None:
        """Canonical entity for an alias (case-insensitive), or None."""
        tok = self.patterns.get(_key(alias))
        return None if tok is None else self.token_to_entity[tok]


def load_lexicon(path, relation_type) -> EntityLexicon:
    """Read ``canonical<TAB>alias<TAB>alias...`` lines."""
    entries: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = [x.strip() for x in line.split("\t")]
            canonical, aliases = fields[0], [a for a in fields[1:] if a]
            if not canonical:
                raise LexiconError(f"{path}:{lineno}: empty canonical entity")
            if canonical in entries:
                raise LexiconError(f"{path}:{lineno}: duplicate canonical entity {canonical!r}")
            entries[canonical] = set(aliases)
    return EntityLexicon.from_entries(relation_type, entries)


def save_lexicon(lexicon: EntityLexicon, path) -> None:
    lines = []
    for canonical in lexicon.entities:
        aliases = sorted(a for a in lexicon.entries[canonical] if a != canonical)
        lines.append("\t".join([canonical, *aliases]))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


LexiconLike = Union[EntityLexicon, Sequence[EntityLexicon]]


def _merged_patterns(lexicon: LexiconLike) -> dict[tuple[str, ...], str]:
    if isinstance(lexicon, EntityLexicon):
        return lexicon.patterns
    merged: dict[tuple[str, ...], str] = {}
    for lex in lexicon:
        merged.update(lex.patterns)
    return merged


def name_patterns(full_name: str) -> dict[tuple[str, ...], str]:
    if not full_name or not _key(full_name):
        return {}
    tok = person_token(full_name)
    patterns = {}
    for part in words(full_name):
        if len(part) >= MIN_NAME_PART:
            patterns[(part.lower(),)] = tok
    patterns[_key(full_name)] = tok
    patterns[_key(tok)] = tok
    return patterns


def normalize_text(text: str, lexicon: LexiconLike, person_full_name: str | None = None) -> list[str]:
    """Tokenize ``text``, canonicalizing entity aliases and the person's name.

    ``lexicon`` may be one lexicon or several (e.g. both relations when building
    the embedding corpus). At every position the longest matching word
    sequence wins; on equal length an entity alias beats a name part.
    """
    ws = words(text)
    if not ws:
        return []
    lowered = [w.lower() for w in ws]
    patterns = dict(name_patterns(person_full_name or ""))
    patterns.update(_merged_patterns(lexicon))
    longest = max((len(k) for k in patterns), default=0)

    out: list[str] = []
    i, n = 0, len(ws)
    while i < n:
        for size in range(min(longest, n - i), 0, -1):
            tok = patterns.get(tuple(lowered[i:i + size]))
            if tok is not None:
                out.append(tok)
                i += size
                break
        else:
            out.append(lowered[i])
            i += 1
    return out


_QUOTE_CLOSERS = {'"': '"', "“": "”"}
_QUOTE_CHARS = set(_QUOTE_CLOSERS) | set(_QUOTE_CLOSERS.values())


def strip_quoted(text: str) -> str:
    """Remove double-quoted spans, quotes included.

    Straight quotes pair with straight quotes and curly opening quotes with a
    curly closing quote. A quote character without a partner is dropped on
    its own. Single quotes are left alone.
    """
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in _QUOTE_CLOSERS:
            end = text.find(_QUOTE_CLOSERS[ch], i + 1)
            if end != -1:
                i = end + 1
                continue
            i += 1
            continue
        if ch in _QUOTE_CHARS:
            i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def mentions(tokens: Sequence[str], lexicon: EntityLexicon) -> list[tuple[str, int]]:
    lookup = lexicon.token_to_entity
    return [(lookup[t], pos) for pos, t in enumerate(tokens) if t in lookup]
