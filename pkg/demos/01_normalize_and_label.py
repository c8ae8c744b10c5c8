# %% [markdown]
# Normalizing person articles and labelling triples
#
# Walks one article from the fixture corpus through alias replacement,
# quote stripping and the distant-supervision verdict.

# %%
from pathlib import Path

from triplescore import Relation, ingest_sentences, load_lexicon, normalize_text, strip_quoted
from triplescore.distsup import generate_training_set, label, summarize

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

index = ingest_sentences(DATA / "sentences.tsv", DATA / "persons.tsv")
professions = load_lexicon(DATA / "professions.tsv", Relation.PROFESSION)
nationalities = load_lexicon(DATA / "nationalities.tsv", Relation.NATIONALITY)
print(f"{index.persons_found} of {index.persons_requested} persons have sentences")

# %%
# Aliases become one canonical token per entity and the person's name parts
# collapse into a single token, so "Dutch" and "Holland" both read as Netherlands.
doc = next(iter(index))
print(doc.full_name, "|", doc.sentences[0])
print(normalize_text(doc.sentences[0], nationalities, doc.full_name))

# %%
# Quoted titles are dropped before occurrence order is computed.
print(strip_quoted('She starred in "The Singer" and later painted.'))

# %%
for entity in professions.entities[:4]:
    print(f"{entity:28s} {label(doc, entity, professions).value}")
print(summarize(doc, professions))

# %%
triples = generate_training_set(index, professions, seed=1)
pos = sum(t.score == 7 for t in triples)
print(f"{len(triples)} profession triples, {pos} positive, {len(triples) - pos} negative")
for t in triples[:5]:
    print(t.to_tsv())
