# %% [markdown]
# The three features
#
# Skip-gram similarity between person and entity tokens, overlap with an
# entity's TF-IDF profile, and the occurrence-order heuristic.

# %%
from pathlib import Path

import numpy as np

from triplescore import EmbeddingConfig, Relation, ingest_sentences, load_lexicon, train_skipgram
from triplescore.distsup import generate_training_set
from triplescore.features import build_entity_profiles, occurrence_order_scores
from triplescore.scorer import embedding_corpus

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
index = ingest_sentences(DATA / "sentences.tsv", DATA / "persons.tsv")
professions = load_lexicon(DATA / "professions.tsv", Relation.PROFESSION)
nationalities = load_lexicon(DATA / "nationalities.tsv", Relation.NATIONALITY)

# %%
# Embeddings are trained on the normalized corpus.  The fixture is tiny, so
# min_count=1 keeps every token in the vocabulary.
tokens = embedding_corpus(index, [professions, nationalities])
table = train_skipgram(tokens, EmbeddingConfig(dimension=16, min_count=1, seed=3))
print(f"{len(table.vocab)} words, loss per epoch:", np.round(table.epoch_losses, 4))
print(table.most_similar("Actor", 5))

# %%
labels = generate_training_set(index, professions, seed=1)
profiles = build_entity_profiles(index, professions, labels)
for entity, profile in list(profiles.items())[:3]:
    words = ", ".join(f"{w} ({x:.3f})" for w, x in profile.top_words[:5])
    print(f"{entity}: {words}")

# %%
for doc in list(index)[:5]:
    print(doc.person_id, occurrence_order_scores(doc, professions))
