# %% [markdown]
# Training, scoring and evaluation
#
# Fits the per-relation regression, scores the fixture triples and compares
# them with the hand-assigned scores.

# %%
from pathlib import Path

from triplescore import EmbeddingConfig, Relation, TrainingConfig, ingest_sentences, load_lexicon, train_model
from triplescore.evaluation import evaluate, format_error_table, per_feature_error, read_scored
from triplescore.scorer import score_triple

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
index = ingest_sentences(DATA / "sentences.tsv", DATA / "persons.tsv")
lexicons = [load_lexicon(DATA / "professions.tsv", Relation.PROFESSION),
            load_lexicon(DATA / "nationalities.tsv", Relation.NATIONALITY)]

model, training = train_model(index, lexicons, TrainingConfig(embedding=EmbeddingConfig(dimension=16), seed=7))
for rel, reg in model.regressions.items():
    print(f"{rel.value:12s} w2v={reg.weights[0]:+.3f} tfidf={reg.weights[1]:+.3f} bias={reg.bias:+.3f}")

# %%
# Training error per feature.  Occurrence order reproduces the 0/7 labels
# exactly, which says more about how the labels were made than about the feature.
errors = {rel: per_feature_error(ts, model, extra={"constant 3": lambda t: 3.0})
          for rel, ts in training.items()}
print(format_error_table(errors))

# %%
truth = read_scored(DATA / "truth.tsv")
pred = {key: score_triple(*key, model) for key in truth}
for key in list(truth)[:8]:
    print("\t".join(key), pred[key], truth[key])

# %%
print(evaluate(pred, truth).as_text())
