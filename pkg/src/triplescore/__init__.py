"""Relevance scores (0-7) for profession and nationality triples.

Distant-supervision labels, skip-gram embeddings, TF-IDF entity profiles and
an occurrence-order heuristic, combined through a linear regression.
"""

from .corpus import CorpusIndex, PersonDocument, coverage_fraction, first_sentence, ingest_sentences
from .distsup import LabeledTriple, Verdict, generate_training_set, label
from .embeddings import EmbeddingConfig, EmbeddingTable, cosine, train_skipgram, w2v_feature
from .evaluation import (
    EvalReport,
    accuracy,
    avg_score_diff,
    evaluate,
    grouped_tau,
    kendall_tau_b,
    per_feature_error,
)
from .features import (
    EntityProfile,
    FeatureVector,
    assemble_features,
    build_entity_profiles,
    occurrence_order_score,
    tfidf_feature,
)
from .lexicon import EntityLexicon, Relation, load_lexicon, mentions, normalize_text, strip_quoted
from .scorer import (
    RegressionModel,
    ScoringModel,
    TrainingConfig,
    combined_score,
    fit_ols,
    load_model,
    predict,
    save_model,
    score_file,
    score_triple,
    train_model,
)

__version__ = "0.1.0"
