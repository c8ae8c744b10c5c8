"""Synthetic inputs and brute-force oracles shared by several test modules."""

import math
from collections import Counter

import numpy as np

# (criterion number, passed, description); filled by test_acceptance, printed by conftest
ACCEPTANCE_RESULTS: list = []

COOC_ENTITIES = ["Actor", "Chemist", "Singer", "Painter"]
COOC_PERSON = "JohnDoe"


def cooccurrence_corpus(seed, n_tokens=10_000):
    """Token stream where JohnDoe shares Actor's context words and no one else's.

    Each "sentence" draws six context words private to one entity, three shared
    filler words and the entity itself; half of the Actor sentences also carry
    the person token.
    """
    rng = np.random.default_rng(seed)
    contexts = {e: [f"{e.lower()}_ctx{i}" for i in range(8)] for e in COOC_ENTITIES}
    filler = [f"w{i}" for i in range(40)]
    tokens = []
    while len(tokens) < n_tokens:
        e = COOC_ENTITIES[rng.integers(len(COOC_ENTITIES))]
        sent = list(rng.choice(contexts[e], 6)) + list(rng.choice(filler, 3)) + [e]
        if e == "Actor" and rng.random() < 0.5:
            sent.append(COOC_PERSON)
        rng.shuffle(sent)
        tokens.extend(sent)
    return tokens[:n_tokens]


def brute_force_tau_b(a, b):
    """Kendall tau-b by classifying every pair explicitly."""
    n = len(a)
    concordant = discordant = tied_a = tied_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da, db = a[i] - a[j], b[i] - b[j]
            if da == 0:
                tied_a += 1
            if db == 0:
                tied_b += 1
            if da == 0 or db == 0:
                continue
            if (da > 0) == (db > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - tied_a) * (n0 - tied_b))
    if denom == 0:
        return None
    return (concordant - discordant) / denom


def direct_tfidf(pseudo_docs):
    """{entity: {word: weight}} straight from the definition, over word lists."""
    nonempty = {e: d for e, d in pseudo_docs.items() if d}
    n = len(nonempty)
    out = {}
    for e, words in nonempty.items():
        weights = {}
        for w in set(words):
            df = sum(1 for other in nonempty.values() if w in other)
            weights[w] = words.count(w) / len(words) * math.log(n / df)
        out[e] = weights
    return out


def direct_top(weights, k=20):
    ranked = sorted(((w, x) for w, x in weights.items() if x > 0), key=lambda p: (-p[1], p[0]))
    return ranked[:k]


def counts(tokens):
    return Counter(tokens)
