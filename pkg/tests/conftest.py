from pathlib import Path

import pytest
from helpers import ACCEPTANCE_RESULTS

from triplescore.corpus import ingest_sentences
from triplescore.embeddings import EmbeddingConfig
from triplescore.lexicon import Relation, load_lexicon
from triplescore.scorer import TrainingConfig, train_model

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def index():
    return ingest_sentences(FIXTURES / "sentences.tsv", FIXTURES / "persons.tsv")


@pytest.fixture(scope="session")
def professions():
    return load_lexicon(FIXTURES / "professions.tsv", Relation.PROFESSION)


@pytest.fixture(scope="session")
def nationalities():
    return load_lexicon(FIXTURES / "nationalities.tsv", Relation.NATIONALITY)


@pytest.fixture(scope="session")
def training_config():
    return TrainingConfig(embedding=EmbeddingConfig(dimension=16), seed=7)


@pytest.fixture(scope="session")
def trained(index, professions, nationalities, training_config):
    """(model, training triples) for the fixture corpus."""
    return train_model(index, [professions, nationalities], training_config)


@pytest.fixture(scope="session")
def model(trained):
    return trained[0]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {text}")
