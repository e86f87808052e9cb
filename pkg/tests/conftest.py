import os
import random
from pathlib import Path

import pytest

from dmn import load_corpus, parse_dmn

REPO_ROOT = Path(__file__).resolve().parents[1]
MINI_CORPUS = REPO_ROOT / "data" / "mini_corpus"
MODELS_DIR = MINI_CORPUS / "models"
DATASET_ENV = "DMN_LAWBENCH_DATASET"


def mini_model_path(model_id: str) -> Path:
    """Path of a bundled model by id, whatever its type prefix"""
    matches = sorted(MODELS_DIR.glob(f"* - {model_id}.dmn"))
    if len(matches) != 1:
        raise FileNotFoundError(f"no bundled model '{model_id}' in {MODELS_DIR}")
    return matches[0]


def load_mini_model(model_id: str):
    path = mini_model_path(model_id)
    return parse_dmn(path.read_bytes(), source_name=path.name)


@pytest.fixture(scope="session")
def mini_corpus_dir() -> Path:
    return MINI_CORPUS


@pytest.fixture(scope="session")
def mini_corpus():
    return load_corpus(MODELS_DIR, MINI_CORPUS / "articles", MINI_CORPUS / "srl")


@pytest.fixture(scope="session")
def gold_graphs(mini_corpus):
    return {bundle.model_id: bundle.graph for bundle in mini_corpus}


@pytest.fixture
def windturbine():
    return load_mini_model("GeluidProdWindturbine")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def dataset_dir() -> Path:
    location = os.environ.get(DATASET_ENV)
    if not location:
        pytest.skip(f"{DATASET_ENV} is not set; the public dataset is not available")
    path = Path(location)
    if not (path / "models").is_dir():
        pytest.skip(f"{DATASET_ENV}={location} has no models/ directory")
    return path
