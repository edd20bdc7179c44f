"""Shared fixtures: synthetic separable data and corpus builders."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from paracode.classifiers import TrainingSet
from paracode.config import PipelineConfig
from paracode.corpus import Corpus, Document, Register, read_label_records, write_corpus
from paracode.embedding import HashingProvider, embed_corpus
from paracode.pipeline import cmd_train

MINI_DIR = Path(__file__).parent / "data" / "mini"

# Reference class-balance profile for synthetic fixtures: positives per
# dimension in the large gold training corpus (ae 497 / 17271, pc 1094 / 17271).
REFERENCE_BALANCE = {"ae": 497 / 17271, "pc": 1094 / 17271}


def two_gaussian_data(
    rng: np.random.Generator,
    dim: int,
    n: int,
    pos_frac: float = 0.05,
    separation_sigmas: float = 6.0,
    sigma: float = 1.0,
    per_feature: bool = False,
):
    """Two spherical Gaussians with class means +mu and -mu.

    With ``per_feature=False`` the total Euclidean separation between the
    class means is ``separation_sigmas * sigma``, spread over all
    coordinates. With ``per_feature=True`` every individual feature
    separates the classes by that amount (means at +-separation/2 per
    coordinate), which is what out-of-the-box learners need to behave
    non-degenerately in high dimension at a few percent positives.
    """
    n_pos = max(2, int(round(n * pos_frac)))
    n_neg = n - n_pos
    half = separation_sigmas * sigma / 2.0
    direction = np.ones(dim) if per_feature else np.full(dim, 1.0 / np.sqrt(dim))
    X_pos = rng.normal(0.0, sigma, size=(n_pos, dim)) + half * direction
    X_neg = rng.normal(0.0, sigma, size=(n_neg, dim)) - half * direction
    X = np.vstack([X_pos, X_neg])
    y = np.concatenate([np.ones(n_pos, dtype=np.int64), np.zeros(n_neg, dtype=np.int64)])
    perm = rng.permutation(n)
    return X[perm], y[perm]


@pytest.fixture
def separable_training_set():
    rng = np.random.default_rng(1234)
    X, y = two_gaussian_data(rng, dim=16, n=120, pos_frac=0.25)
    return TrainingSet(X, y, "pc")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def load_mini_corpus() -> Corpus:
    """The bundled mini corpus: 5 documents, gold labels, role assignments."""
    labels = read_label_records(MINI_DIR / "labels.jsonl")
    roles = json.loads((MINI_DIR / "roles.json").read_text())
    corpus = Corpus()
    for text_path in sorted(MINI_DIR.glob("*.txt")):
        party, year = text_path.stem.rsplit("_", 1)
        corpus.add_document(
            Document(
                doc_id=text_path.stem,
                party=party,
                year=int(year),
                register=Register.manifesto,
                source_language="en",
                raw_text=text_path.read_text(encoding="utf-8"),
            ),
            labels,
        )
    corpus.assign_roles(roles)
    return corpus


_MINI_CACHE: dict[int, tuple] = {}


def build_mini_pipeline(tmp_path: Path, seed: int = 42):
    """Corpus file + vectors + trained bundle over the bundled mini corpus.

    Training is memoized per seed; files are rewritten into the caller's
    tmp_path and the bundle is shallow-copied so tests can mutate it.
    """
    from paracode.classifiers import ModelBundle, save_bundle

    if seed not in _MINI_CACHE:
        corpus = load_mini_corpus()
        provider = HashingProvider(n_features=1024, seed=seed)
        vectors = embed_corpus(corpus.paragraphs(), provider)
        config = PipelineConfig(
            provider={"kind": "hashing", "n_features": 1024, "seed": seed}, seed=seed
        )
        bundle = cmd_train(config, corpus, vectors, tmp_path / "bundle.pcb")
        _MINI_CACHE[seed] = (corpus, vectors, bundle, config)

    corpus, vectors, bundle, config = _MINI_CACHE[seed]
    corpus_path = tmp_path / "corpus.jsonl"
    write_corpus(corpus.paragraphs(), corpus_path)
    bundle_copy = ModelBundle(
        seed=bundle.seed,
        provider_fingerprint=bundle.provider_fingerprint,
        train_checksum=bundle.train_checksum,
        models=dict(bundle.models),
    )
    save_bundle(bundle_copy, tmp_path / "bundle.pcb")
    return corpus, corpus_path, vectors, bundle_copy, config
