"""Shared fixtures: a small synthetic tone corpus and a trained bundle.

The corpus is intentionally tiny (4 dogs x 4 sentences) so the whole
suite trains in well under a second; the acceptance tests build their
own full-size corpus.
"""

import pytest

from barklex.pipeline import PipelineConfig, run_pipeline
from barklex.synth import make_corpus, write_corpus


@pytest.fixture(scope="session")
def synth_corpus(tmp_path_factory):
    corpus = make_corpus(n_dogs=4, sentences_per_dog=4, seed=0)
    path = tmp_path_factory.mktemp("corpus")
    write_corpus(corpus, path)
    return corpus, path


@pytest.fixture(scope="session")
def corpus_dir(synth_corpus):
    return synth_corpus[1]


@pytest.fixture(scope="session")
def trained(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("model_out")
    config = PipelineConfig(input_dir=str(corpus_dir), out_dir=str(out),
                            k=12, seed=0, restarts=3)
    return config, run_pipeline(config)


@pytest.fixture(scope="session")
def bundle(trained):
    return trained[1].bundle


@pytest.fixture(scope="session")
def model_out_dir(trained):
    return trained[0].out_dir
