import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import build_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus_200(tmp_path_factory):
    """The 200-page fixture corpus with mock engine, built once per run."""
    root = tmp_path_factory.mktemp("corpus200")
    return build_corpus(root)


@pytest.fixture(scope="session")
def corpus_50(tmp_path_factory):
    """A 50-page variant for cheaper crawl tests."""
    root = tmp_path_factory.mktemp("corpus50")
    return build_corpus(
        root,
        n_premium=4,
        n_mid=3,
        n_irrelevant=41,
        n_cluster_seeds=2,
        n_irrelevant_seeds=4,
    )
