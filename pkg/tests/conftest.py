import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spsfork.generators import S7_IDS, grid, named  # noqa: E402
from spsfork.harness import corpus_instances  # noqa: E402


@pytest.fixture
def s7():
    return named("s7")


@pytest.fixture
def c2sq():
    return grid(2, 2)


@pytest.fixture
def s7_ids():
    return dict(S7_IDS)


@pytest.fixture(scope="session")
def corpus():
    """The default corpus, shared so per-square caches are reused."""
    return corpus_instances(range(200))


@pytest.fixture(scope="session")
def small_corpus():
    return corpus_instances(range(25))
