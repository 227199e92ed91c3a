import pytest

import embedfixture
import repofixture


@pytest.fixture(scope="session")
def tiny_model():
    """Hand-built ten-word embedding; read-only across the session."""
    return embedfixture.build_model()


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory):
    """The ten-commit fixture repository; tests must not mutate it."""
    base = tmp_path_factory.mktemp("fixture-repo")
    return repofixture.build_repo(base)
