import pytest
from hypothesis import HealthCheck, settings

from arrfaces import chain_tree

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


@pytest.fixture(autouse=True)
def _audit_tree_height():
    old = chain_tree.CHECK_HEIGHT
    chain_tree.CHECK_HEIGHT = True
    yield
    chain_tree.CHECK_HEIGHT = old
