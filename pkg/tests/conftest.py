import pytest

from pulsegate import acceptance
from pulsegate.jsa import build_jsa
from pulsegate.schmidt import schmidt_decompose


@pytest.fixture(scope="session")
def qpg_spec():
    return acceptance.engineered_spec()


@pytest.fixture(scope="session")
def qpg_jsa(qpg_spec):
    return build_jsa(qpg_spec)


@pytest.fixture(scope="session")
def qpg_schmidt(qpg_jsa):
    return schmidt_decompose(qpg_jsa)
