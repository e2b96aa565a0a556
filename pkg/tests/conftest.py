import pytest

from gravsweep_core import CosmologyParams


@pytest.fixture
def eds():
    """Einstein-de Sitter: omegam = 1, omegal = 0."""
    return CosmologyParams(omegam=1.0, omegab=0.05, omegal=0.0, h=0.7)


@pytest.fixture
def lcdm():
    return CosmologyParams(omegam=0.3, omegab=0.04, omegal=0.7, h=0.7)
