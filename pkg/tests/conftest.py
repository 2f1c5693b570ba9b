import pytest

from featlog import Symbols


@pytest.fixture
def sym() -> Symbols:
    return Symbols()
