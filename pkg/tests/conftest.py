import pytest

from fluxheat.params import DEFAULT_DEVICE


@pytest.fixture
def params():
    return DEFAULT_DEVICE
