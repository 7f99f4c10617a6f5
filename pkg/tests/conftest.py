import pytest

from tatelab.multgroup import QpContext


@pytest.fixture
def ctx7():
    return QpContext(7, 64)


@pytest.fixture
def ctx13():
    return QpContext(13, 64)
