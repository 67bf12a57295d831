import pytest

from mucube.surfaces import build_x, build_y


@pytest.fixture(scope="session")
def X():
    return build_x()


@pytest.fixture(scope="session")
def Y():
    return build_y()
