import pytest

from morphsynth.model import load_fixture


@pytest.fixture(scope="session")
def gsm():
    return load_fixture("gsm")


@pytest.fixture(scope="session")
def toy():
    return load_fixture("toy_xyz")


@pytest.fixture(scope="session")
def fuzzy_abc():
    return load_fixture("fuzzy_abc")


@pytest.fixture(scope="session")
def ma_demo():
    return load_fixture("ma_demo")
