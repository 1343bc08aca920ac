import pytest

from spps import default_paper_scenario


@pytest.fixture(scope="session")
def paper():
    return default_paper_scenario()
