import pytest

from endlab.theorem_lab import default_catalog


@pytest.fixture(scope="session")
def catalog():
    """Default catalog entries by name; backends are cached per entry."""
    return {e.name: e for e in default_catalog()}
