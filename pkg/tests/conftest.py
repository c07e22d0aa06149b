import pytest

from anosov_lab.configs.base import LabConfig, WindowConfig
from anosov_lab.fixtures import load_fixture
from anosov_lab.utils.factory import FamilyFactory


@pytest.fixture
def small_config():
    """Lab settings for short tables: the class minimum is lowered so core length 8 suffices."""
    return LabConfig(windows=WindowConfig(min_classes=20))


@pytest.fixture
def fixture_family():
    def build(name):
        return FamilyFactory.from_dict(load_fixture(name)["family"])

    return build


@pytest.fixture
def schottky_rep(fixture_family):
    return fixture_family("schottky_symmetric").at(0)


@pytest.fixture
def cyclic_rep(fixture_family):
    return fixture_family("cyclic").at(0)
