import importlib.metadata

__version__ = importlib.metadata.version("anosov-lab")

from anosov_lab.configs.base import LabConfig  # noqa
from anosov_lab.reps.base import RepPoint, WeightFunctional  # noqa
from anosov_lab.spectrum.table import ClassSpectrum, spectrum_table  # noqa
from anosov_lab.utils.factory import FamilyFactory  # noqa
