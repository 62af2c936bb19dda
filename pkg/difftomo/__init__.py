from .experiment import Experiment
from .exporter.converter import Result
from .importer.config import ExperimentConfig, load_config
from ._version import __version__
