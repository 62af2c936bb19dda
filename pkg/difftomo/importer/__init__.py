from .parser import Parser
from .config import ExperimentConfig, CGConfig, IndicatrixConfig, load_config
