from .config import ConfigError, ExperimentConfig, build_config, load_config
from .main import main
