from dualgap.config.manager import (
    CONFIG_FILENAME,
    VI_SOLVERS,
    ExperimentConfig,
    find_config_file,
    load_config,
    parse_config,
    save_config,
)

__all__ = [
    "CONFIG_FILENAME",
    "VI_SOLVERS",
    "ExperimentConfig",
    "find_config_file",
    "load_config",
    "parse_config",
    "save_config",
]
