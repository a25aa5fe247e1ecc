import os
import sys
from pathlib import Path

from dotenv import load_dotenv
from loguru import logger

# Load environment variables from .env file
load_dotenv()


class EnvConfig:
    """Load runtime settings from environment variables

    Settings here never change simulation results; they choose where files go,
    how loud the logs are and how many seed workers run. Everything that
    affects numbers lives in the experiment file (see config/schema.py).
    """

    @staticmethod
    def _get_project_root() -> Path:
        """Get absolute path to project root directory"""
        # From spatial_cim/config/env_config.py -> spatial_cim/ -> src/ -> project_root/
        current_file = Path(__file__).resolve()
        return current_file.parent.parent.parent.parent

    @staticmethod
    def _resolve(path: str) -> str:
        if not os.path.isabs(path):
            path = str(EnvConfig._get_project_root() / path)
        return path

    @staticmethod
    def get_output_dir() -> str:
        """Get default directory for run outputs"""
        return EnvConfig._resolve(os.getenv('SPATIAL_CIM_OUTPUT_DIR', 'runs'))

    @staticmethod
    def get_presets_path() -> str:
        """Get path of the packaged parameter presets"""
        default = str(Path(__file__).resolve().parent / 'presets.json')
        return EnvConfig._resolve(os.getenv('SPATIAL_CIM_PRESETS_PATH', default))

    @staticmethod
    def get_threads() -> int:
        """Get default number of seed workers"""
        value = os.getenv('SPATIAL_CIM_THREADS', '1')
        try:
            threads = int(value)
        except ValueError:
            threads = 1
        return max(1, threads)

    @staticmethod
    def get_log_level() -> str:
        """Get logging level"""
        return os.getenv('LOG_LEVEL', 'info')


def configure_logging(level: str | None = None) -> None:
    """Route loguru output to stderr at the configured level."""
    level = (level or EnvConfig.get_log_level()).upper()
    logger.remove()
    logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} {level: <7} {message}")
