"""
Verification Configuration
Size caps, sweep settings, seeds and schema version for the finite-flow lab
"""

from typing import Dict, Any, Optional
import os
from dotenv import load_dotenv

load_dotenv()


class ConfigError(ValueError):
    """Raised for unknown or invalid configuration overrides"""


class VerificationConfig:
    """Configuration for exhaustive verification runs"""

    # Size caps; every one can be overridden by FLOWLAB_CAP_<KEY> or --caps key=value
    CAPS = {
        'subgroup_enumeration': 256,
        'automorphism': 64,
        'symmetric_degree': 6,
        'table_order': 10_000,
        'associativity_check': 1024,
        'isomorphism_points': 512,
        'pipeline_order': 256,
        'sweep_order': 24,
        'sweep_workers': 4,
    }

    CAP_DESCRIPTIONS = {
        'subgroup_enumeration': 'Largest group order for full subgroup enumeration',
        'automorphism': 'Largest group order for brute-force automorphism enumeration',
        'symmetric_degree': 'Largest n accepted by symmetric(n) and alternating(n)',
        'table_order': 'Largest group order stored as a dense Cayley table',
        'associativity_check': 'Largest order checked exhaustively for associativity',
        'isomorphism_points': 'Largest phase-space size accepted by the isomorphism oracle',
        'pipeline_order': 'Largest group order run through the exhaustive flow pipelines',
        'sweep_order': 'Largest catalog group order visited by the acceptance sweep',
        'sweep_workers': 'Worker threads used by the sweep',
    }

    DEFAULT_SEED = 20240101
    SECOND_SEED = 97
    SCHEMA_VERSION = '1.0'
    DEFAULT_LOG_LEVEL = 'WARNING'

    @classmethod
    def get_caps(cls) -> Dict[str, int]:
        """Get caps with environment overrides applied"""
        caps = cls.CAPS.copy()
        for key in caps:
            raw = os.getenv(f'FLOWLAB_CAP_{key.upper()}')
            if raw:
                caps[key] = cls._parse_cap(key, raw)
        return caps

    @classmethod
    def with_overrides(cls, overrides: Optional[Dict[str, Any]] = None) -> Dict[str, int]:
        """
        Merge user overrides into the environment-aware defaults

        Args:
            overrides: Mapping of cap name to value (ints or numeric strings)

        Returns:
            Complete caps dict
        """
        caps = cls.get_caps()
        for key, value in (overrides or {}).items():
            if key not in cls.CAPS:
                raise ConfigError(f"Unknown cap: {key}")
            caps[key] = cls._parse_cap(key, value)
        return caps

    @classmethod
    def cap(cls, name: str, caps: Optional[Dict[str, int]] = None) -> int:
        """Look up a single cap, falling back to the defaults"""
        if name not in cls.CAPS:
            raise ConfigError(f"Unknown cap: {name}")
        if caps and name in caps:
            return caps[name]
        return cls.get_caps()[name]

    @classmethod
    def get_default_catalog_path(cls) -> Optional[str]:
        """Optional JSON file of extra catalog groups"""
        path = os.getenv('FLOWLAB_CATALOG_PATH', '').strip()
        return path or None

    @classmethod
    def get_log_level(cls) -> str:
        """Get log level from environment"""
        return os.getenv('FLOWLAB_LOG_LEVEL', cls.DEFAULT_LOG_LEVEL).upper()

    @classmethod
    def get_default_seed(cls) -> int:
        raw = os.getenv('FLOWLAB_SEED', '').strip()
        return int(raw) if raw else cls.DEFAULT_SEED

    @staticmethod
    def _parse_cap(key: str, value: Any) -> int:
        try:
            parsed = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"Cap {key} must be an integer, got {value!r}")
        if parsed < 0:
            raise ConfigError(f"Cap {key} must be non-negative, got {parsed}")
        return parsed
