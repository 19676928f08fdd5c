"""Config package"""
from .verification_config import VerificationConfig, ConfigError

__all__ = ['VerificationConfig', 'ConfigError']
