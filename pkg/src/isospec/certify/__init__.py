"""Certification runs: checks, certificate JSON and the command line."""
from .config import Config, ConfigError
from .report import Certificate, CheckResult, emit_report, parse_certificate, run_certification

__all__ = [
    "Certificate",
    "CheckResult",
    "Config",
    "ConfigError",
    "emit_report",
    "parse_certificate",
    "run_certification",
]
