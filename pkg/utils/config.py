# utils/config.py
import logging
import os

DEFAULT_FIELD_MODULUS = 65537
DEFAULT_MAX_ATTEMPTS = 32
GENERATOR_ID = "philox-seedseq-v1"
EXPLICIT_GENERATOR = "explicit"
DESCRIPTOR_MAGIC = "MSRCODE"
DESCRIPTOR_VERSION = 1

BYTES_PER_SUBSYMBOL = 2
PACKING_LIMIT = 2 ** (8 * BYTES_PER_SUBSYMBOL)
ZERO_PAD_SCHEME = 1

SCHEME_ALIGNMENT = "alignment"
SCHEME_SCALAR = "scalar"


class Settings:
    """
    Runtime settings shared by the CLI, the app and the library.

    Args:
        field_modulus (int): Default prime q for new codes
        max_attempts (int): Construction attempts before giving up
        workers (int): Threads used by the verification routines
        log_level (str): Logging level name
    """

    def __init__(self, field_modulus=DEFAULT_FIELD_MODULUS, max_attempts=DEFAULT_MAX_ATTEMPTS,
                 workers=1, log_level="WARNING"):
        self.field_modulus = field_modulus
        self.max_attempts = max_attempts
        self.workers = workers
        self.log_level = log_level

    @classmethod
    def from_env(cls, environ=None):
        """Build settings from MSR_* environment variables, falling back to defaults."""
        environ = os.environ if environ is None else environ
        return cls(
            field_modulus=int(environ.get("MSR_FIELD_MODULUS", DEFAULT_FIELD_MODULUS)),
            max_attempts=int(environ.get("MSR_MAX_ATTEMPTS", DEFAULT_MAX_ATTEMPTS)),
            workers=max(1, int(environ.get("MSR_WORKERS", 1))),
            log_level=environ.get("MSR_LOG_LEVEL", "WARNING").upper(),
        )

    def to_dict(self):
        return {
            'field_modulus': self.field_modulus,
            'max_attempts': self.max_attempts,
            'workers': self.workers,
            'log_level': self.log_level,
        }


def configure_logging(level):
    """Configure the root logger once for command-line use."""
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
