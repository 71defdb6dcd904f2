"""Layered run configuration: defaults < file < environment < flags.

The config file is flat ``key = value`` text, one setting per line, with
``#`` comments.  Environment variables override the file using the
``HARDYMONO_`` prefix and the upper-cased key (``HARDYMONO_BITS=256``),
and command-line flags override both.  Keeping every layer in one plain
dict makes experiment scripts reproducible from their logs.
"""

import os

from .context import Context
from .errors import DomainError

ENV_PREFIX = "HARDYMONO_"
ALLOWED_BITS = (53, 128, 256, 512)
TOLERANCE_KEYS = (
    "psd_tol",
    "root_cluster_tol",
    "membership_tol",
    "exponent_merge_tol",
)
CONFIG_KEYS = ("bits", "out", "format") + TOLERANCE_KEYS


class Config:
    """Validated run settings shared by every subcommand."""

    def __init__(self, bits=None, out=None, format=None, **tolerances):
        if bits is not None:
            bits = int(bits)
            if bits not in ALLOWED_BITS:
                raise DomainError(
                    f"bits must be one of {ALLOWED_BITS}, got {bits}")
        if format not in (None, "json", "csv"):
            raise DomainError(f"format must be json or csv, got {format!r}")
        self.bits = bits
        self.out = out
        self.format = format
        self.tolerances = {}
        for key in TOLERANCE_KEYS:
            val = tolerances.pop(key, None)
            if val is None:
                continue
            val = float(val)
            if not val > 0.0:
                raise DomainError(f"{key} must be positive, got {val}")
            self.tolerances[key] = val
        if tolerances:
            raise DomainError(
                f"unknown config keys: {sorted(tolerances)}")

    @property
    def psd_tol(self):
        return self.tolerances.get("psd_tol")

    def context_tolerances(self):
        """Overrides understood by the numeric context (psd_tol is not;
        it feeds the positivity tests at their call sites)."""
        return {k: v for k, v in self.tolerances.items() if k != "psd_tol"}

    def context(self, default_bits=53):
        return Context.for_bits(
            self.bits if self.bits is not None else default_bits,
            **self.context_tolerances())

    def to_dict(self):
        out = {"bits": self.bits, "out": self.out, "format": self.format}
        out.update(self.tolerances)
        return out


def parse_config_text(text):
    """Parse flat ``key = value`` lines into a string-valued dict."""
    parsed = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DomainError(
                f"config line {lineno}: expected key = value, got {raw!r}")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise DomainError(
                f"config line {lineno}: unknown key {key!r}")
        parsed[key] = value.strip()
    return parsed


def _env_layer(env):
    out = {}
    for key in CONFIG_KEYS:
        val = env.get(ENV_PREFIX + key.upper())
        if val is not None:
            out[key] = val
    return out


def load_config(path=None, env=None, flags=None):
    """Merge the three layers and coerce strings to typed values."""
    merged = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            merged.update(parse_config_text(fh.read()))
    merged.update(_env_layer(os.environ if env is None else env))
    for key, val in (flags or {}).items():
        if val is None:
            continue
        if key not in CONFIG_KEYS:
            raise DomainError(f"unknown config key {key!r}")
        merged[key] = val
    kwargs = {}
    for key, val in merged.items():
        try:
            if key == "bits":
                kwargs[key] = int(val)
            elif key in ("out", "format"):
                kwargs[key] = str(val)
            else:
                kwargs[key] = float(val)
        except (TypeError, ValueError):
            raise DomainError(f"config key {key!r}: bad value {val!r}")
    return Config(**kwargs)
