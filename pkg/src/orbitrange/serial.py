"""Number formatting and file helpers for the structured-text formats.

Reals are written as JSON strings holding the shortest round-trip decimal
(``repr(float)``) or an exact ratio ``"p/q"`` for rational inputs, so a
canonical file re-serializes byte for byte.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from numbers import Rational

from .errors import ConfigError


def parse_real(value, location="value"):
    if isinstance(value, bool):
        raise ConfigError(location, "expected a real number, got a boolean")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            if text.lstrip("+-").isdigit():
                return Fraction(int(text))
            return float(text)
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(location, f"expected a real number, got {value!r}")


def format_real(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def parse_complex(value, location="value"):
    if isinstance(value, dict):
        unknown = set(value) - {"re", "im"}
        if unknown:
            raise ConfigError(location, f"unexpected keys {sorted(unknown)}")
        re = float(parse_real(value.get("re", 0.0), f"{location}.re"))
        im = float(parse_real(value.get("im", 0.0), f"{location}.im"))
        return complex(re, im)
    return complex(float(parse_real(value, location)), 0.0)


def format_complex(z):
    z = complex(z)
    return {"re": format_real(z.real), "im": format_real(z.imag)}


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to ``path`` through a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
