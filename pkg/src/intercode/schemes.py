"""Registry of every coding scheme by name."""
from __future__ import annotations

from .engine import Scheme
from .erasure import ERASURE_6ARY, ERASURE_6OF10, ERASURE_THIRD
from .errors import ConfigurationError
from .feedback import ADAPTIVE_BINARY, ADAPTIVE_TERNARY, FIXED_BINARY, FIXED_TERNARY

SCHEMES: dict[str, Scheme] = {
    s.name: s
    for s in (FIXED_TERNARY, ADAPTIVE_TERNARY, FIXED_BINARY, ADAPTIVE_BINARY,
              ERASURE_6ARY, ERASURE_6OF10, ERASURE_THIRD)
}


def get_scheme(name: str | Scheme) -> Scheme:
    if isinstance(name, Scheme):
        return name
    try:
        return SCHEMES[name]
    except KeyError:
        raise ConfigurationError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}") from None
