"""Enumeration caps.

Every exhaustive enumeration in the library is bounded. Exceeding a bound
raises :class:`~causal_unfold.errors.ConfigExplosion` or
:class:`~causal_unfold.errors.SearchExplosion`; nothing is ever silently
truncated.

Defaults can be overridden with the ``CAUSAL_UNFOLD_CAPS`` environment
variable, e.g. ``CAUSAL_UNFOLD_CAPS="events=30,configs=500000"``.
"""

import contextlib
import dataclasses
import os

ENV_VAR = "CAUSAL_UNFOLD_CAPS"


@dataclasses.dataclass(frozen=True)
class Caps:
    events: int = 24
    configs: int = 100_000
    oracle_events: int = 8
    maps: int = 200_000
    search: int = 200_000

    def replace(self, **changes):
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


def parse_caps(text, base=None):
    """Parse ``"events=30,configs=10"`` into a :class:`Caps`."""
    caps = base or Caps()
    if not text:
        return caps
    changes = {}
    names = {f.name for f in dataclasses.fields(Caps)}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in names:
            raise ValueError(f"bad cap setting {item!r}; known caps: {sorted(names)}")
        changes[key] = int(value)
    return dataclasses.replace(caps, **changes)


_current = parse_caps(os.environ.get(ENV_VAR, ""))


def get_caps():
    return _current


def set_caps(caps):
    global _current
    _current = caps


@contextlib.contextmanager
def caps_override(**changes):
    """Temporarily change some caps."""
    global _current
    saved = _current
    _current = saved.replace(**changes)
    try:
        yield _current
    finally:
        _current = saved
