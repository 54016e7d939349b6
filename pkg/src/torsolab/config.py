"""Size ceilings for the exponential-time searches.

``TORSOLAB_CEILING`` overrides the defaults.  A bare integer sets the host
ceiling; otherwise a comma-separated list such as ``host=14,pattern=6``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_VAR = "TORSOLAB_CEILING"


class SizeLimitError(RuntimeError):
    """An input exceeded a configured search ceiling."""


@dataclass(frozen=True)
class Ceilings:
    host: int = 16          # vertices of the graph searched by the oracles
    pattern: int = 8        # vertices of an excluded pattern
    exhaustive: int = 10    # vertices for the exhaustive torso canoniser
    dag_nodes: int = 10000  # nodes of an invariant treelike decomposition


def parse_ceilings(text: str, base: Ceilings | None = None) -> Ceilings:
    base = base or Ceilings()
    text = text.strip()
    if not text:
        return base
    if text.isdigit():
        return replace(base, host=int(text))
    fields = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if key not in Ceilings.__dataclass_fields__:
            raise ValueError(f"unknown ceiling {key!r}")
        fields[key] = int(value)
    return replace(base, **fields)


def ceilings() -> Ceilings:
    """Current ceilings, reading the environment on every call."""
    return parse_ceilings(os.environ.get(ENV_VAR, ""))
