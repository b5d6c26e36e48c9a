"""Admissible-control-set constructions and their simulation harness.

The compiled extension carries the whole API: barrier constraints and
min-norm filters, priority tables with their level-preserving and
level-increasing control sets, the set-equivalence checker, the dense
min-norm solver, and the closed-loop simulator with monitors.
"""

from ._core import *  # noqa: F401,F403
from . import _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
