"""Annealed SMC samplers with adaptive schedules."""

from ._core import *  # noqa: F401,F403
from ._core import theory  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
