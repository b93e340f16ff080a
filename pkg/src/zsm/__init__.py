"""Membrane systems, zero-safe nets, unfoldings and event structures with simultaneity."""

from .multiset import EMPTY, Multiset
from .parser import parse, parse_file
from .psystem import MembraneSystem, PSystemError

__all__ = ["EMPTY", "Multiset", "parse", "parse_file", "MembraneSystem", "PSystemError"]
__version__ = "0.1.0"
