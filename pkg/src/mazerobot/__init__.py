"""Maze robots on integer lattices: automata with fair coins, pebbles and
flags, their coin-flip compilation, traversal programs, and exact random-walk
analytics."""

__version__ = "0.1.0"
