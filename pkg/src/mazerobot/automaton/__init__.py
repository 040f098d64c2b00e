"""The maze-robot machine model and its coin-flip compiler."""
from .compiler import (RationalAutomaton, RationalTransition, absorption_probabilities,
                       compile_rational, gadget_absorption, path_displacements,
                       verify_compilation)
from .model import (AutomatonBuilder, AutomatonError, Gadget, Observation, RobotAutomaton,
                    SystemState, observe, step, trace, tree_shape)
from .simulate import BallIndex, Lane, Trajectory, run
from .textfmt import AutomatonParseError, dumps, loads, read, read_robot, write

__all__ = [
    "AutomatonBuilder", "AutomatonError", "AutomatonParseError", "BallIndex", "Gadget", "Lane",
    "Observation", "RationalAutomaton", "RationalTransition", "RobotAutomaton", "SystemState",
    "Trajectory", "absorption_probabilities", "compile_rational", "dumps", "gadget_absorption",
    "loads", "observe", "path_displacements", "read", "read_robot", "run", "step", "trace",
    "tree_shape", "verify_compilation", "write",
]
