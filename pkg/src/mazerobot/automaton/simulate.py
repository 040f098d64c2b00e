"""Kernel-backed simulation of a robot automaton on Z^k."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .. import _core
from ..lattice import AffineSubspace, LatticePoint, l1_ball
from ..rng import DEFAULT_SEED, MASK64
from .model import RobotAutomaton, SystemState

CHUNK = 1 << 16


def flag_arrays(flags: Optional[AffineSubspace], k: int):
    if flags is None:
        return 0, np.zeros(k, np.int64), np.zeros((0, k), np.int64), np.zeros(0, np.int64)
    if flags.dimension != k:
        raise ValueError(f"flag set lives in Z^{flags.dimension}, robot in Z^{k}")
    hnf, piv = flags.hermite
    h = np.asarray(hnf, dtype=np.int64).reshape(len(hnf), k)
    return 1, np.asarray(flags.base, np.int64), np.ascontiguousarray(h), np.asarray(piv, np.int64)


class BallIndex:
    """Dense lookup from cube offsets to L1-ball cell indices."""

    MAX_CELLS = 1 << 24

    def __init__(self, k: int, radius: int):
        side = 2 * radius + 1
        if side ** k > self.MAX_CELLS:
            raise MemoryError(f"ball lookup for Z^{k}, radius {radius} exceeds {self.MAX_CELLS} cells")
        self.k, self.radius = k, radius
        self.cells = l1_ball(k, radius)
        self.lut = np.full(side ** k, -1, dtype=np.int32)
        for i, p in enumerate(self.cells):
            idx = 0
            stride = 1
            for x in p:
                idx += (x + radius) * stride
                stride *= side
            self.lut[idx] = i

    def __len__(self):
        return len(self.cells)

    def index(self, p) -> int:
        side = 2 * self.radius + 1
        if any(abs(x) > self.radius for x in p):
            return -1
        idx = sum((x + self.radius) * side ** i for i, x in enumerate(p))
        return int(self.lut[idx])


class Lane:
    """One single-threaded simulation lane: system state plus bit stream.

    Marked states count "events": each executed step from a marked state
    increments the event counter and its per-state histogram, and
    :meth:`advance` can stop as soon as a given number of events occurred.
    """

    def __init__(self, automaton: RobotAutomaton, flags: Optional[AffineSubspace] = None,
                 seed: int = DEFAULT_SEED, *, marks: Iterable[int] = (),
                 ball: Optional[BallIndex] = None, backend: Optional[str] = None):
        self.automaton = automaton
        self.k, self.n = automaton.dimension, automaton.pebbles
        self.seed = int(seed) & MASK64
        self.kern = _core.get_kernels(backend)
        self.tables = automaton.tables
        self.flags = flag_arrays(flags, self.k)
        self.robot = np.zeros(self.k, np.int64)
        self.peb = np.zeros((self.n, self.k), np.int64)
        self.ctl = np.zeros(_core.CTL_SIZE, np.int64)
        self.ctl[_core.CTL_STATE] = automaton.initial
        self.ctl[_core.CTL_STEP] = 1
        self.ctl[_core.CTL_FIRST_RETURN] = -1
        self.ctl[_core.CTL_LAST_MARK] = -1
        self.mark = np.zeros(automaton.size, np.uint8)
        for q in marks:
            self.mark[q] = 1
        self.mark_hist = np.zeros(automaton.size, np.int64)
        self.ball = ball
        if ball is not None:
            if ball.k != self.k:
                raise ValueError("ball dimension mismatch")
            self.first_visit = np.full(len(ball), -1, np.int64)
            o = ball.index((0,) * self.k)
            self.first_visit[o] = 0
            self._lut = ball.lut
        else:
            self.first_visit = np.zeros(0, np.int64)
            self._lut = np.zeros(0, np.int32)
        self._empty2 = np.zeros((0, self.k), np.int64)
        self._emptyp = np.zeros((0, max(self.n * self.k, 1)), np.int64)
        self._empty_s = np.zeros(0, np.int32)

    # -- state access ---------------------------------------------------------

    @property
    def steps(self) -> int:
        return int(self.ctl[_core.CTL_STEP]) - 1

    @property
    def state(self) -> int:
        return int(self.ctl[_core.CTL_STATE])

    @property
    def flag_hits(self) -> int:
        return int(self.ctl[_core.CTL_FLAG_HITS])

    @property
    def events(self) -> int:
        return int(self.ctl[_core.CTL_MARKS])

    @property
    def last_event_state(self) -> int:
        return int(self.ctl[_core.CTL_LAST_MARK])

    @property
    def first_return(self) -> int:
        """Steps until the robot first stood on the origin again (-1 if never)."""
        return int(self.ctl[_core.CTL_FIRST_RETURN])

    def system_state(self) -> SystemState:
        return SystemState(tuple(int(x) for x in self.robot),
                           tuple(tuple(int(x) for x in row) for row in self.peb),
                           int(self.ctl[_core.CTL_STEP]), self.state)

    def place(self, robot: Optional[LatticePoint] = None, pebbles=None, state: Optional[int] = None):
        """Overwrite the configuration; the step index (and bit position) is kept."""
        if robot is not None:
            self.robot[:] = robot
        if pebbles is not None:
            self.peb[:] = np.asarray(pebbles, np.int64).reshape(self.n, self.k)
        if state is not None:
            self.ctl[_core.CTL_STATE] = state

    def reset(self, seed: Optional[int] = None):
        """Back to the initial system state at step 1, optionally with a new seed."""
        if seed is not None:
            self.seed = int(seed) & MASK64
        self.robot[:] = 0
        self.peb[:] = 0
        self.ctl[:] = 0
        self.ctl[_core.CTL_STATE] = self.automaton.initial
        self.ctl[_core.CTL_STEP] = 1
        self.ctl[_core.CTL_FIRST_RETURN] = -1
        self.ctl[_core.CTL_LAST_MARK] = -1
        self.mark_hist[:] = 0
        if self.ball is not None:
            self.first_visit[:] = -1
            self.first_visit[self.ball.index((0,) * self.k)] = 0

    def reset_events(self):
        self.ctl[_core.CTL_MARKS] = 0
        self.ctl[_core.CTL_LAST_MARK] = -1

    # -- stepping -------------------------------------------------------------

    def advance(self, nsteps: int, *, event_limit: int = 0, log: bool = False):
        """Run up to ``nsteps`` steps (fewer if ``event_limit`` events occur first).

        Returns the number of steps executed, or with ``log=True`` a tuple
        ``(executed, robot_positions, pebble_positions, states)`` holding the
        post-step values of each executed step.
        """
        moves, carry, nxt = self.tables
        kind, base, hnf, piv = self.flags
        if log:
            pos = np.zeros((nsteps, self.k), np.int64)
            pl = np.zeros((nsteps, max(self.n * self.k, 1)), np.int64)
            sl = np.zeros(nsteps, np.int32)
        else:
            pos, pl, sl = self._empty2, self._emptyp, self._empty_s
        if not log or self.n == 0:
            pl_arg = self._emptyp
        else:
            pl_arg = pl
        done = self.kern.advance(
            moves, carry, nxt, self.n, kind, base, hnf, piv, self.robot, self.peb, self.ctl,
            self.seed, int(nsteps), self.mark, self.mark_hist, int(event_limit),
            self._lut, self.ball.radius if self.ball is not None else 0, self.first_visit,
            pos, pl_arg, sl)
        if not log:
            return done
        return done, pos[:done], pl[:done, :self.n * self.k].reshape(done, self.n, self.k), sl[:done]


@dataclass
class Trajectory:
    """Record of one run of ``max_steps`` steps (``length`` = max_steps + 1)."""

    seed: int
    length: int
    final: SystemState
    flag_hits: int
    visited: Optional[frozenset] = None
    pebble_trails: list = field(default_factory=list)
    positions: Optional[np.ndarray] = None
    states: Optional[np.ndarray] = None

    @property
    def visited_count(self) -> Optional[int]:
        return None if self.visited is None else len(self.visited)


def run(automaton: RobotAutomaton, flags: Optional[AffineSubspace], dimension: int,
        max_steps: int, seed: int = DEFAULT_SEED, *, record_visited: bool = True,
        log: bool = False, backend: Optional[str] = None) -> Trajectory:
    """Simulate ``max_steps`` steps from the initial system state.

    The result is a pure function of the arguments. ``record_visited`` keeps
    the set of robot cells and the pebble trails (cells each pebble occupied,
    in order); ``log`` additionally keeps the full per-step arrays, row 0
    being the initial configuration.
    """
    if dimension != automaton.dimension:
        raise ValueError(f"automaton works in Z^{automaton.dimension}, asked for Z^{dimension}")
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    lane = Lane(automaton, flags, seed, backend=backend)
    o = (0,) * dimension
    visited = {o} if record_visited else None
    trails = [[o] for _ in range(automaton.pebbles)] if record_visited else []
    pos_chunks, state_chunks = [np.zeros((1, dimension), np.int64)], [np.array([automaton.initial], np.int32)]
    left = max_steps
    while left > 0:
        n = min(left, CHUNK)
        if record_visited or log:
            done, pos, pebs, states = lane.advance(n, log=True)
            if record_visited:
                visited.update(map(tuple, np.unique(pos, axis=0).tolist()))
                for j in range(automaton.pebbles):
                    col = pebs[:, j, :]
                    change = np.any(col[1:] != col[:-1], axis=1)
                    first = tuple(col[0].tolist())
                    if first != trails[j][-1]:
                        trails[j].append(first)
                    for row in col[1:][change].tolist():
                        trails[j].append(tuple(row))
            if log:
                pos_chunks.append(pos)
                state_chunks.append(states)
        else:
            lane.advance(n)
        left -= n
    traj = Trajectory(seed=lane.seed, length=max_steps + 1, final=lane.system_state(),
                      flag_hits=lane.flag_hits,
                      visited=frozenset(visited) if visited is not None else None,
                      pebble_trails=[tuple(t) for t in trails])
    if log:
        traj.positions = np.concatenate(pos_chunks)
        traj.states = np.concatenate(state_chunks)
    return traj
