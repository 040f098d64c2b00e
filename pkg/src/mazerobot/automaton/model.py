"""Robot automata, system states and single-step semantics.

An automaton is Moore-style: every state carries one move ``(d, p)`` (a
direction code and a carry mask), and the transition table maps the
``(n+2)``-bit observation made *after* that move to the next state.

Observation bits are packed into an integer code, least significant first:
bit ``i`` (0-based, ``i < n``) is pebble ``i+1`` coinciding with the robot,
bit ``n`` is flag-set membership and bit ``n+1`` is the random bit.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from ..lattice import AffineSubspace, LatticePoint, add, format_move, origin, unit
from ..rng import RngStream

ROLES = ("control", "tree", "restart", "commit", "terminal")


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class Observation:
    pebbles: tuple[int, ...]
    flag: int
    random: int

    @property
    def bits(self) -> tuple[int, ...]:
        """Bits in document order: pebbles 1..n, flag, random."""
        return self.pebbles + (self.flag, self.random)

    @property
    def code(self) -> int:
        n = len(self.pebbles)
        c = sum(b << i for i, b in enumerate(self.pebbles))
        return c | (self.flag << n) | (self.random << (n + 1))

    @classmethod
    def from_code(cls, code: int, n: int) -> "Observation":
        return cls(tuple((code >> i) & 1 for i in range(n)), (code >> n) & 1, (code >> (n + 1)) & 1)

    def __str__(self):
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class SystemState:
    robot: LatticePoint
    pebbles: tuple[LatticePoint, ...]
    step: int
    state: int

    @classmethod
    def initial(cls, dimension: int, pebbles: int, q0: int = 0) -> "SystemState":
        o = origin(dimension)
        return cls(o, (o,) * pebbles, 1, q0)


@dataclass(frozen=True)
class Gadget:
    """A coin-flip choice point: balanced bit tree plus restart pair.

    ``commits[i]`` is entered with probability ``probabilities[i]``; tree
    and restart states use the cancel-pair moves ``+axis``/``-axis``.
    """

    root: int
    probabilities: tuple[Fraction, ...]
    commits: tuple[int, ...]
    tree: tuple[int, ...]
    restart: tuple[int, ...]
    depth: int
    leaves: int
    leaf_counts: tuple[int, ...]
    axis: int
    # choice name; differs from the root's name when a certain choice collapses onto its commit
    name: str = ""

    @property
    def region(self) -> tuple[int, ...]:
        return self.tree + self.restart

    @property
    def restart_leaves(self) -> int:
        return self.leaves - sum(self.leaf_counts)


@dataclass(frozen=True)
class RobotAutomaton:
    dimension: int
    pebbles: int
    names: tuple[str, ...]
    moves: tuple[int, ...]
    carry: tuple[int, ...]
    next: tuple[tuple[int, ...], ...]
    initial: int = 0
    roles: tuple[str, ...] = ()
    gadgets: tuple[Gadget, ...] = ()

    def __post_init__(self):
        S = len(self.names)
        W = self.width
        if not S:
            raise AutomatonError("an automaton needs at least one state")
        if len(set(self.names)) != S:
            raise AutomatonError("state names must be unique")
        if len(self.moves) != S or len(self.carry) != S or len(self.next) != S:
            raise AutomatonError("move/carry/next tables must cover every state")
        if not self.roles:
            object.__setattr__(self, "roles", ("control",) * S)
        for q in range(S):
            if abs(self.moves[q]) > self.dimension:
                raise AutomatonError(f"state {self.names[q]}: move outside Z^{self.dimension}")
            if not 0 <= self.carry[q] < (1 << self.pebbles):
                raise AutomatonError(f"state {self.names[q]}: carry mask wider than {self.pebbles} pebbles")
            row = self.next[q]
            if len(row) != W or any(not 0 <= r < S for r in row):
                raise AutomatonError(f"state {self.names[q]}: transition table is not total")
        if not 0 <= self.initial < S:
            raise AutomatonError("initial state out of range")

    @property
    def width(self) -> int:
        return 1 << (self.pebbles + 2)

    @property
    def size(self) -> int:
        return len(self.names)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no state named {name!r}") from None

    def move_of(self, q: int) -> tuple[LatticePoint, tuple[int, ...]]:
        mask = tuple((self.carry[q] >> i) & 1 for i in range(self.pebbles))
        return unit(self.dimension, self.moves[q]), mask

    def next_of(self, q: int, obs: Union[Observation, int]) -> int:
        code = obs.code if isinstance(obs, Observation) else obs
        return self.next[q][code]

    def successors(self, q: int) -> set[int]:
        return set(self.next[q])

    def reachable(self, start: Optional[int] = None) -> set[int]:
        seen = {self.initial if start is None else start}
        todo = deque(seen)
        while todo:
            q = todo.popleft()
            for r in self.next[q]:
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    def pruned(self) -> "RobotAutomaton":
        """Copy without states unreachable from the initial state."""
        keep = sorted(self.reachable())
        if len(keep) == self.size:
            return self
        remap = {q: i for i, q in enumerate(keep)}
        gadgets = []
        for g in self.gadgets:
            if g.root in remap:
                gadgets.append(Gadget(
                    remap[g.root], g.probabilities, tuple(remap[c] for c in g.commits),
                    tuple(remap[t] for t in g.tree), tuple(remap[t] for t in g.restart),
                    g.depth, g.leaves, g.leaf_counts, g.axis, g.name))
        return RobotAutomaton(
            self.dimension, self.pebbles,
            tuple(self.names[q] for q in keep), tuple(self.moves[q] for q in keep),
            tuple(self.carry[q] for q in keep),
            tuple(tuple(remap[r] for r in self.next[q]) for q in keep),
            remap[self.initial], tuple(self.roles[q] for q in keep), tuple(gadgets))

    def gadget(self, root: Union[int, str]) -> Gadget:
        """Gadget by choice name or root state."""
        if isinstance(root, str):
            for g in self.gadgets:
                if g.name == root:
                    return g
            root = self.index(root)
        for g in self.gadgets:
            if g.root == root:
                return g
        raise KeyError(f"state {self.names[root]!r} is not a choice point")

    def states_with_role(self, role: str) -> list[int]:
        return [q for q, r in enumerate(self.roles) if r == role]

    @cached_property
    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(moves, carry, next) as contiguous arrays for the kernels."""
        return (np.asarray(self.moves, dtype=np.int64),
                np.asarray(self.carry, dtype=np.int64),
                np.ascontiguousarray(np.asarray(self.next, dtype=np.int32).reshape(self.size, self.width)))

    def describe(self, q: int) -> str:
        return f"{self.names[q]} [{self.roles[q]}] move {format_move(self.moves[q])} carry {self.carry[q]:0{self.pebbles}b}"


def observe(sys: SystemState, flags: Optional[AffineSubspace], random_bit: int) -> Observation:
    """Observation made at configuration ``sys`` (callers pass the post-move one)."""
    peb = tuple(int(s == sys.robot) for s in sys.pebbles)
    flag = int(flags is not None and flags.contains(sys.robot))
    return Observation(peb, flag, int(random_bit) & 1)


def step(sys: SystemState, automaton: RobotAutomaton, flags: Optional[AffineSubspace],
         rng: Union[RngStream, int]) -> SystemState:
    """One move of the robot.

    ``rng`` is either the bit stream (bit ``xi_k`` is read at position
    ``sys.step - 1``) or the random bit itself.
    """
    q = sys.state
    bit = rng.bit(sys.step - 1) if isinstance(rng, RngStream) else int(rng)
    d = unit(automaton.dimension, automaton.moves[q])
    mask = automaton.carry[q]
    a = sys.robot
    robot = add(a, d)
    pebbles = tuple(add(s, d) if (mask >> i) & 1 and s == a else s
                    for i, s in enumerate(sys.pebbles))
    moved = SystemState(robot, pebbles, sys.step, q)
    w = observe(moved, flags, bit)
    return SystemState(robot, pebbles, sys.step + 1, automaton.next[q][w.code])


def trace(automaton: RobotAutomaton, flags: Optional[AffineSubspace], bits: Sequence[int],
          start: Optional[SystemState] = None) -> list[SystemState]:
    """Reference trajectory driven by an explicit bit sequence."""
    sys = start or SystemState.initial(automaton.dimension, automaton.pebbles, automaton.initial)
    out = [sys]
    for b in bits:
        sys = step(sys, automaton, flags, b)
        out.append(sys)
    return out


# -- construction -----------------------------------------------------------------

Rule = Union[str, Mapping[int, str], Callable[[Observation], str]]


def _validate_probabilities(probs: Sequence) -> tuple[Fraction, ...]:
    ps = tuple(Fraction(p) for p in probs)
    if not ps:
        raise AutomatonError("a choice needs at least one branch")
    if any(p <= 0 for p in ps):
        raise AutomatonError(f"branch probabilities must be positive, got {[str(p) for p in ps]}")
    if sum(ps) != 1:
        raise AutomatonError(f"branch probabilities sum to {sum(ps)}, not 1")
    return ps


def tree_shape(probs: Sequence) -> tuple[int, int, tuple[int, ...]]:
    """(depth, leaves, leaves-per-branch) of the bit tree for ``probs``.

    Probabilities are brought to a common denominator ``q`` with numerators
    ``p'_i``. A dyadic ``q = 2^m`` uses the smallest even depth ``>= m`` and
    scales the numerators, so no restart leaves occur. Otherwise the tree has
    depth ``2q`` with ``p'_i`` leaves per branch, and the remaining
    ``2^(2q) - q`` leaves restart the choice.
    """
    ps = _validate_probabilities(probs)
    q = lcm(*(p.denominator for p in ps))
    nums = tuple(p.numerator * (q // p.denominator) for p in ps)
    if q & (q - 1) == 0:
        m = q.bit_length() - 1
        depth = m + (m & 1)
        scale = 1 << (depth - m)
        return depth, 1 << depth, tuple(c * scale for c in nums)
    depth = 2 * q
    return depth, 1 << depth, nums


class AutomatonBuilder:
    """Incremental construction by state name.

    ``state`` declares a state with its move; ``route`` sets its transition
    rule; ``choice`` expands a coin-flip gadget rooted at a new state name.
    """

    def __init__(self, dimension: int, pebbles: int = 0):
        self.dimension = dimension
        self.pebbles = pebbles
        self._order: list[str] = []
        self._move: dict[str, int] = {}
        self._carry: dict[str, int] = {}
        self._role: dict[str, str] = {}
        self._rule: dict[str, Rule] = {}
        self._alias: dict[str, str] = {}
        self._gadgets: list[dict] = []

    def __contains__(self, name: str) -> bool:
        return name in self._move or name in self._alias

    def state(self, name: str, move: int = 0, carry: int = 0, role: str = "control",
              rule: Optional[Rule] = None) -> str:
        if name in self:
            raise AutomatonError(f"duplicate state {name!r}")
        if role not in ROLES:
            raise AutomatonError(f"unknown role {role!r}")
        self._order.append(name)
        self._move[name] = move
        self._carry[name] = carry
        self._role[name] = role
        if rule is not None:
            self._rule[name] = rule
        return name

    def route(self, name: str, rule: Rule) -> None:
        if name not in self._move:
            raise AutomatonError(f"route for undeclared state {name!r}")
        self._rule[name] = rule

    def choice(self, name: str, branches: Sequence[tuple[object, str]], axis: int = 1) -> str:
        """Coin-flip gadget at ``name`` entering ``branches[i][1]`` w.p. ``branches[i][0]``.

        Identical subtrees of the balanced tree are shared, so the state count
        grows with depth times branch count rather than with the leaf count;
        every root-to-leaf path still reads exactly ``depth`` bits with
        alternating ``+axis``/``-axis`` moves.
        """
        probs = _validate_probabilities([p for p, _ in branches])
        targets = [t for _, t in branches]
        depth, leaves, counts = tree_shape(probs)
        if depth == 0:
            self._alias[name] = targets[0]
            self._gadgets.append(dict(root=name, probs=probs, commits=targets, tree=[], restart=[],
                                      depth=0, leaves=1, counts=counts, axis=axis))
            return name
        bounds = [0]
        for c in counts:
            bounds.append(bounds[-1] + c)
        restart_needed = bounds[-1] < leaves
        x1, x2 = f"{name}~r1", f"{name}~r2"

        def runs(lo: int, hi: int) -> tuple:
            out = []
            for i, t in enumerate(targets):
                a, b = max(lo, bounds[i]), min(hi, bounds[i + 1])
                if a < b:
                    out.append((t, b - a))
            if hi > bounds[-1]:
                out.append((x1, hi - max(lo, bounds[-1])))
            return tuple(out)

        tree: list[str] = []
        frontier = {runs(0, leaves): (name, 0)}
        for level in range(depth):
            half = leaves >> (level + 1)
            mv = axis if level % 2 == 0 else -axis
            below: dict[tuple, tuple[str, int]] = {}
            for nm, lo in frontier.values():
                kids = []
                for child_lo in (lo, lo + half):
                    r = runs(child_lo, child_lo + half)
                    if level + 1 == depth:
                        kids.append(r[0][0])
                        continue
                    if r not in below:
                        below[r] = (f"{name}~{level + 1}.{len(below)}", child_lo)
                    kids.append(below[r][0])
                self.state(nm, move=mv, role="tree", rule=_random_rule(*kids))
                tree.append(nm)
            frontier = below
        restart = []
        if restart_needed:
            self.state(x1, move=axis, role="restart", rule=x2)
            self.state(x2, move=-axis, role="restart", rule=name)
            restart = [x1, x2]
        self._gadgets.append(dict(root=name, probs=probs, commits=targets, tree=tree, restart=restart,
                                  depth=depth, leaves=leaves, counts=counts, axis=axis))
        return name

    def _resolve(self, name: str) -> str:
        seen = set()
        while name in self._alias:
            if name in seen:
                raise AutomatonError(f"alias cycle at {name!r}")
            seen.add(name)
            name = self._alias[name]
        if name not in self._move:
            raise AutomatonError(f"reference to undeclared state {name!r}")
        return name

    def build(self, initial: str, prune: bool = True) -> RobotAutomaton:
        names = list(self._order)
        idx = {n: i for i, n in enumerate(names)}
        n = self.pebbles
        W = 1 << (n + 2)
        observations = [Observation.from_code(c, n) for c in range(W)]
        table = []
        for nm in names:
            if nm not in self._rule:
                raise AutomatonError(f"state {nm!r} has no transition rule")
            rule = self._rule[nm]
            if isinstance(rule, str):
                row = [self._resolve(rule)] * W
            elif isinstance(rule, Mapping):
                missing = [c for c in range(W) if c not in rule]
                if missing:
                    raise AutomatonError(f"state {nm!r} has no target for observation codes {missing}")
                row = [self._resolve(rule[c]) for c in range(W)]
            else:
                row = [self._resolve(rule(o)) for o in observations]
            table.append(tuple(idx[r] for r in row))
        gadgets = []
        for g in self._gadgets:
            gadgets.append(Gadget(
                idx[self._resolve(g["root"])], g["probs"],
                tuple(idx[self._resolve(c)] for c in g["commits"]),
                tuple(idx[t] for t in g["tree"]), tuple(idx[t] for t in g["restart"]),
                g["depth"], g["leaves"], g["counts"], g["axis"], g["root"]))
        a = RobotAutomaton(
            self.dimension, n, tuple(names), tuple(self._move[x] for x in names),
            tuple(self._carry[x] for x in names), tuple(table), idx[self._resolve(initial)],
            tuple(self._role[x] for x in names), tuple(gadgets))
        return a.pruned() if prune else a


def _random_rule(zero: str, one: str) -> Callable[[Observation], str]:
    return lambda o: one if o.random else zero
