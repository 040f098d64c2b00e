"""Rational-probability automata and their coin-flip compilation."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from ..lattice import LatticePoint, add, origin, unit
from .model import AutomatonBuilder, AutomatonError, Gadget, Observation, RobotAutomaton

StateRef = Union[int, str]


@dataclass(frozen=True)
class RationalTransition:
    probability: Fraction
    target: str
    move: int = 0
    carry: int = 0


@dataclass(frozen=True)
class RationalAutomaton:
    """States with finite lists of rational transitions; empty list = terminal."""

    dimension: int
    pebbles: int
    states: tuple[str, ...]
    initial: str
    transitions: tuple[tuple[RationalTransition, ...], ...]

    def __post_init__(self):
        if len(self.transitions) != len(self.states):
            raise AutomatonError("one transition list per state is required")
        if len(set(self.states)) != len(self.states):
            raise AutomatonError("state names must be unique")
        if self.initial not in self.states:
            raise AutomatonError(f"initial state {self.initial!r} is not declared")
        known = set(self.states)
        for name, trs in zip(self.states, self.transitions):
            if not trs:
                continue
            total = Fraction(0)
            for t in trs:
                p = Fraction(t.probability)
                if p <= 0:
                    raise AutomatonError(f"state {name}: non-positive probability {p}")
                total += p
                if t.target not in known:
                    raise AutomatonError(f"state {name}: unknown target {t.target!r}")
                if abs(t.move) > self.dimension:
                    raise AutomatonError(f"state {name}: move outside Z^{self.dimension}")
                if not 0 <= t.carry < (1 << self.pebbles):
                    raise AutomatonError(f"state {name}: carry mask too wide")
            if total != 1:
                raise AutomatonError(f"state {name}: probabilities sum to {total}, not 1")

    @classmethod
    def from_mapping(cls, dimension: int, pebbles: int, initial: str,
                     table: Mapping[str, Sequence[tuple]]) -> "RationalAutomaton":
        """Build from ``{state: [(prob, target, move, carry), ...]}``."""
        states = tuple(table)
        trs = tuple(tuple(RationalTransition(Fraction(t[0]), *t[1:]) for t in table[s]) for s in states)
        return cls(dimension, pebbles, states, initial, trs)

    def terminal(self, name: str) -> bool:
        return not self.transitions[self.states.index(name)]

    def choice_states(self) -> list[str]:
        return [s for s, t in zip(self.states, self.transitions) if t]


def commit_name(state: str, i: int) -> str:
    return f"{state}->{i}"


def compile_rational(ra: RationalAutomaton, axis: int = 1) -> RobotAutomaton:
    """Coin-flip automaton equivalent to ``ra``.

    Every choice state becomes a bit-tree gadget (see
    :meth:`AutomatonBuilder.choice`) whose branch ``i`` enters a commit state
    performing that transition's move before continuing at its target.
    Terminal states become zero-move self-loops.
    """
    if not 1 <= axis <= ra.dimension:
        raise AutomatonError(f"cancel-pair axis {axis} outside Z^{ra.dimension}")
    b = AutomatonBuilder(ra.dimension, ra.pebbles)
    for name, trs in zip(ra.states, ra.transitions):
        if not trs:
            b.state(name, move=0, role="terminal", rule=name)
            continue
        branches = []
        for i, t in enumerate(trs):
            c = b.state(commit_name(name, i), move=t.move, carry=t.carry, role="commit", rule=t.target)
            branches.append((t.probability, c))
        b.choice(name, branches, axis=axis)
    return b.build(ra.initial, prune=False)


def _ref(a: RobotAutomaton, s: StateRef) -> int:
    return a.index(s) if isinstance(s, str) else int(s)


def _random_successors(a: RobotAutomaton, q: int, context: Optional[int]) -> tuple[int, int]:
    """Successors of ``q`` for random bit 0 and 1.

    With ``context`` (the observation code without its random bit) those two
    entries are read directly; without it the transition must ignore every
    bit except the random one.
    """
    n = a.pebbles
    rbit = 1 << (n + 1)
    if context is not None:
        return a.next[q][context & ~rbit], a.next[q][context | rbit]
    row = a.next[q]
    lo = {row[c] for c in range(a.width) if not c & rbit}
    hi = {row[c] for c in range(a.width) if c & rbit}
    if len(lo) != 1 or len(hi) != 1:
        raise AutomatonError(
            f"state {a.names[q]!r} reacts to pebble/flag bits; pass an observation context")
    return lo.pop(), hi.pop()


def absorption_probabilities(automaton: RobotAutomaton, choice_region: Iterable[StateRef],
                             exits: Iterable[StateRef], start: Optional[StateRef] = None,
                             context: Optional[Union[int, Observation]] = None) -> dict[str, Fraction]:
    """Exact probability of first entering each exit state, from ``start``.

    Inside the region only the random bit drives transitions (or the fixed
    ``context`` observation supplies the other bits). The first-passage system
    is solved by exact state elimination, deepest states first.
    """
    a = automaton
    region = [_ref(a, s) for s in choice_region]
    exit_set = {_ref(a, s) for s in exits}
    if not region:
        raise AutomatonError("empty choice region")
    src = region[0] if start is None else _ref(a, start)
    if src in exit_set:
        return {a.names[src]: Fraction(1)}
    rset = set(region)
    if src not in rset:
        raise AutomatonError(f"start state {a.names[src]!r} is not in the region")
    if rset & exit_set:
        raise AutomatonError("region and exits overlap")
    ctx = context.code if isinstance(context, Observation) else context

    half = Fraction(1, 2)
    P: dict[int, dict[int, Fraction]] = {}
    for q in region:
        row: dict[int, Fraction] = {}
        for r in _random_successors(a, q, ctx):
            if r not in rset and r not in exit_set:
                raise AutomatonError(f"state {a.names[q]!r} leaves the region to {a.names[r]!r}")
            row[r] = row.get(r, Fraction(0)) + half
        P[q] = row

    # every region state must reach an exit
    preds: dict[int, set[int]] = {q: set() for q in rset | exit_set}
    for q, row in P.items():
        for r in row:
            preds[r].add(q)
    alive = set()
    todo = deque(exit_set)
    while todo:
        r = todo.popleft()
        for q in preds[r]:
            if q not in alive:
                alive.add(q)
                todo.append(q)
    trapped = rset - alive
    if trapped:
        names = sorted(a.names[q] for q in trapped)
        raise AutomatonError(f"no exit reachable from trapped states {names}")

    # elimination order: decreasing BFS depth from the start state
    depth = {src: 0}
    todo = deque([src])
    while todo:
        q = todo.popleft()
        for r in P[q]:
            if r in rset and r not in depth:
                depth[r] = depth[q] + 1
                todo.append(r)
    order = sorted((q for q in depth if q != src), key=lambda q: -depth[q])
    for s in order:
        row = P.pop(s)
        loop = row.pop(s, Fraction(0))
        scale = 1 / (1 - loop)
        out = {v: p * scale for v, p in row.items()}
        for v in out:
            preds[v].discard(s)
        for u in list(preds[s]):
            if u == s or u not in P:
                continue
            w = P[u].pop(s)
            for v, p in out.items():
                P[u][v] = P[u].get(v, Fraction(0)) + w * p
                preds[v].add(u)
        preds[s].clear()
    row = P[src]
    loop = row.pop(src, Fraction(0))
    scale = 1 / (1 - loop)
    result = {a.names[v]: p * scale for v, p in row.items() if v in exit_set}
    if sum(result.values()) != 1:
        raise AutomatonError("absorption probabilities do not sum to 1")
    return result


def gadget_absorption(automaton: RobotAutomaton, gadget: Union[Gadget, StateRef]) -> list[Fraction]:
    """Branch probabilities of a compiled choice point, in branch order."""
    g = gadget if isinstance(gadget, Gadget) else automaton.gadget(gadget)
    if g.depth == 0:
        return [Fraction(1)]
    probs = absorption_probabilities(automaton, g.region, set(g.commits), start=g.root)
    return [probs.get(automaton.names[c], Fraction(0)) for c in g.commits]


def path_displacements(automaton: RobotAutomaton, gadget: Union[Gadget, StateRef],
                       limit: int = 1_000_000) -> dict[str, set[LatticePoint]]:
    """Net displacement accumulated on choice-to-commit paths, per commit state.

    Explores (state, displacement) pairs from the root through tree and
    restart states; the moves counted are those executed before a commit
    state is entered.
    """
    a = automaton
    g = gadget if isinstance(gadget, Gadget) else a.gadget(gadget)
    k = a.dimension
    inside = set(g.region)
    commits = set(g.commits)
    out: dict[str, set[LatticePoint]] = {a.names[c]: set() for c in g.commits}
    if g.depth == 0:
        for c in g.commits:
            out[a.names[c]].add(origin(k))
        return out
    seen = {(g.root, origin(k))}
    todo = deque(seen)
    while todo:
        q, disp = todo.popleft()
        nd = add(disp, unit(k, a.moves[q]))
        for r in set(a.next[q]):
            if r in commits:
                out[a.names[r]].add(nd)
            elif r in inside:
                if (r, nd) not in seen:
                    if len(seen) >= limit:
                        raise AutomatonError("displacement exploration did not close; net drift suspected")
                    seen.add((r, nd))
                    todo.append((r, nd))
            else:
                raise AutomatonError(f"gadget state {a.names[q]!r} exits to {a.names[r]!r}")
    return out


def verify_compilation(ra: RationalAutomaton, compiled: RobotAutomaton) -> dict[str, dict]:
    """Per choice state: expected vs exact compiled branch probabilities."""
    report = {}
    for name, trs in zip(ra.states, ra.transitions):
        if not trs:
            continue
        got = gadget_absorption(compiled, name)
        expected = [Fraction(t.probability) for t in trs]
        disp = path_displacements(compiled, name)
        zero = origin(ra.dimension)
        report[name] = {
            "expected": [str(p) for p in expected],
            "absorbed": [str(p) for p in got],
            "match": got == expected,
            "zero_displacement": all(d == {zero} for d in disp.values()),
        }
    return report
