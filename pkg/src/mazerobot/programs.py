"""Traversal programs for Z^2, Z^4, Z^6 and Z^8 as explicit automata.

Each program is a set of named phases. A phase is a uniform coin-flip choice
(a bit-tree gadget whose cancel pairs run along ``e1``) followed by one of
its commit states, which performs the phase's real move and routes on the
observation made after it:

``z2``
    ``walk``: uniform over +-e1, +-e2, forever.
``z4`` (one pebble)
    ``A``: excursion over +-e1, +-e2 without the pebble until the robot is
    back on it, then ``B``: one move over +-e3, +-e4 carrying the pebble.
``z6`` (one pebble, flag at the origin)
    ``A0``/``A1``: excursion over +-e1, +-e2; ``A1`` is the same walk with the
    flag-seen latch set (entered when a commit lands on a flag cell, left
    when the pebble is reached). On return, latch clear: ``R2`` (pebble move
    over +-e3, +-e4); latch set: ``R1`` (pebble move over +-e1, +-e2) then
    ``R2``. After ``R2`` comes ``E``: excursion over +-e5, +-e6 until the
    pebble is reached again, then back to ``A0``.
``z8`` (one pebble, flag plane spanned by e7, e8)
    As ``z6``, except that reaching the pebble on a flag cell first runs
    ``F``: a uniform five-way pebble move over +-e7, +-e8 and "stay", the
    stay being +e7 then -e7 (``F0``, ``F0b``); afterwards ``R1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .automaton import (AutomatonBuilder, RationalAutomaton, RobotAutomaton,
                        compile_rational)
from .lattice import AffineSubspace, format_move, origin, plane_moves

# Desk-scale step budgets for traversal evidence (the traversal claim itself
# is asymptotic; these only size the coverage reports).
DESK_BUDGETS = {"z2": 10**7, "z4": 10**7, "z6": 10**7, "z8": 10**7}
CANCEL_AXIS = 1


@dataclass(frozen=True)
class ProgramDescriptor:
    name: str
    dimension: int
    pebble_count: int
    flag_set: Optional[AffineSubspace]
    automaton: RobotAutomaton
    # commit states whose execution is one move of the program's main walk
    walk_states: tuple[int, ...] = ()
    # commit states that relocate the pebble
    pebble_states: tuple[int, ...] = ()
    # phase name -> (states of the phase, allowed move codes)
    phases: dict = field(default_factory=dict, compare=False)
    flag_choice: Optional[str] = None

    def phase_of(self, q: int) -> str:
        for name, (states, _) in self.phases.items():
            if q in states:
                return name
        raise KeyError(q)


def _commit(phase: str, d: int) -> str:
    return f"{phase}{format_move(d)}"


def _phase(b: AutomatonBuilder, phase: str, moves, carry: int, rule) -> list[str]:
    commits = [b.state(_commit(phase, d), move=d, carry=carry, role="commit", rule=rule) for d in moves]
    p = Fraction(1, len(commits))
    b.choice(phase, [(p, c) for c in commits], axis=CANCEL_AXIS)
    return commits


def _collect(a: RobotAutomaton, phase_moves: dict, extra: Optional[dict] = None) -> dict:
    """Map each phase name to (its states, its allowed move codes)."""
    phases = {}
    for ph, moves in phase_moves.items():
        g = a.gadget(ph)
        states = {g.root, *g.tree, *g.restart, *g.commits}
        states |= {a.index(n) for n in (extra or {}).get(ph, ())}
        phases[ph] = (frozenset(states), frozenset(moves) | {CANCEL_AXIS, -CANCEL_AXIS})
    return phases


def build_z2() -> ProgramDescriptor:
    """Simple random walk on Z^2, compiled from a rational automaton."""
    moves = plane_moves(1, 2)
    ra = RationalAutomaton.from_mapping(
        2, 0, "walk", {"walk": [(Fraction(1, 4), "walk", d, 0) for d in moves]})
    a = compile_rational(ra, axis=CANCEL_AXIS)
    g = a.gadget("walk")
    return ProgramDescriptor("z2", 2, 0, None, a, walk_states=g.commits,
                             phases={"walk": (frozenset(range(a.size)), frozenset(moves))})


def build_z4() -> ProgramDescriptor:
    b = AutomatonBuilder(4, 1)
    _phase(b, "A", plane_moves(1, 2), 0, lambda o: "B" if o.pebbles[0] else "A")
    _phase(b, "B", plane_moves(3, 4), 1, "A")
    a = b.build("A")
    return ProgramDescriptor(
        "z4", 4, 1, None, a,
        walk_states=a.gadget("A").commits, pebble_states=a.gadget("B").commits,
        phases=_collect(a, {"A": plane_moves(1, 2), "B": plane_moves(3, 4)}))


def _z6_phases(b: AutomatonBuilder, flag_stop: bool) -> None:
    def from_a0(o):
        if o.pebbles[0]:
            if o.flag:
                return "F" if flag_stop else "R1"
            return "R2"
        return "A1" if o.flag else "A0"

    def from_a1(o):
        if o.pebbles[0]:
            return "F" if flag_stop and o.flag else "R1"
        return "A1"

    _phase(b, "A0", plane_moves(1, 2), 0, from_a0)
    _phase(b, "A1", plane_moves(1, 2), 0, from_a1)
    _phase(b, "R1", plane_moves(1, 2), 1, "R2")
    _phase(b, "R2", plane_moves(3, 4), 1, "E")
    _phase(b, "E", plane_moves(5, 6), 0, lambda o: "A0" if o.pebbles[0] else "E")


def _z6_like(name, k, flags, flag_stop) -> ProgramDescriptor:
    b = AutomatonBuilder(k, 1)
    _z6_phases(b, flag_stop)
    phase_moves = {"A0": plane_moves(1, 2), "A1": plane_moves(1, 2), "R1": plane_moves(1, 2),
                   "R2": plane_moves(3, 4), "E": plane_moves(5, 6)}
    if flag_stop:
        commits = [b.state(_commit("F", d), move=d, carry=1, role="commit", rule="R1")
                   for d in plane_moves(7, 8)]
        b.state("F0", move=7, carry=1, role="commit", rule="F0b")
        b.state("F0b", move=-7, carry=1, role="commit", rule="R1")
        b.choice("F", [(Fraction(1, 5), c) for c in commits + ["F0"]], axis=CANCEL_AXIS)
        phase_moves["F"] = plane_moves(7, 8)
    a = b.build("A0")
    pebble = [c for ph in ("R1", "R2") for c in a.gadget(ph).commits]
    if flag_stop:
        pebble += list(a.gadget("F").commits) + [a.index("F0b")]
    walk = a.gadget("A0").commits + a.gadget("A1").commits
    return ProgramDescriptor(name, k, 1, flags, a, walk_states=walk, pebble_states=tuple(pebble),
                             phases=_collect(a, phase_moves, {"F": ["F0b"]} if flag_stop else None), flag_choice="F" if flag_stop else None)


def build_z6() -> ProgramDescriptor:
    return _z6_like("z6", 6, AffineSubspace.point(origin(6)), flag_stop=False)


def build_z8() -> ProgramDescriptor:
    flags = AffineSubspace.coordinate(origin(8), axes=(7, 8))
    return _z6_like("z8", 8, flags, flag_stop=True)


PROGRAMS = {"z2": build_z2, "z4": build_z4, "z6": build_z6, "z8": build_z8}


def get_program(name: str) -> ProgramDescriptor:
    try:
        return PROGRAMS[name]()
    except KeyError:
        raise KeyError(f"unknown program {name!r}; choose from {sorted(PROGRAMS)}") from None
