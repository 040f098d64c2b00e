from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mazerobot.automaton import (AutomatonError, RationalAutomaton, absorption_probabilities,
                                 compile_rational, gadget_absorption, path_displacements, trace,
                                 dumps, loads, verify_compilation)
from mazerobot.lattice import origin


def single_choice(probs, k=2, axis=1):
    table = {"s": [(p, "t", (i % k) + 1, 0) for i, p in enumerate(probs)], "t": []}
    ra = RationalAutomaton.from_mapping(k, 0, "s", table)
    return ra, compile_rational(ra, axis=axis)


@st.composite
def distributions(draw):
    q = draw(st.integers(1, 12))
    b = draw(st.integers(1, min(q, 5)))
    cuts = sorted(draw(st.lists(st.integers(1, q - 1), min_size=b - 1, max_size=b - 1, unique=True))) if q > 1 else []
    parts = [y - x for x, y in zip([0] + cuts, cuts + [q])]
    return [Fraction(c, q) for c in parts]


@settings(max_examples=40, deadline=None)
@given(distributions())
def test_compiled_gadget_absorbs_exactly(probs):
    ra, robot = single_choice(probs)
    assert gadget_absorption(robot, "s") == probs
    assert all(d == {origin(2)} for d in path_displacements(robot, "s").values())


def test_dyadic_half_half_uses_four_leaves_without_restart():
    _, robot = single_choice([Fraction(1, 2)] * 2)
    g = robot.gadget("s")
    assert (g.depth, g.leaves, g.restart_leaves) == (2, 4, 0)
    assert g.restart == ()


def test_thirds_need_restart_leaves():
    _, robot = single_choice([Fraction(1, 3), Fraction(2, 3)])
    g = robot.gadget("s")
    assert g.depth == 6 and g.restart_leaves == 64 - 3
    assert len(g.restart) == 2


def test_tree_moves_are_cancel_pairs():
    _, robot = single_choice([Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)], k=3, axis=3)
    g = robot.gadget("s")
    assert {robot.moves[q] for q in g.region} <= {3, -3}
    assert all(robot.carry[q] == 0 for q in g.region)


def test_certain_choice_aliases_root_to_commit():
    ra = RationalAutomaton.from_mapping(1, 0, "s", {"s": [(1, "s", 1, 0)]})
    robot = compile_rational(ra)
    states = trace(robot, None, [0, 1, 0, 1])
    assert [s.robot for s in states] == [(0,), (1,), (2,), (3,), (4,)]
    # no tree: the root is the commit state, still found under the choice name
    g = robot.gadget("s")
    assert robot.names[g.root] == "s->0" and g.depth == 0
    assert verify_compilation(ra, robot)["s"]["match"]
    assert loads(dumps(robot)) == robot


def test_terminal_states_hold_still():
    ra, robot = single_choice([Fraction(1)])
    t = robot.index("t")
    assert robot.moves[t] == 0 and set(robot.next[t]) == {t}


def test_verify_compilation_report():
    ra, robot = single_choice([Fraction(1, 6), Fraction(1, 2), Fraction(1, 3)])
    rep = verify_compilation(ra, robot)["s"]
    assert rep == {"expected": ["1/6", "1/2", "1/3"], "absorbed": ["1/6", "1/2", "1/3"],
                   "match": True, "zero_displacement": True}


def test_large_common_denominator_stays_tractable():
    # lcm 840 gives a depth-1680 tree; the shared-subtree construction keeps it small
    probs = [Fraction(1, 5), Fraction(1, 7), Fraction(1, 8), Fraction(1, 3)]
    probs.append(1 - sum(probs))
    ra, robot = single_choice(probs)
    assert robot.gadget("s").depth == 1680
    assert robot.size < 5000
    assert gadget_absorption(robot, "s") == probs


def test_invalid_rational_automata():
    with pytest.raises(AutomatonError):
        RationalAutomaton.from_mapping(1, 0, "s", {"s": [(Fraction(1, 2), "s", 1, 0)]})
    with pytest.raises(AutomatonError):
        RationalAutomaton.from_mapping(1, 0, "s", {"s": [(1, "u", 1, 0)]})
    with pytest.raises(AutomatonError):
        RationalAutomaton.from_mapping(1, 0, "s", {"s": [(1, "s", 2, 0)]})


def test_absorption_detects_trapped_states():
    from mazerobot.automaton import AutomatonBuilder
    b = AutomatonBuilder(1, 0)
    b.state("a", move=1, rule=lambda o: "b" if o.random else "out")
    b.state("b", move=-1, rule="b")
    b.state("out", rule="out")
    robot = b.build("a")
    with pytest.raises(AutomatonError, match="trapped"):
        absorption_probabilities(robot, ["a", "b"], ["out"])


def test_absorption_with_observation_context():
    from mazerobot.automaton import AutomatonBuilder, Observation
    b = AutomatonBuilder(1, 1)
    b.state("a", move=1, rule=lambda o: ("x" if o.random else "y") if o.pebbles[0] else "x")
    b.state("x", rule="x")
    b.state("y", rule="y")
    robot = b.build("a")
    with pytest.raises(AutomatonError):
        absorption_probabilities(robot, ["a"], ["x", "y"])
    on = absorption_probabilities(robot, ["a"], ["x", "y"], context=Observation((1,), 0, 0))
    off = absorption_probabilities(robot, ["a"], ["x", "y"], context=Observation((0,), 0, 0))
    assert on == {"x": Fraction(1, 2), "y": Fraction(1, 2)}
    assert off == {"x": Fraction(1)}
