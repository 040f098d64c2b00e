from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mazerobot import _core
from mazerobot.automaton import (AutomatonBuilder, AutomatonError, Lane, Observation,
                                 RobotAutomaton, SystemState, observe, run, step, trace, tree_shape)
from mazerobot.lattice import AffineSubspace, origin
from mazerobot.programs import get_program
from mazerobot.rng import RngStream


def pebble_pusher() -> RobotAutomaton:
    """Z^2, one pebble: 'go' moves +e1 carrying; 'back' moves -e1 without it."""
    b = AutomatonBuilder(2, 1)
    b.state("go", move=1, carry=1, rule=lambda o: "back" if o.random else "go")
    b.state("back", move=-1, carry=0, rule="go")
    return b.build("go")


def test_observation_code_layout():
    o = Observation((1, 0), flag=1, random=1)
    assert o.code == 0b1101
    assert Observation.from_code(o.code, 2) == o
    assert str(o) == "1011"


def test_observation_is_taken_after_the_move():
    flags = AffineSubspace.point((1, 0))
    s = SystemState.initial(2, 0)
    a = AutomatonBuilder(2, 0)
    a.state("r", move=1, rule=lambda o: "hit" if o.flag else "r")
    a.state("hit", move=0, rule="hit")
    robot = a.build("r")
    after = step(s, robot, flags, 0)
    assert after.robot == (1, 0)
    assert robot.names[after.state] == "hit"


def test_pebble_carried_only_when_colocated_before_the_move():
    a = pebble_pusher()
    # go (carry) -> back (no carry) -> go: robot left the pebble at (1,0)
    states = trace(a, None, [1, 0, 0])
    assert states[1].robot == (1, 0) and states[1].pebbles == ((1, 0),)
    assert states[2].robot == (0, 0) and states[2].pebbles == ((1, 0),)
    # robot at (0,0), pebble at (1,0): carrying move does not drag it
    assert states[3].robot == (1, 0) and states[3].pebbles == ((1, 0),)


def test_random_bit_index_matches_step():
    a = pebble_pusher()
    rng = RngStream(99)
    s = SystemState.initial(2, 1)
    for _ in range(40):
        nxt = step(s, a, None, rng)
        assert nxt == step(s, a, None, rng.bit(s.step - 1))
        s = nxt


def test_observe_reports_pebble_and_flag():
    s = SystemState((0, 0), ((0, 0), (1, 0)), 1, 0)
    o = observe(s, AffineSubspace.point((0, 0)), 1)
    assert o.pebbles == (1, 0) and o.flag == 1 and o.random == 1


@pytest.mark.parametrize("probs,shape", [
    ([Fraction(1, 2)] * 2, (2, 4, (2, 2))),
    ([Fraction(1, 4)] * 4, (2, 4, (1, 1, 1, 1))),
    ([Fraction(1, 8)] * 8, (4, 16, (2,) * 8)),
    ([Fraction(1, 3), Fraction(2, 3)], (6, 64, (1, 2))),
    ([Fraction(1)], (0, 1, (1,))),
])
def test_tree_shape(probs, shape):
    assert tree_shape(probs) == shape


def test_bad_probabilities_rejected():
    with pytest.raises(AutomatonError):
        tree_shape([Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(AutomatonError):
        tree_shape([Fraction(0), Fraction(1)])


def test_builder_rejects_incomplete_tables():
    b = AutomatonBuilder(1, 0)
    b.state("a", move=1, rule={0: "a"})
    with pytest.raises(AutomatonError):
        b.build("a")


def test_unknown_target_rejected():
    b = AutomatonBuilder(1, 0)
    b.state("a", move=1, rule="nowhere")
    with pytest.raises(AutomatonError):
        b.build("a")


# -- kernels ---------------------------------------------------------------------

def _lane_states(name, seed, n, backend):
    p = get_program(name)
    lane = Lane(p.automaton, p.flag_set, seed, backend=backend)
    done, pos, pebs, states = lane.advance(n, log=True)
    return lane, pos, pebs, states


@pytest.mark.skipif(_core.compiled is None, reason="compiled kernels not built")
@pytest.mark.parametrize("name", ["z2", "z4", "z6", "z8"])
def test_compiled_and_python_kernels_agree(name):
    a = _lane_states(name, 5, 3000, "cython")
    b = _lane_states(name, 5, 3000, "python")
    for x, y in zip(a[1:], b[1:]):
        assert np.array_equal(x, y)
    assert a[0].system_state() == b[0].system_state()
    assert a[0].flag_hits == b[0].flag_hits


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["z2", "z4", "z6", "z8"]), st.integers(0, 2**64 - 1))
def test_kernel_matches_reference_step(name, seed):
    p = get_program(name)
    n = 400
    lane, pos, pebs, states = _lane_states(name, seed, n, None)
    ref = trace(p.automaton, p.flag_set, RngStream(seed).bits(n).tolist())
    assert [s.robot for s in ref[1:]] == [tuple(r) for r in pos.tolist()]
    assert [s.state for s in ref[1:]] == states.tolist()
    assert ref[-1] == lane.system_state()


def test_flag_hits_counted_post_move():
    p = get_program("z6")
    lane = Lane(p.automaton, p.flag_set, 3)
    _, pos, _, _ = lane.advance(5000, log=True)
    assert lane.flag_hits == int(np.sum(~np.any(pos, axis=1)))


def test_event_limit_stops_after_marked_step():
    p = get_program("z2")
    lane = Lane(p.automaton, None, 1, marks=p.walk_states)
    lane.advance(10_000, event_limit=5)
    assert lane.events == 5
    assert lane.last_event_state in p.walk_states
    # the commit step has run: the next state is the walk root again
    assert p.automaton.names[lane.state] == "walk"


def test_run_is_a_pure_function_of_its_arguments():
    p = get_program("z4")
    a = run(p.automaton, p.flag_set, 4, 20_000, seed=17)
    b = run(p.automaton, p.flag_set, 4, 20_000, seed=17)
    c = run(p.automaton, p.flag_set, 4, 20_000, seed=18)
    assert a.final == b.final and a.visited == b.visited
    assert a.final != c.final or a.visited != c.visited


def test_run_chunks_do_not_change_results(monkeypatch):
    from mazerobot.automaton import simulate
    p = get_program("z6")
    ref = run(p.automaton, p.flag_set, 6, 10_000, seed=3, log=True)
    monkeypatch.setattr(simulate, "CHUNK", 777)
    small = run(p.automaton, p.flag_set, 6, 10_000, seed=3, log=True)
    assert ref.final == small.final
    assert ref.visited == small.visited
    assert ref.pebble_trails == small.pebble_trails
    assert np.array_equal(ref.positions, small.positions)


def test_budget_zero_stays_at_origin():
    p = get_program("z2")
    t = run(p.automaton, None, 2, 0, seed=7)
    assert t.visited == frozenset({origin(2)})
    assert t.final.robot == origin(2) and t.length == 1
