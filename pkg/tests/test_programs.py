import itertools
from fractions import Fraction

import numpy as np
import pytest

from mazerobot.automaton import (Lane, SystemState, dumps, gadget_absorption, loads, observe,
                                 path_displacements, trace)
from mazerobot.harness import ExperimentConfig, coverage_experiment
from mazerobot.lattice import move_code, origin
from mazerobot.programs import DESK_BUDGETS, get_program

NAMES = ["z2", "z4", "z6", "z8"]


def logged(name, seed, n):
    p = get_program(name)
    lane = Lane(p.automaton, p.flag_set, seed)
    _, pos, pebs, states = lane.advance(n, log=True)
    k = p.dimension
    pos = np.vstack([np.zeros((1, k), np.int64), pos])
    pebs = np.concatenate([np.zeros((1, p.pebble_count, k), np.int64), pebs])
    executed = np.concatenate([[p.automaton.initial], states[:-1]])
    return p, pos, pebs, executed


@pytest.mark.parametrize("name", NAMES)
def test_alphabet_discipline(name):
    p, pos, _, executed = logged(name, 11, 200_000)
    moves = [move_code(tuple(d)) for d in (pos[1:] - pos[:-1]).tolist()]
    for q in np.unique(executed):
        states, allowed = p.phases[p.phase_of(int(q))]
        used = {m for m, e in zip(moves, executed) if e == q}
        assert used <= allowed | {0}, (p.automaton.names[q], used)


@pytest.mark.parametrize("name", ["z4", "z6", "z8"])
def test_phase_soundness(name):
    # pebble moves need a planar return, so they are rare; pool many short runs
    relocations = 0
    for seed in range(40):
        p, pos, pebs, executed = logged(name, seed, 20_000)
        carry = np.asarray(p.automaton.carry)[executed]
        moved = np.any(pebs[1:, 0] != pebs[:-1, 0], axis=1)
        together = np.all(pos[:-1] == pebs[:-1, 0], axis=1)
        relocations += int(moved.sum())
        # every pebble displacement happens from a co-located, carrying step ...
        assert np.all(together[moved] & (carry[moved] == 1))
        # ... and the programs only ask to carry when the pebble is there
        assert np.all(together[carry == 1])
    assert relocations > 50


def test_z2_compiles_to_a_depth_two_tree():
    p = get_program("z2")
    g = p.automaton.gadget("walk")
    assert (g.depth, g.leaves, g.restart_leaves) == (2, 4, 0)
    assert gadget_absorption(p.automaton, g) == [Fraction(1, 4)] * 4


def test_z2_starts_at_origin():
    p = get_program("z2")
    assert Lane(p.automaton).system_state().robot == origin(2)


def test_z6_first_observation_sees_pebble_and_flag():
    p = get_program("z6")
    s = SystemState.initial(6, 1)
    for r in (0, 1):
        o = observe(s, p.flag_set, r)
        assert (o.pebbles[0], o.flag, o.random) == (1, 1, r)


def _force(p, bits, target):
    """Shortest bit extension after which the last executed state is ``target``."""
    a = p.automaton
    q = a.index(target)
    for length in range(1, 9):
        for ext in itertools.product((0, 1), repeat=length):
            states = trace(a, p.flag_set, bits + list(ext))
            if states[-2].state == q:
                return bits + list(ext), states
    raise AssertionError(f"cannot reach {target}")


def test_z6_latched_flag_moves_pebble_in_two_planes():
    p = get_program("z6")
    bits, _ = _force(p, [], "A0+e1")
    # back onto the pebble, which sits on the flag: the flag-driven branch runs
    bits, _ = _force(p, bits, "A0-e1")
    bits, states = _force(p, bits, "R1+e2")
    assert states[-1].pebbles == ((0, 1, 0, 0, 0, 0),)
    bits, states = _force(p, bits, "R2-e4")
    assert states[-1].pebbles == ((0, 1, 0, -1, 0, 0),)
    assert p.automaton.names[states[-1].state] == "E"


def test_z6_flag_free_return_moves_pebble_in_e3_e4():
    p = get_program("z6")
    bits, _ = _force(p, [], "A0+e1")
    bits, _ = _force(p, bits, "A0-e1")
    bits, _ = _force(p, bits, "R1+e2")
    bits, _ = _force(p, bits, "R2+e3")
    # E excursion back onto the pebble, away from the flag
    bits, _ = _force(p, bits, "E+e5")
    bits, states = _force(p, bits, "E-e5")
    assert p.automaton.names[states[-1].state] == "A0"
    bits, _ = _force(p, bits, "A0+e2")
    bits, states = _force(p, bits, "A0-e2")
    assert p.automaton.names[states[-1].state] == "R2"


def test_z6_excursion_over_the_flag_latches():
    p = get_program("z6")
    bits, _ = _force(p, [], "A0+e1")
    bits, _ = _force(p, bits, "A0-e1")
    bits, _ = _force(p, bits, "R1+e2")
    bits, _ = _force(p, bits, "R2+e3")
    bits, _ = _force(p, bits, "E+e5")
    bits, _ = _force(p, bits, "E-e5")
    # pebble at (0,1,1,0,0,0); the flag cell (origin) is unreachable in the e1/e2 plane
    bits, states = _force(p, bits, "A0-e2")
    assert states[-1].robot == (0, 0, 1, 0, 0, 0)
    assert p.automaton.names[states[-1].state] == "A0"


def _z6_flag_hits(seed):
    p = get_program("z6")
    lane = Lane(p.automaton, p.flag_set, seed)
    hits = []
    done = 0
    for budget in (10**5, 10**6, 10**7):
        lane.advance(budget - done)
        done = budget
        hits.append(lane.flag_hits)
    return hits


def test_z6_flag_hits_never_decrease():
    for seed in range(4):
        h = _z6_flag_hits(seed)
        assert h == sorted(h) and h[0] > 0


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="the flag is only reachable when the pebble is back in its "
                   "plane; with a handful of pebble moves per 10^7 steps the count plateaus")
def test_z6_flag_hits_strictly_grow_for_most_seeds():
    grows = sum(h[0] < h[1] < h[2] for h in map(_z6_flag_hits, range(10)))
    assert grows > 5


def test_z8_five_way_choice_is_exact():
    p = get_program("z8")
    a = p.automaton
    g = a.gadget("F")
    assert gadget_absorption(a, g) == [Fraction(1, 5)] * 5
    assert g.restart_leaves > 0
    assert all(d == {origin(8)} for d in path_displacements(a, g).values())
    stay = a.index("F0")
    assert a.moves[stay] + a.moves[a.index("F0b")] == 0
    assert set(a.next[stay]) == {a.index("F0b")}


def test_z8_flag_plane():
    p = get_program("z8")
    assert (0,) * 6 + (3, -2) in p.flag_set
    assert (0, 1) + (0,) * 6 not in p.flag_set


@pytest.mark.parametrize("name", NAMES)
def test_programs_export_and_reload(name):
    a = get_program(name).automaton
    assert loads(dumps(a)) == a


@pytest.mark.parametrize("name", NAMES)
def test_coverage_is_monotone(name):
    rep = coverage_experiment(ExperimentConfig(name, budget=10**4, trials=10, seed=5)).to_dict()
    assert rep["results"]["monotone_per_trial"]
    assert rep["results"]["mean_coverage"] == sorted(rep["results"]["mean_coverage"])


@pytest.mark.slow
def test_z2_covers_the_ball_in_most_seeds_at_desk_budget():
    rep = coverage_experiment(ExperimentConfig("z2", budget=DESK_BUDGETS["z2"], trials=200, seed=1))
    assert rep.results["full_ball_frequency"][-1] > 0.5


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="pebble relocations are too rare at desk budgets; "
                   "mean coverage stays well below the full ball")
@pytest.mark.parametrize("name", ["z4", "z6", "z8"])
def test_pebble_programs_cover_the_ball_in_most_seeds_at_desk_budget(name):
    rep = coverage_experiment(ExperimentConfig(name, budget=DESK_BUDGETS[name], trials=20, seed=1))
    assert rep.results["full_ball_frequency"][-1] > 0.5
