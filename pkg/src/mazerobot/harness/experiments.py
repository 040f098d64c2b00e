"""Seeded Monte Carlo experiments over programs and walks.

Every trial is a pure function of (config, trial index): trial ``i`` uses
the bit stream of ``trial_seed(master, i)`` and aggregation is a fold in
trial-index order, so reports are bit-for-bit reproducible.

Units: program budgets count automaton steps unless stated otherwise;
walk budgets count walk steps.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import ceil, log2
from typing import Optional, Union

import numpy as np

from .. import _core
from ..automaton import BallIndex, Lane, gadget_absorption, run
from ..lattice import format_move, l1_ball_size, l1_norm
from ..programs import PROGRAMS, ProgramDescriptor, get_program
from ..walks import (WalkSpec, dp_step_distribution, first_return_cdf, origin_return_series,
                     z3_first_return_cdf, z3_return_partial_sum)
from .config import (COVERAGE_CELL_CAP, DISTRIBUTION_CHECKPOINT_CAP, P_VALUE_THRESHOLD,
                     SIGMA_THRESHOLD, ConfigError, ExperimentConfig, ResourceError,
                     powers_of_ten, trial_seed)
from .report import ExperimentReport
from .stats import binomial_sigma, chi_square, two_sample_within_sigma, within_sigma

# trial indices of the independent oracle runs start here (disjoint seeds)
ORACLE_INDEX_OFFSET = 1 << 40
# exact first-return oracle horizon per dimension (float DP cube stays small)
ORACLE_HORIZON = {1: 10_000, 2: 1_000, 3: 200}
# cap for exact Z^3 partial sums in the return lower bound
Z3_PARTIAL_SUM_CAP = 20_000
# steps allowed per trial when waiting for program events
EVENT_STEP_CAP = 10**6

Target = Union[ProgramDescriptor, WalkSpec]


# -- targets -------------------------------------------------------------------

def resolve_target(name: str) -> Target:
    """``z2 | z4 | z6 | z8`` (programs) or ``walk:z<k> | walk:lazy<k>`` (walks)."""
    if name in PROGRAMS:
        return get_program(name)
    if name.startswith("walk:"):
        body = name[5:]
        for prefix, make in (("lazy", WalkSpec.lazy), ("z", WalkSpec.simple)):
            if body.startswith(prefix) and body[len(prefix):].isdigit():
                k = int(body[len(prefix):])
                if k < 1:
                    break
                return make(k)
    raise ConfigError(f"unknown target {name!r}; use one of {sorted(PROGRAMS)} or walk:z<k>, walk:lazy<k>")


def _program(cfg: ExperimentConfig) -> ProgramDescriptor:
    t = resolve_target(cfg.target)
    if not isinstance(t, ProgramDescriptor):
        raise ConfigError(f"{cfg.target!r} is a walk; this experiment needs a program")
    return t


def _walk_tables(w: WalkSpec):
    vecs = np.ascontiguousarray(np.array(w.vectors, dtype=np.int64).reshape(len(w.vectors), w.dimension))
    cum = np.cumsum(np.array(w.integer_weights(), dtype=np.int64))
    d = w.denominator
    nbits = max(1, ceil(log2(d))) if d > 1 else 0
    return vecs, cum, d, nbits


# -- simulate --------------------------------------------------------------------

VISITED_LIST_CAP = 1000


def simulate(cfg: ExperimentConfig) -> ExperimentReport:
    """One seeded run of a program for ``budget`` steps."""
    p = _program(cfg)
    tr = run(p.automaton, p.flag_set, p.dimension, cfg.budget, cfg.seed)
    res = {
        "program": p.name,
        "dimension": p.dimension,
        "steps": cfg.budget,
        "final": {"robot": tr.final.robot, "pebbles": tr.final.pebbles,
                  "state": p.automaton.names[tr.final.state]},
        "flag_hits": tr.flag_hits,
        "visited_count": tr.visited_count,
        "pebble_relocations": [len(t) - 1 for t in tr.pebble_trails],
    }
    if tr.visited_count <= VISITED_LIST_CAP:
        res["visited"] = sorted(tr.visited)
    rows = [{"program": p.name, "steps": cfg.budget, "flag_hits": tr.flag_hits,
             "visited_count": tr.visited_count}]
    return ExperimentReport("simulate", cfg.echo(), res, rows)


# -- coverage --------------------------------------------------------------------

def _coverage_trials(p: ProgramDescriptor, ball: BallIndex, budget: int, seeds, checkpoints):
    lane = Lane(p.automaton, p.flag_set, 0, ball=ball)
    out = []
    for s in seeds:
        lane.reset(s)
        if budget:
            lane.advance(budget)
        fv = lane.first_visit
        seen = fv >= 0
        counts = [int(np.count_nonzero(seen & (fv <= c))) for c in checkpoints]
        pebble_l1 = [l1_norm(row) for row in lane.system_state().pebbles]
        out.append((counts, lane.flag_hits, pebble_l1))
    return out


def coverage_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Fraction of the L1 ball of radius ``radius`` visited, per budget checkpoint.

    ``extra["oracle_factor"] = m`` adds an independent run of ``m * trials``
    trials on a disjoint seed range and compares the full-ball frequency at
    the final checkpoint (two-sample test at 3 sigma).
    """
    p = _program(cfg)
    factor = int(cfg.extra.get("oracle_factor", 0))
    size = l1_ball_size(p.dimension, cfg.radius)
    if size * cfg.trials * (1 + factor) > COVERAGE_CELL_CAP:
        raise ResourceError(f"ball of {size} cells x {cfg.trials * (1 + factor)} trials "
                            f"exceeds the cap of {COVERAGE_CELL_CAP} cell records")
    try:
        ball = BallIndex(p.dimension, cfg.radius)
    except MemoryError as e:
        raise ResourceError(str(e)) from None
    checkpoints = powers_of_ten(cfg.budget)
    seeds = [cfg.trial_seed(i) for i in range(cfg.trials)]
    trials = _coverage_trials(p, ball, cfg.budget, seeds, checkpoints)
    per_trial = [{"index": i, "seed": s, "visited": c, "flag_hits": fh, "pebble_l1": pl}
                 for i, (s, (c, fh, pl)) in enumerate(zip(seeds, trials))]
    mean_cov = [sum(t[0][j] for t in trials) / (size * cfg.trials) for j in range(len(checkpoints))]
    full = [sum(1 for t in trials if t[0][j] == size) for j in range(len(checkpoints))]
    monotone = all(all(a <= b for a, b in zip(t[0], t[0][1:])) for t in trials)
    hist = Counter(d for t in trials for d in t[2])
    res = {
        "program": p.name,
        "ball_radius": cfg.radius,
        "ball_cells": size,
        "checkpoints": checkpoints,
        "mean_coverage": mean_cov,
        "full_ball_trials": full,
        "full_ball_frequency": [f / cfg.trials for f in full],
        "monotone_per_trial": monotone,
        "pebble_l1_histogram": {str(k): v for k, v in sorted(hist.items())},
        "trials": per_trial,
    }
    if factor:
        oseeds = [trial_seed(cfg.seed, ORACLE_INDEX_OFFSET + i) for i in range(factor * cfg.trials)]
        otr = _coverage_trials(p, ball, cfg.budget, oseeds, checkpoints[-1:])
        ofull = sum(1 for t in otr if t[0][0] == size)
        res["oracle"] = {
            "kind": "independent Monte Carlo on a disjoint seed range (statistical oracle)",
            "trials": len(oseeds),
            "full_ball_trials": ofull,
            "comparison": two_sample_within_sigma(full[-1], cfg.trials, ofull, len(oseeds)),
        }
    rows = [{"checkpoint": c, "mean_coverage": m, "full_ball_frequency": f / cfg.trials}
            for c, m, f in zip(checkpoints, mean_cov, full)]
    return ExperimentReport("coverage", cfg.echo(), res, rows)


# -- returns ---------------------------------------------------------------------

def walk_first_returns(w: WalkSpec, budget: int, seeds, backend: Optional[str] = None) -> list[int]:
    """First-return step of each seeded walk (-1 if none within ``budget``)."""
    kern = _core.get_kernels(backend)
    vecs, cum, d, nbits = _walk_tables(w)
    return [int(kern.walk_first_return(vecs, cum, d, nbits, s, budget, True)[0]) for s in seeds]


def program_first_returns(p: ProgramDescriptor, budget_moves: int, seeds) -> list[int]:
    """Excursion moves until the robot first ends a walk move on its anchor.

    The anchor is the pebble (or the origin for pebble-free programs); only
    executions of the program's walk commit states count as moves, so the
    coin-flip cancel pairs do not register as returns. -1 if no return
    within ``budget_moves`` moves.
    """
    a = p.automaton
    walk = np.array(sorted(p.walk_states), dtype=np.int32)
    lane = Lane(a, p.flag_set, 0)
    out = []
    for s in seeds:
        lane.reset(s)
        moves, found, chunk = 0, -1, 4096
        prev = a.initial
        while found < 0 and moves < budget_moves:
            done, pos, pebs, states = lane.advance(chunk, log=True)
            executed = np.concatenate(([prev], states[:-1])).astype(np.int32)
            prev = int(states[-1])
            is_move = np.isin(executed, walk)
            if p.pebble_count:
                home = np.all(pos == pebs[:, 0, :], axis=1)
            else:
                home = ~np.any(pos, axis=1)
            count = np.cumsum(is_move)
            hits = np.nonzero(is_move & home & (moves + count <= budget_moves))[0]
            if hits.size:
                found = moves + int(count[hits[0]])
            moves += int(count[-1])
            chunk = min(chunk * 2, 1 << 20)
        out.append(found)
    return out


def _lower_bound_sum(w: WalkSpec, n: int, mode: str) -> tuple[int, Fraction | float]:
    if w == WalkSpec.simple(3):
        h = min(n, Z3_PARTIAL_SUM_CAP)
        return h, z3_return_partial_sum(h)
    h = min(n, ORACLE_HORIZON.get(w.dimension, 50) // (1 if mode == "float" else 10))
    return h, sum(origin_return_series(w, h, mode))


def return_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Empirical first-return CDF at power-of-ten checkpoints up to ``budget``.

    All checkpoints share the same trials (nested events). For walks the
    exact first-return CDF is the oracle up to a horizon: absorbing-origin DP,
    or for the simple Z^3 walk the closed form with the renewal equation; and 1 - 1/S(N) with S the exact partial
    sum of origin probabilities is reported as a lower bound. Programs are
    measured in excursion moves and compared with the planar simple walk.
    """
    target = resolve_target(cfg.target)
    seeds = [cfg.trial_seed(i) for i in range(cfg.trials)]
    if isinstance(target, WalkSpec):
        w = target
        firsts = walk_first_returns(w, cfg.budget, seeds)
        unit = "walk steps"
    else:
        w = WalkSpec.simple(2)
        firsts = program_first_returns(target, cfg.budget, seeds)
        unit = "excursion moves"
    checkpoints = powers_of_ten(cfg.budget, include_zero=False)
    n = cfg.trials
    returned = [sum(1 for f in firsts if 0 < f <= c) for c in checkpoints]
    freq = [r / n for r in returned]
    if w == WalkSpec.simple(3) and cfg.mode == "float":
        # closed form plus renewal reaches much further than the grid DP
        oracle_h = min(cfg.budget, Z3_PARTIAL_SUM_CAP)
        cdf = z3_first_return_cdf(oracle_h)
    else:
        oracle_h = min(cfg.budget, ORACLE_HORIZON.get(w.dimension, 50))
        if cfg.mode == "rational":
            oracle_h = min(oracle_h, 100)
        cdf = first_return_cdf(w, oracle_h, cfg.mode) if oracle_h >= 1 else [0]
    rows, table = [], []
    for c, r, f in zip(checkpoints, returned, freq):
        entry = {"budget": c, "returned": r, "frequency": f, "sigma": binomial_sigma(f, n)}
        if c <= oracle_h:
            entry["exact_cdf"] = cdf[c]
            entry["oracle_check"] = within_sigma(f, float(cdf[c]), n)
        h, s = _lower_bound_sum(w, c, cfg.mode)
        bound = 1 - 1 / s
        sb = binomial_sigma(float(bound), n)
        entry["lower_bound"] = {
            "partial_sum_horizon": h,
            "partial_sum": float(s),
            # exact value only while it stays printable
            "partial_sum_exact": s if isinstance(s, Fraction) and s.denominator.bit_length() <= 256 else None,
            "value": float(bound),
            "above": f > bound,
            "consistent": f >= float(bound) - SIGMA_THRESHOLD * sb,
        }
        table.append(entry)
        rows.append({"budget": c, "returned": r, "frequency": f,
                     "exact_cdf": float(entry["exact_cdf"]) if "exact_cdf" in entry else "",
                     "lower_bound": float(bound)})
    res = {
        "target": cfg.target,
        "unit": unit,
        "checkpoints": table,
        "non_decreasing": all(a <= b for a, b in zip(freq, freq[1:])),
        "increase_last_two_decades": (freq[-1] - freq[-3]) if len(freq) >= 3 else None,
        "first_return": firsts,
        "thresholds": {"sigma": SIGMA_THRESHOLD},
    }
    return ExperimentReport("returns", cfg.echo(), res, rows)


# -- distributions -----------------------------------------------------------------

def _event_positions(p: ProgramDescriptor, marks, checkpoint: int, cap: int, seeds,
                     project) -> tuple[Counter, int]:
    lane = Lane(p.automaton, p.flag_set, 0, marks=marks)
    counts: Counter = Counter()
    dropped = 0
    for s in seeds:
        lane.reset(s)
        lane.reset_events()
        lane.advance(cap, event_limit=checkpoint)
        if lane.events < checkpoint:
            dropped += 1
            continue
        counts[project(lane)] += 1
    return counts, dropped


def distribution_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Chi-square of a program's position law against the exact planar walk law.

    ``z2``: robot position after ``checkpoint`` walk moves. ``z4``: pebble
    coordinates (x3, x4) after ``checkpoint`` pebble moves; trials are capped
    at ``budget`` steps and incomplete ones dropped (the move directions are
    independent of excursion lengths, so the kept ones are unbiased).
    """
    p = _program(cfg)
    checkpoint = int(cfg.extra.get("checkpoint", 8))
    if checkpoint < 0:
        raise ConfigError("checkpoint must be >= 0")
    if checkpoint > DISTRIBUTION_CHECKPOINT_CAP:
        raise ResourceError(f"checkpoint {checkpoint} exceeds the exact-grid cap {DISTRIBUTION_CHECKPOINT_CAP}")
    base = {"program": p.name, "checkpoint": checkpoint, "thresholds": {"p_value": P_VALUE_THRESHOLD}}
    if checkpoint == 0:
        base.update(skipped=True, reason="checkpoint 0: all mass at the origin, nothing to compare")
        return ExperimentReport("compare", cfg.echo(), base, [{"checkpoint": 0, "skipped": True}])
    if p.name == "z2":
        marks, what = p.walk_states, "robot position"
        project = lambda lane: tuple(int(x) for x in lane.robot)  # noqa: E731
    elif p.name == "z4":
        marks, what = p.pebble_states, "pebble (x3, x4)"
        project = lambda lane: (int(lane.peb[0, 2]), int(lane.peb[0, 3]))  # noqa: E731
    else:
        raise ConfigError("position comparison is defined for z2 and z4")
    seeds = [cfg.trial_seed(i) for i in range(cfg.trials)]
    cap = cfg.budget if cfg.budget > 0 else EVENT_STEP_CAP
    counts, dropped = _event_positions(p, marks, checkpoint, cap, seeds, project)
    grid = dp_step_distribution(WalkSpec.simple(2), checkpoint, checkpoint, cfg.mode)
    probs = {x: float(m) for x, m in grid.items()}
    test = chi_square(counts, probs)
    base.update(
        compared=what,
        completed_trials=sum(counts.values()),
        dropped_trials=dropped,
        chi_square=test.to_dict(),
        observed={f"{x[0]},{x[1]}": c for x, c in sorted(counts.items())},
        exact={f"{x[0]},{x[1]}": m for x, m in grid.items()},
    )
    rows = [{"x": x[0], "y": x[1], "observed": counts.get(x, 0), "expected_probability": float(m)}
            for x, m in grid.items()]
    return ExperimentReport("compare", cfg.echo(), base, rows)


def increment_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Direction counts of pebble-carrying moves, per phase, against uniform.

    Runs ``trials`` seeded trials of ``budget`` steps each and tallies every
    executed pebble-carrying commit state.
    """
    p = _program(cfg)
    a = p.automaton
    if not p.pebble_states:
        raise ConfigError(f"program {p.name} never moves a pebble")
    lane = Lane(a, p.flag_set, 0, marks=p.pebble_states)
    hist = np.zeros(a.size, np.int64)
    for i in range(cfg.trials):
        lane.reset(cfg.trial_seed(i))
        lane.advance(cfg.budget)
        hist += lane.mark_hist
    phases = {}
    rows = []
    for ph, (states, _) in sorted(p.phases.items()):
        g = a.gadget(ph)
        if not any(c in p.pebble_states for c in g.commits):
            continue
        obs = {a.names[c]: int(hist[c]) for c in g.commits}
        probs = dict(zip((a.names[c] for c in g.commits), gadget_absorption(a, g)))
        test = chi_square(obs, {k: float(v) for k, v in probs.items()})
        phases[ph] = {"counts": obs, "exact_probabilities": probs, "events": sum(obs.values()),
                      "chi_square": test.to_dict()}
        rows += [{"phase": ph, "commit": k, "count": v, "probability": float(probs[k])} for k, v in obs.items()]
    res = {"program": p.name, "steps_per_trial": cfg.budget, "phases": phases,
           "thresholds": {"p_value": P_VALUE_THRESHOLD}}
    return ExperimentReport("increments", cfg.echo(), res, rows)


def flag_choice_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Outcome frequencies of the flag-cell choice of ``z8``.

    Natural flag-plane arrivals with the pebble are rare, so each event
    starts a fresh choice at the gadget root (robot and pebble at the
    origin) and runs until a commit state executes. Events consume
    consecutive, disjoint stretches of one seeded bit stream; ``trials`` is
    the number of events.
    """
    p = _program(cfg)
    if p.flag_choice is None:
        raise ConfigError(f"program {p.name} has no flag-cell choice")
    a = p.automaton
    g = a.gadget(p.flag_choice)
    lane = Lane(a, p.flag_set, cfg.seed, marks=g.commits)
    zero = np.zeros(p.dimension, np.int64)
    outcome = Counter()
    for _ in range(cfg.trials):
        lane.place(robot=zero, pebbles=zero, state=g.root)
        lane.reset_events()
        lane.advance(EVENT_STEP_CAP, event_limit=1)
        outcome[a.names[lane.last_event_state]] += 1
    exact = gadget_absorption(a, g)
    names = [a.names[c] for c in g.commits]
    test = chi_square(outcome, {n: float(x) for n, x in zip(names, exact)})
    labels = {n: (format_move(a.moves[c]) if n != "F0" else "stay") for n, c in zip(names, g.commits)}
    res = {
        "program": p.name,
        "events": cfg.trials,
        "outcomes": {labels[n]: outcome.get(n, 0) for n in names},
        "exact_absorption": {labels[n]: x for n, x in zip(names, exact)},
        "exact_uniform": all(x == Fraction(1, len(names)) for x in exact),
        "chi_square": test.to_dict(),
        "thresholds": {"p_value": P_VALUE_THRESHOLD},
    }
    rows = [{"outcome": labels[n], "count": outcome.get(n, 0), "exact": str(x)} for n, x in zip(names, exact)]
    return ExperimentReport("flag-choice", cfg.echo(), res, rows)
