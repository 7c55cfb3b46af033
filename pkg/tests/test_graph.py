"""Graph analyses: SCCs, end components, traps, best-exit collection."""

import itertools

from ssgsolve.graph import (
    BestExitSet,
    best_exit_set,
    best_exits,
    handle_ecs,
    mec_decompose,
    scc_decompose,
    trap_states,
)
from ssgsolve.model import MAX, GenParams, generate_random, normalize, parse_model, partition_states
from ssgsolve.presets import (
    asymmetric_ring,
    exit_seesaw,
    loop_or_coin,
    loop_with_bypass,
    minimizer_trap,
    nested_rings,
    serial_loops,
    slow_loop,
)

from _util import TRAP_FEED, exact_floats


def k0_vectors(game):
    part = partition_states(game)
    reach = [1.0 if s in part.targets else 0.0 for s in range(game.n_states)]
    stay = [1.0 if s in part.unknown else 0.0 for s in range(game.n_states)]
    return part, reach, stay


def test_scc_three_chain_reverse_topological():
    g = normalize(parse_model("ssg 1\nstates 3\ntarget 2\naction 0 a\n  1 1\naction 1 a\n  2 1\n"))
    assert scc_decompose(g) == [[2], [1], [0]]


def test_scc_order_on_bypass_model():
    comps = scc_decompose(loop_with_bypass())
    assert [sorted(c) for c in comps] == [[3], [4], [1], [2], [0]]
    # every component appears after everything it can reach
    pos = {s: i for i, c in enumerate(comps) for s in c}
    g = loop_with_bypass()
    for s in range(g.n_states):
        for a in g.actions[s]:
            for t, _ in a.transitions:
                if pos[s] != pos[t]:
                    assert pos[t] < pos[s]


def test_scc_restrict():
    g = serial_loops()
    assert scc_decompose(g, restrict={0, 1}) == [[1], [0]]


def test_mec_seesaw_cycle():
    g = exit_seesaw()
    (mec,) = mec_decompose(g, {0, 1})
    assert mec.states == frozenset({0, 1})
    assert mec.stay_actions == {0: ("a",), 1: ("a",)}


def test_mec_self_loop_state():
    (mec,) = mec_decompose(loop_or_coin(), {0})
    assert mec.states == frozenset({0})
    assert mec.stay_actions[0] == ("a",)


def test_mec_none_in_leaky_loop():
    # the loop action leaks out, so the singleton is not closed
    assert mec_decompose(slow_loop(), {0}) == []


def test_mec_minimizer_cycle():
    (mec,) = mec_decompose(minimizer_trap(), {0, 1})
    assert mec.states == frozenset({0, 1})


def test_trap_states_minimizer_cycle():
    g = minimizer_trap()
    assert trap_states(g, {0, 1}) == {0, 1}
    # cut down to one cycle state the confinement breaks
    assert trap_states(g, {0}) == set()


def test_trap_states_ignore_maximizer_cycles():
    assert trap_states(exit_seesaw(), {0, 1}) == set()
    assert trap_states(nested_rings(), {0, 1, 2, 3}) == set()


def test_trap_states_found_behind_feeder():
    g = parse_model(TRAP_FEED)
    part = partition_states(g)
    assert trap_states(g, part.unknown) == {1, 2}


def test_best_exits_seesaw_initial():
    g = exit_seesaw()
    f = [1.0, 1.0, 1.0, 0.0]
    assert best_exits(g, {0, 1}, f) == {(0, "b")}
    # worths behind that pick: 2/3 for (0, b) against 0.6 for (1, b)
    assert sum(float(p) * f[t] for t, p in g.action(0, "b").transitions) == 2 / 3


def test_best_exits_ring_prefers_better_coin():
    g = asymmetric_ring()
    assert best_exits(g, {0, 1, 2}, [1.0, 1.0, 1.0, 1.0, 0.0]) == {(2, "cash")}


def test_best_exits_empty_without_maximizer_exit():
    assert best_exits(minimizer_trap(), {0, 1}, [1.0] * 4) == set()


def test_best_exit_set_peels_ring_layer_by_layer():
    g = asymmetric_ring()
    part = partition_states(g)
    acc = BestExitSet()
    best_exit_set(g, [1.0, 1.0, 1.0, 1.0, 0.0], frozenset({0, 1, 2}), part, acc)
    assert acc.pairs == {(2, "cash"), (1, "cash")}
    assert acc.removed_trap_states == set()


def test_best_exit_set_nested_rings_pessimistic_vector():
    # with nothing accumulated on the ring the cash-outs win layer by layer
    g = nested_rings()
    part = partition_states(g)
    acc = BestExitSet()
    best_exit_set(g, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0], frozenset({0, 1, 2, 3}), part, acc)
    assert acc.pairs == {(0, "cash"), (1, "cash"), (2, "cash")}


def test_best_exit_set_nested_rings_optimistic_vector():
    # an optimistic vector makes the ring edge back toward the peeled state
    # outrank the remaining cash-outs
    g = nested_rings()
    part = partition_states(g)
    acc = BestExitSet()
    best_exit_set(g, [1.0, 1.0, 1.0, 1.0, 1.0, 0.0], frozenset({0, 1, 2, 3}), part, acc)
    assert acc.pairs == {(0, "cash"), (3, "ring")}


def test_best_exit_set_records_trap():
    g = minimizer_trap()
    part = partition_states(g)
    acc = BestExitSet()
    best_exit_set(g, [0.0, 0.0, 1.0, 0.0], frozenset({0, 1}), part, acc)
    assert acc.removed_trap_states == {0, 1}
    assert part.unknown == set()
    assert {0, 1} <= part.sinks


def test_handle_ecs_forces_coin_state():
    g = loop_or_coin()
    part, reach, stay = k0_vectors(g)
    B = handle_ecs(g, reach, stay, 1.0, part)
    assert B.pairs == {(0, "b")}
    assert B.removed_trap_states == set()


def test_handle_ecs_no_components_no_pairs():
    g = slow_loop()
    part, reach, stay = k0_vectors(g)
    B = handle_ecs(g, reach, stay, 1.0, part)
    assert B.pairs == set()
    assert B.removed_trap_states == set()
    assert part.unknown == {0}


def test_handle_ecs_removes_trap_and_zeroes_rows():
    g = minimizer_trap()
    part, reach, stay = k0_vectors(g)
    B = handle_ecs(g, reach, stay, 1.0, part)
    assert B.removed_trap_states == {0, 1}
    assert part.unknown == set()
    assert {0, 1} <= part.sinks
    assert reach[0] == reach[1] == 0.0
    assert stay[0] == stay[1] == 0.0


def test_handle_ecs_trap_removed_before_ranking():
    # state 3 must not be steered into the worthless trap exit
    g = parse_model(TRAP_FEED)
    part, reach, stay = k0_vectors(g)
    B = handle_ecs(g, reach, stay, 1.0, part)
    assert B.removed_trap_states == {1, 2}
    assert (3, "a0") not in B.pairs


def all_end_components(game, region):
    """Exhaustive end-component enumeration, usable for small games only.

    A set T qualifies when every member keeps an action whose successors
    all stay in T and the kept actions connect T strongly.
    """
    region = sorted(region)
    found = []
    for size in range(1, len(region) + 1):
        for combo in itertools.combinations(region, size):
            T = set(combo)
            edges = {s: set() for s in T}
            ok = True
            for s in T:
                stay_edges = set()
                for a in game.actions[s]:
                    succs = {t for t, _ in a.transitions}
                    if succs <= T:
                        stay_edges |= succs
                if not stay_edges:
                    ok = False
                    break
                edges[s] = stay_edges
            if not ok:
                continue
            # strong connectivity over the staying edges
            for start in T:
                seen = {start}
                stack = [start]
                while stack:
                    for t in edges[stack.pop()]:
                        if t not in seen:
                            seen.add(t)
                            stack.append(t)
                if seen != T:
                    ok = False
                    break
            if ok:
                found.append(frozenset(T))
    return found


def has_max_exit(game, T):
    return any(
        game.owner[s] == MAX and any(t not in T for t, _ in a.transitions)
        for s in T
        for a in game.actions[s]
    )


def check_exit_cover(game):
    """Layered exit collection handles every end component of the game.

    Components without a Maximizer exit must leave the unknown pool; every
    component that fully survives must be exited by some collected pair;
    and each collected pair's one-step worth under the exact values must
    not undersell its state.
    """
    part = partition_states(game)
    region = set(part.unknown)
    if not region:
        return
    ecs = all_end_components(game, region)
    vals = exact_floats(game)
    reach = list(vals)
    stay = [0.0] * game.n_states
    B = handle_ecs(game, reach, stay, 1.0, part)
    for T in ecs:
        if not has_max_exit(game, T):
            assert not (T & part.unknown), f"trap {sorted(T)} left in the pool"
        elif T <= part.unknown:
            exits = {
                (s, a)
                for (s, a) in B.pairs
                if s in T and any(t not in T for t, _ in game.action(s, a).transitions)
            }
            assert exits, f"no exit pair covers {sorted(T)}"
    for s, a in B.pairs:
        est = sum(float(p) * vals[t] for t, p in game.action(s, a).transitions)
        assert est >= vals[s] - 1e-9


def check_mecs_are_maximal_ecs(game):
    part = partition_states(game)
    region = set(part.unknown)
    ecs = all_end_components(game, region)
    maximal = {T for T in ecs if not any(T < U for U in ecs)}
    got = {m.states for m in mec_decompose(game, region)}
    assert got == maximal


def test_exit_cover_on_presets():
    for build in (exit_seesaw, asymmetric_ring, nested_rings, minimizer_trap,
                  loop_or_coin, loop_with_bypass):
        check_exit_cover(build())


def test_exit_cover_on_random_games():
    for seed in range(40):
        p = GenParams(n_states=6, max_actions_per_state=3, max_branching=2,
                      ec_bias=(0.0, 0.4, 0.8, 1.0)[seed % 4], seed=seed)
        check_exit_cover(generate_random(p))


def test_mec_decomposition_matches_exhaustive_enumeration():
    for build in (exit_seesaw, asymmetric_ring, nested_rings, minimizer_trap):
        check_mecs_are_maximal_ecs(build())
    for seed in range(30):
        p = GenParams(n_states=6, max_actions_per_state=3, max_branching=2,
                      ec_bias=(0.0, 0.5, 1.0)[seed % 3], seed=seed)
        check_mecs_are_maximal_ecs(generate_random(p))
