"""Randomized invariant checks over generated games."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ssgsolve.baselines import deflate, solve_bvi
from ssgsolve.graph import mec_decompose, trap_states
from ssgsolve.model import GenParams, generate_random, normalize, parse_model, \
    partition_states, serialize_model
from ssgsolve.oracle import exact_value, k_step_oracle
from ssgsolve.svi import solve_svi

from _util import exact_floats

EPS = 1e-6
SLACK = 1e-9


@st.composite
def games(draw, max_states=7, max_actions=3):
    params = GenParams(
        n_states=draw(st.integers(2, max_states)),
        max_actions_per_state=draw(st.integers(1, max_actions)),
        max_branching=draw(st.integers(1, 3)),
        target_fraction=draw(st.sampled_from([0.1, 0.25, 0.5])),
        min_player_fraction=draw(st.sampled_from([0.0, 0.5, 1.0])),
        ec_bias=draw(st.sampled_from([0.0, 0.5, 1.0])),
        seed=draw(st.integers(0, 2**31 - 1)),
    )
    return generate_random(params)


@settings(deadline=None, max_examples=60)
@given(games())
def test_serialize_parse_round_trip(g):
    assert parse_model(serialize_model(g)) == g


@settings(deadline=None, max_examples=60)
@given(games())
def test_normalize_idempotent(g):
    ng = normalize(g)
    assert normalize(ng) is ng


@settings(deadline=None, max_examples=30)
@given(games(max_states=6))
def test_solver_brackets_exact_values(g):
    want = exact_floats(g)
    res = solve_svi(g, EPS)
    assert res.converged
    for s, v in enumerate(want):
        assert res.lower[s] <= v + SLACK
        assert res.upper[s] >= v - SLACK
        assert abs(res.value[s] - v) <= EPS + SLACK


@settings(deadline=None, max_examples=30)
@given(games(max_states=6))
def test_iterates_stay_sandwiched(g):
    want = exact_floats(g)
    res = solve_svi(g, EPS, record_vectors=True)
    for lo, up in res.vectors:
        for s, v in enumerate(want):
            assert -1e-12 <= lo[s] <= v + SLACK
            assert v - SLACK <= up[s] <= 1.0 + 1e-12


@settings(deadline=None, max_examples=40)
@given(games())
def test_global_bounds_monotone(g):
    res = solve_svi(g, EPS)
    prev_l, prev_u = 0.0, 1.0
    for t in res.trace:
        assert t.l >= prev_l - 1e-12
        assert t.u <= prev_u + 1e-12
        assert t.l <= t.u + SLACK
        prev_l, prev_u = t.l, t.u


@settings(deadline=None, max_examples=30)
@given(games(max_states=6))
def test_deflate_never_cuts_below_exact(g):
    part = partition_states(g)
    want = exact_floats(g)
    U = [0.0 if s in part.sinks else 1.0 for s in range(g.n_states)]
    cut = deflate(g, part, U)
    for s, v in enumerate(want):
        assert cut[s] >= v - SLACK


@settings(deadline=None, max_examples=30)
@given(games(max_states=6))
def test_trap_members_have_value_zero(g):
    part = partition_states(g)
    want = exact_floats(g)
    for s in trap_states(g, part.unknown):
        assert want[s] == 0.0


@settings(deadline=None, max_examples=40)
@given(games(max_actions=1), st.integers(0, 6))
def test_k_step_matches_matrix_power(g, k):
    part = partition_states(g)
    reach, stay = k_step_oracle(g, part, k)

    n = g.n_states
    P = np.eye(n)
    for s in range(n):
        if s in part.unknown:
            P[s] = 0.0
            for t, p in g.actions[s][0].transitions:
                P[s, t] = float(p)
    Pk = np.linalg.matrix_power(P, k)
    f = np.array([1.0 if s in part.targets else 0.0 for s in range(n)])
    q = np.array([1.0 if s in part.unknown else 0.0 for s in range(n)])
    assert np.allclose([float(x) for x in reach], Pk @ f, atol=1e-12, rtol=0.0)
    assert np.allclose([float(x) for x in stay], Pk @ q, atol=1e-12, rtol=0.0)


@settings(deadline=None, max_examples=25)
@given(games(max_states=6))
def test_bvi_agrees_with_svi(g):
    a = solve_svi(g, EPS)
    b = solve_bvi(g, EPS)
    assert a.converged and b.converged
    for s in range(g.n_states):
        assert abs(a.value[s] - b.value[s]) <= 2 * EPS


def test_ec_bias_produces_end_components():
    g = generate_random(GenParams(
        n_states=6, max_actions_per_state=2, max_branching=2,
        target_fraction=0.2, min_player_fraction=0.5, ec_bias=1.0, seed=4,
    ))
    part = partition_states(g)
    assert part.unknown == {3, 4}
    mecs = mec_decompose(g, part.unknown)
    assert [sorted(m.states) for m in mecs] == [[4]]
