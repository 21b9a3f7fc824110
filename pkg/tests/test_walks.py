import dataclasses
import math
from collections import Counter
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from schemewalk import (
    ArcState,
    CoinSpec,
    InputError,
    LineState,
    NormalizationError,
    complete_graph,
    cycle_graph,
    grover_coin,
    grover_walk_matrix,
    grover_walk_run,
    hadamard_coin,
    line_walk_run,
    path_graph,
    position_distribution,
    regular_tree,
    rotation_coin,
    split_step_run,
    stratify,
    stratum_distribution,
    tree_orbit_walk_run,
    unitary_coin,
)
from schemewalk.graphs import graph_from_networkx
from schemewalk import walks
from schemewalk.walks import identity_coin, line_coin


def tree_run(steps, depth=4):
    g = regular_tree(3, depth)
    return g, grover_walk_run(g, ArcState.from_arc(g, (0, 1)), steps)


# Coins

def test_grover_coin_degree_one():
    assert np.array_equal(grover_coin(1), [[1.0]])

def test_grover_coin_degree_two_is_swap():
    assert np.array_equal(grover_coin(2), [[0.0, 1.0], [1.0, 0.0]])

def test_grover_coin_degree_three_exact():
    coin = grover_coin(3, exact=True)
    assert coin[0, 0] == Fraction(-1, 3)
    assert coin[0, 1] == Fraction(2, 3)
    assert coin[2, 1] == Fraction(2, 3)

@given(st.integers(min_value=1, max_value=12))
def test_grover_coin_is_orthogonal(degree):
    coin = grover_coin(degree)
    assert np.allclose(coin @ coin.T, np.eye(degree), atol=1e-12)

def test_unitary_coin_rejects_bad_weights():
    with pytest.raises(InputError):
        unitary_coin(1.0, 1.0)

def test_unitary_coin_shape():
    coin = unitary_coin(1 / math.sqrt(2), 1j / math.sqrt(2))
    assert np.allclose(coin.matrix.conj().T @ coin.matrix, np.eye(2))

def test_coin_spec_rejects_non_unitary():
    with pytest.raises(InputError):
        CoinSpec("custom", np.array([[1.0, 1.0], [0.0, 1.0]]))

def test_scaled_coin_rejected():
    with pytest.raises(InputError):
        CoinSpec("scaled", 1.1 * hadamard_coin().matrix)

def test_coin_matrix_is_read_only():
    coin = hadamard_coin()
    with pytest.raises(ValueError):
        coin.matrix *= 1.1

def test_unknown_line_coin():
    with pytest.raises(InputError):
        line_coin("fourier")


# Grover walk on arcs

def test_tree_walk_first_step():
    _, snapshots = tree_run(1)
    state = snapshots[1]
    assert state.nonzero() == {(1, 0): Fraction(-1, 3), (2, 0): Fraction(2, 3), (3, 0): Fraction(2, 3)}

def test_tree_walk_second_step():
    _, snapshots = tree_run(2)
    values = Counter(snapshots[2].nonzero().values())
    assert values == {Fraction(1, 9): 1, Fraction(-2, 9): 4, Fraction(4, 9): 4}
    assert snapshots[2].amplitude((1, 0)) == Fraction(1, 9)

def test_exact_norm_is_preserved():
    _, snapshots = tree_run(6)
    assert all(s.norm_squared() == 1 for s in snapshots)
    assert [s.step for s in snapshots] == list(range(7))

def test_first_step_position_distribution():
    _, snapshots = tree_run(1)
    dist = position_distribution(snapshots[1])
    assert dist[1] == Fraction(1, 9)
    assert dist[2] + dist[3] == Fraction(8, 9)
    assert sum(dist) == 1

def test_second_step_probabilities_sum_to_one():
    _, snapshots = tree_run(2)
    probs = snapshots[2].probabilities()
    assert sum(probs) == Fraction(1, 81) + 4 * Fraction(4, 81) + 4 * Fraction(16, 81) == 1

def test_stratum_distribution():
    g, snapshots = tree_run(2)
    masses = stratum_distribution(snapshots[1], stratify(g, 0))
    assert masses[:3] == [0, 1, 0]

def test_uniform_state_weights_by_degree():
    g = path_graph(3)
    dist = position_distribution(ArcState.uniform(g))
    assert np.allclose(dist, [0.25, 0.5, 0.25])

def test_cycle_norm_is_preserved():
    g = cycle_graph(4)
    rng = np.random.default_rng(7)
    initial = ArcState.from_amplitudes(g, rng.standard_normal(8) + 1j * rng.standard_normal(8), normalize=True)
    for state in grover_walk_run(g, initial, 40):
        assert abs(state.norm_squared() - 1.0) < 1e-12

def test_unnormalized_initial_state_rejected():
    g = cycle_graph(4)
    with pytest.raises(NormalizationError):
        grover_walk_run(g, ArcState.from_amplitudes(g, [1.0] * 8), 1)

def test_initial_arc_must_exist():
    with pytest.raises(InputError):
        ArcState.from_arc(cycle_graph(4), (0, 2))

def test_grover_norm_checked_every_step(monkeypatch):
    g = cycle_graph(4)
    step = walks._grover_step
    monkeypatch.setattr(walks, "_grover_step", lambda *args: 1.1 * step(*args))
    initial = ArcState.from_arc(g, (0, 1), exact=False)
    with pytest.raises(NormalizationError, match="after step 1"):
        grover_walk_run(g, initial, 3)

def test_negative_steps_rejected():
    g = cycle_graph(4)
    with pytest.raises(InputError):
        grover_walk_run(g, ArcState.from_arc(g, (0, 1)), -1)

@pytest.mark.parametrize(
    "graph",
    [cycle_graph(5), complete_graph(4), regular_tree(3, 2), graph_from_networkx(nx.petersen_graph())],
)
def test_walk_matches_dense_operator(graph):
    rng = np.random.default_rng(11)
    size = len(graph.arcs)
    initial = ArcState.from_amplitudes(graph, rng.standard_normal(size) + 1j * rng.standard_normal(size), normalize=True)
    u = grover_walk_matrix(graph)
    vec = initial.amplitudes
    for state in grover_walk_run(graph, initial, 5):
        assert np.allclose(state.amplitudes, vec, atol=1e-12)
        vec = u @ vec

def test_dense_operator_is_orthogonal():
    u = grover_walk_matrix(graph_from_networkx(nx.petersen_graph()))
    assert np.allclose(u @ u.T, np.eye(30), atol=1e-12)


# Tree walk on arc orbits

def test_orbit_walk_matches_explicit_walk():
    g, explicit = tree_run(7, depth=5)
    orbits = tree_orbit_walk_run(3, 5, 7)
    for state, orbit in zip(explicit, orbits):
        assert list(orbit.to_arc_state(g).amplitudes) == list(state.amplitudes)

def test_orbit_walk_distance_masses():
    g, explicit = tree_run(5, depth=5)
    orbits = tree_orbit_walk_run(3, 5, 5)
    strat = stratify(g, 0)
    for state, orbit in zip(explicit, orbits):
        assert orbit.distance_masses() == stratum_distribution(state, strat)

def test_deep_tree_walk_preserves_norm():
    snapshots = tree_orbit_walk_run(3, 102, 100, exact=False)
    assert len(snapshots) == 101
    for state in snapshots:
        assert abs(state.norm_squared() - 1.0) < 1e-9

def test_deep_tree_walk_exact():
    final = tree_orbit_walk_run(3, 102, 100)[-1]
    assert final.norm_squared() == 1
    assert sum(final.distance_masses()) == 1

def test_orbit_walk_needs_branching():
    with pytest.raises(InputError):
        tree_orbit_walk_run(1, 3, 2)


# Line walks

def dense_line_step(lo, hi, coin, *, up=True, down=True):
    """Coin then conditional shift as one matrix on positions lo..hi, index (x - lo) * 2 + c."""
    size = 2 * (hi - lo + 1)
    shift = np.zeros((size, size))
    for x in range(lo, hi + 1):
        for c in (0, 1):
            moved = x + (1 if c == 0 and up else 0) - (1 if c == 1 and down else 0)
            if lo <= moved <= hi:
                shift[(moved - lo) * 2 + c, (x - lo) * 2 + c] = 1.0
    return shift @ np.kron(np.eye(hi - lo + 1), coin)

def as_vector(state, lo, hi):
    return np.array([state.amplitude(x, c) for x in range(lo, hi + 1) for c in (0, 1)])

def test_identity_coin_moves_right():
    snapshots = line_walk_run(identity_coin(), LineState.localized(0, 0), 6)
    for t, state in enumerate(snapshots):
        assert state.amplitude(t, 0) == 1
        assert math.isclose(state.total_probability(), 1.0)

def test_hadamard_parity():
    snapshots = line_walk_run(hadamard_coin(), LineState.localized(0, [1, 1j]), 50)
    for t, state in enumerate(snapshots):
        wrong = state.amplitudes[(state.positions - t) % 2 == 1]
        assert np.all(wrong == 0)
        assert abs(state.total_probability() - 1.0) < 1e-12

def test_hadamard_matches_dense_operator():
    u = dense_line_step(-3, 3, hadamard_coin().matrix)
    snapshots = line_walk_run(hadamard_coin(), LineState.localized(0, 0), 2)
    vec = as_vector(snapshots[0], -3, 3)
    for state in snapshots:
        assert np.allclose(as_vector(state, -3, 3), vec, atol=1e-12)
        vec = u @ vec

def test_window_grows_by_one_each_side():
    snapshots = line_walk_run(hadamard_coin(), LineState.localized(2, 0), 3)
    assert snapshots[3].window == (-1, 5)

def test_localized_rejects_bad_coin_state():
    with pytest.raises(InputError):
        LineState.localized(0, 2)
    with pytest.raises(NormalizationError):
        LineState.localized(0, [0, 0])

def test_split_step_zero_angles_move_right():
    snapshots = split_step_run(0.0, 0.0, LineState.localized(0, 0), 5)
    for t, state in enumerate(snapshots):
        assert abs(state.amplitude(t, 0) - 1) < 1e-15

def test_split_step_matches_dense_operators():
    theta = math.pi / 2
    r = rotation_coin(theta).matrix
    first = dense_line_step(-3, 3, r, up=True, down=False)
    second = dense_line_step(-3, 3, r, up=False, down=True)
    snapshots = split_step_run(theta, theta, LineState.localized(0, 0), 2)
    vec = as_vector(snapshots[0], -3, 3)
    for state in snapshots:
        assert np.allclose(as_vector(state, -3, 3), vec, atol=1e-12)
        vec = second @ (first @ vec)

@given(
    st.floats(min_value=-math.pi, max_value=math.pi),
    st.floats(min_value=-math.pi, max_value=math.pi),
    st.integers(min_value=0, max_value=30),
)
def test_split_step_is_unitary(theta1, theta2, steps):
    final = split_step_run(theta1, theta2, LineState.localized(0, [1, 1]), steps)[-1]
    assert abs(final.total_probability() - 1.0) < 1e-12

def test_line_walks_reject_unnormalized_start():
    start = LineState(offset=0, amplitudes=np.array([[1.1, 0.0]], dtype=np.complex128))
    with pytest.raises(NormalizationError):
        line_walk_run(hadamard_coin(), start, 3)
    with pytest.raises(NormalizationError):
        split_step_run(0.3, 0.7, start, 3)

def test_line_norm_checked_every_step(monkeypatch):
    monkeypatch.setattr(walks, "_coin_apply", lambda amps, matrix: 1.1 * (amps @ matrix.T))
    with pytest.raises(NormalizationError, match="after step 1"):
        line_walk_run(hadamard_coin(), LineState.localized(0, 0), 5)
    with pytest.raises(NormalizationError, match="after step 1"):
        split_step_run(0.3, 0.7, LineState.localized(0, 0), 5)

def test_orbit_walk_norm_checked_every_step(monkeypatch):
    step = walks._tree_orbit_step

    def leaky(state):
        moved = step(state)
        return dataclasses.replace(moved, up=(tuple(2 * a for a in moved.up[0]), moved.up[1]))

    monkeypatch.setattr(walks, "_tree_orbit_step", leaky)
    with pytest.raises(NormalizationError, match="after step 1"):
        tree_orbit_walk_run(3, 5, 2)
