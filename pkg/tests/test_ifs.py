import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from schemewalk import (
    InputError,
    JacobiSequences,
    MomentOverflowError,
    NotCommutativeError,
    SchemeWalkConfig,
    TridiagonalityError,
    bosonic_sequences,
    build_complete_scheme,
    build_distance_scheme,
    build_group_scheme,
    build_johnson,
    cap_operators,
    complete_graph,
    cycle_graph,
    fermionic_sequences,
    graph_from_edges,
    intersection_numbers,
    jacobi_coefficients,
    jacobi_from_intersection_numbers,
    moments_from_jacobi,
    orthogonal_polynomials,
    path_graph,
    quantum_decompose,
    regular_tree,
    spectral_measure,
    stratify,
    symmetric_group_table,
    tridiagonal_from_jacobi,
    vacuum_moments,
)

def irregular_tree():
    return graph_from_edges(4, [(0, 1), (0, 2), (1, 3)])


# Stratification

def test_two_node_path_strata():
    strat = stratify(path_graph(2), 0)
    assert strat.strata == ((0,), (1,))

def test_single_vertex_one_stratum():
    strat = stratify(graph_from_edges(1, []), 0)
    assert strat.strata == ((0,),)
    assert strat.depth == 0

def test_tree_strata_sizes():
    strat = stratify(regular_tree(3, 3), 0)
    assert strat.sizes == (1, 3, 6, 12)

def test_unreachable_vertices_are_excluded():
    strat = stratify(graph_from_edges(3, [(0, 1)]), 0)
    assert strat.unreachable == (2,)
    assert strat.stratum_of.tolist() == [0, 1, -1]

def test_base_out_of_range():
    with pytest.raises(InputError):
        stratify(path_graph(2), 5)

def test_strata_vectors_are_orthonormal():
    phi = stratify(cycle_graph(6), 0).strata_vectors
    assert np.allclose(phi @ phi.T, np.eye(4))


# Quantum decomposition

def test_two_node_path_decomposition():
    g = path_graph(2)
    qd = quantum_decompose(g, stratify(g, 0))
    assert qd.raising.tolist() == [[0, 0], [1, 0]]
    assert qd.lowering.tolist() == [[0, 1], [0, 0]]
    assert not qd.diagonal.any()

def test_triangle_has_preserving_part():
    g = complete_graph(3)
    qd = quantum_decompose(g, stratify(g, 0))
    assert qd.diagonal[1, 2] == 1
    assert qd.diagonal[2, 1] == 1

def test_tree_has_no_diagonal_or_residual():
    g = regular_tree(3, 3)
    qd = quantum_decompose(g, stratify(g, 0))
    assert not qd.diagonal.any()
    assert not qd.residual.any()
    assert np.array_equal(qd.raising + qd.lowering, g.adjacency)

def test_lowering_is_transpose_of_raising():
    g = cycle_graph(7)
    qd = quantum_decompose(g, stratify(g, 3))
    assert np.array_equal(qd.lowering, qd.raising.T)


# Jacobi coefficients

def test_two_node_path_jacobi():
    g = path_graph(2)
    jac = jacobi_coefficients(g, stratify(g, 0))
    assert jac.omega == (1.0,)
    assert jac.alpha == (0.0, 0.0)
    assert jac.terminated

def test_tree_jacobi_below_truncation():
    g = regular_tree(3, 5)
    jac = jacobi_coefficients(g, stratify(g, 0))
    assert np.allclose(jac.omega, [3, 2, 2, 2])
    assert np.allclose(jac.alpha, 0)
    assert not jac.terminated

@pytest.mark.parametrize("n", [3, 4, 6])
def test_complete_graph_jacobi(n):
    g = complete_graph(n)
    jac = jacobi_coefficients(g, stratify(g, 0))
    assert jac.depth == 2
    assert math.isclose(jac.omega[0], n - 1)
    assert math.isclose(jac.alpha[1], n - 2)

def test_irregular_tree_is_not_tridiagonal():
    g = irregular_tree()
    with pytest.raises(TridiagonalityError) as excinfo:
        jacobi_coefficients(g, stratify(g, 0))
    assert excinfo.value.stratum == 2
    assert math.isclose(excinfo.value.leakage, 1 / math.sqrt(2))

def test_forced_projection_reports_leakage():
    g = irregular_tree()
    config = SchemeWalkConfig().with_force_projection(True)
    jac = jacobi_coefficients(g, stratify(g, 0), config=config)
    assert jac.projected
    assert math.isclose(jac.leakage[2], 1 / math.sqrt(2))
    assert jac.leakage[0] < 1e-12

def test_scheme_jacobi_matches_graph_jacobi():
    g = cycle_graph(6)
    from_graph = jacobi_coefficients(g, stratify(g, 0))
    from_scheme = jacobi_from_intersection_numbers(intersection_numbers(build_distance_scheme(g)))
    assert np.allclose(from_graph.omega, from_scheme.omega, atol=1e-10)
    assert np.allclose(from_graph.alpha, from_scheme.alpha, atol=1e-10)
    assert from_scheme.omega == (2.0, 1.0, 2.0)

def test_scheme_jacobi_for_johnson():
    jac = jacobi_from_intersection_numbers(intersection_numbers(build_johnson(5, 2)))
    assert jac.omega == (6.0, 8.0)
    assert jac.alpha == (0.0, 3.0, 2.0)

def test_scheme_jacobi_needs_distance_order():
    tensor = intersection_numbers(build_group_scheme(symmetric_group_table(3), orbit_mode="trivial"))
    with pytest.raises(InputError):
        jacobi_from_intersection_numbers(tensor)

def test_jacobi_sequences_validation():
    with pytest.raises(InputError):
        JacobiSequences(omega=(1.0, -1.0), alpha=(0.0, 0.0, 0.0))
    with pytest.raises(InputError):
        JacobiSequences(omega=(1.0, 0.0, 2.0), alpha=(0.0,) * 4)


# Tridiagonal matrices and polynomials

def test_bosonic_tridiagonal():
    t = tridiagonal_from_jacobi(bosonic_sequences(3), 3)
    assert np.allclose(np.diag(t, 1), [1, math.sqrt(2)])
    assert np.allclose(t, t.T)
    assert np.allclose(np.diag(t), 0)

def test_fermionic_tridiagonal():
    t = tridiagonal_from_jacobi(fermionic_sequences(3), 3)
    assert np.allclose(np.diag(t, 1), [1, 0])

def test_zero_sequences_give_zero_matrix():
    jac = JacobiSequences(omega=(0.0, 0.0), alpha=(0.0, 0.0, 0.0))
    assert not tridiagonal_from_jacobi(jac, 3).any()

def test_tridiagonal_depth_out_of_range():
    with pytest.raises(InputError):
        tridiagonal_from_jacobi(bosonic_sequences(3), 4)

def test_bosonic_polynomials_are_hermite():
    polys = orthogonal_polynomials(bosonic_sequences(4), 3)
    assert np.allclose(polys[2].coef, [-1, 0, 1])
    assert np.allclose(polys[3].coef, [0, -3, 0, 1])

def test_polynomial_roots_are_jacobi_eigenvalues():
    jac = bosonic_sequences(5)
    roots = np.sort(orthogonal_polynomials(jac, 5)[5].roots().real)
    eig = np.linalg.eigvalsh(tridiagonal_from_jacobi(jac, 5))
    assert np.allclose(roots, eig, atol=1e-8)

def test_spectral_measure_reproduces_moments():
    jac = bosonic_sequences(6)
    atoms, weights = spectral_measure(jac)
    assert math.isclose(weights.sum(), 1.0)
    moments = moments_from_jacobi(jac, 6)
    for m in range(7):
        assert math.isclose(float(np.sum(weights * atoms**m)), moments[m], abs_tol=1e-9)

def test_two_node_spectral_measure_is_bernoulli():
    g = path_graph(2)
    atoms, weights = spectral_measure(jacobi_coefficients(g, stratify(g, 0)))
    assert np.allclose(atoms, [-1, 1])
    assert np.allclose(weights, [0.5, 0.5])


# Moments

def test_two_node_path_moments():
    assert vacuum_moments(path_graph(2), 0, 20) == [1 if m % 2 == 0 else 0 for m in range(21)]

def test_single_vertex_moments():
    assert vacuum_moments(graph_from_edges(1, []), 0, 3) == [1, 0, 0, 0]

def test_tree_moments():
    assert vacuum_moments(regular_tree(3, 3), 0, 6) == [1, 0, 3, 0, 15, 0, 87]

def test_bernoulli_jacobi_moments():
    g = path_graph(2)
    moments = moments_from_jacobi(jacobi_coefficients(g, stratify(g, 0)), 20)
    assert moments == [1.0 if m % 2 == 0 else 0.0 for m in range(21)]

def test_bosonic_moments_are_gaussian():
    assert np.allclose(moments_from_jacobi(bosonic_sequences(3), 4), [1, 0, 1, 0, 3])

def test_tree_jacobi_moments_match_walk_counts():
    g = regular_tree(3, 6)
    jac = jacobi_coefficients(g, stratify(g, 0))
    assert np.allclose(moments_from_jacobi(jac, 10), vacuum_moments(g, 0, 10))

def test_truncated_jacobi_cannot_reach_high_moments():
    g = regular_tree(3, 3)
    jac = jacobi_coefficients(g, stratify(g, 0))
    with pytest.raises(InputError):
        moments_from_jacobi(jac, 10)

def test_moment_overflow_keeps_exact_prefix():
    n = 30
    with pytest.raises(MomentOverflowError) as excinfo:
        vacuum_moments(complete_graph(n), 0, 20)
    err = excinfo.value
    assert err.overflow_at == len(err.moments)
    for m, value in enumerate(err.moments):
        assert value == ((n - 1) ** m + (n - 1) * (-1) ** m) // n

@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=12))
def test_path_moments_match_jacobi(n, m_max):
    g = path_graph(n)
    jac = jacobi_coefficients(g, stratify(g, 0))
    assert np.allclose(moments_from_jacobi(jac, m_max), vacuum_moments(g, 0, m_max))

@given(st.integers(min_value=3, max_value=12), st.integers(min_value=0, max_value=11))
def test_cycle_moments_match_jacobi(n, base):
    g = cycle_graph(n)
    base = base % n
    jac = jacobi_coefficients(g, stratify(g, base))
    assert np.allclose(moments_from_jacobi(jac, 10), vacuum_moments(g, base, 10))


# CAP operators

def test_complete_scheme_creation():
    n = 5
    cap = cap_operators(build_complete_scheme(n), 0)
    vacuum = np.zeros(n)
    vacuum[0] = 1.0
    phi_1 = np.array([0.0] + [1.0] * (n - 1)) / math.sqrt(n - 1)
    assert np.allclose(cap.raising[1] @ vacuum, math.sqrt(n - 1) * phi_1)
    assert cap.max_residual(1) == 0.0

def test_identity_class_is_pure_preservation():
    cap = cap_operators(build_johnson(5, 2), 3)
    assert np.array_equal(cap.preserving[0], np.eye(10, dtype=int))
    assert not cap.raising[0].any()
    assert not cap.lowering[0].any()

def test_hexagon_parts_reassemble():
    scheme = build_distance_scheme(cycle_graph(6))
    cap = cap_operators(scheme, 0)
    for j, a in enumerate(scheme.classes):
        total = cap.raising[j] + cap.lowering[j] + cap.preserving[j] + cap.residuals[j]
        assert np.array_equal(total, a)
    assert cap.max_residual(1) == 0.0
    assert cap.max_residual(2) > 0.0
    assert cap.preserving[2].any()

def test_cap_needs_commutative_scheme():
    scheme = build_group_scheme(symmetric_group_table(3), orbit_mode="trivial")
    with pytest.raises(NotCommutativeError):
        cap_operators(scheme, 0)
