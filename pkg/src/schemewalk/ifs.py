"""
Interacting Fock spaces attached to a graph.

A graph is stratified by distance from a base vertex; the adjacency matrix
then splits into raising, lowering and diagonal parts, and its action on the
normalised strata vectors is a Jacobi (tri-diagonal) matrix whenever the
graph looks distance-regular from the base.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import networkx as nx
import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial

from .config import SchemeWalkConfig, resolve_config
from .exceptions import (
    InputError,
    MomentOverflowError,
    NotCommutativeError,
    TridiagonalityError,
)
from .graphs import Graph
from .scheme_core import AssociationScheme, IntersectionTensor, is_distance_ordered
from .types import FloatMatrix, IntMatrix
from .utils import frozen

logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1


@dataclass(frozen=True, eq=False)
class Stratification:
    vertex_count: int
    base: int
    strata: tuple[tuple[int, ...], ...]
    unreachable: tuple[int, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.strata) - 1

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strata)

    @cached_property
    def stratum_of(self) -> IntMatrix:
        """Stratum index per vertex, -1 for vertices not reachable from the base."""
        layer = np.full(self.vertex_count, -1, dtype=np.int64)
        for n, stratum in enumerate(self.strata):
            layer[list(stratum)] = n
        return frozen(layer)

    @cached_property
    def strata_vectors(self) -> FloatMatrix:
        """Row n is Φ_n = |V_n|^{-1/2} sum of δ_x over V_n."""
        phi = np.zeros((len(self.strata), self.vertex_count))
        for n, stratum in enumerate(self.strata):
            phi[n, list(stratum)] = 1.0 / math.sqrt(len(stratum))
        return frozen(phi)


@dataclass(frozen=True, eq=False)
class QuantumDecomposition:
    raising: IntMatrix
    lowering: IntMatrix
    diagonal: IntMatrix
    residual: IntMatrix


@dataclass(frozen=True)
class JacobiSequences:
    """ω_1..ω_{D-1} and α_1..α_D.

    `terminated` marks sequences that describe the whole space (a finite graph
    or a distance-ordered scheme), so the Jacobi matrix is exact at every power.
    `leakage` holds the per-stratum distance from tri-diagonal action.
    """

    omega: tuple[float, ...]
    alpha: tuple[float, ...]
    terminated: bool = False
    leakage: tuple[float, ...] = ()
    projected: bool = False

    def __post_init__(self):
        if any(w < 0 for w in self.omega):
            raise InputError(f"Jacobi sequence has a negative omega: {list(self.omega)}")
        zero_at = next((n for n, w in enumerate(self.omega) if w == 0), None)
        if zero_at is not None and any(w != 0 for w in self.omega[zero_at:]):
            raise InputError(f"omega vanishes at n={zero_at + 1} but not afterwards: {list(self.omega)}")

    @property
    def depth(self) -> int:
        return len(self.alpha)

    def to_payload(self) -> dict:
        return {"omega": list(self.omega), "alpha": list(self.alpha)}


@dataclass(frozen=True, eq=False)
class CAPFamily:
    """Creation, annihilation and preservation parts of every class matrix.

    Index j of each tuple is class A_j; `residuals[j]` holds the parts of A_j
    jumping two or more strata and `shift_residuals[j]` their Frobenius norms
    per shift.
    """

    base: int
    strata: tuple[tuple[int, ...], ...]
    raising: tuple[IntMatrix, ...]
    lowering: tuple[IntMatrix, ...]
    preserving: tuple[IntMatrix, ...]
    residuals: tuple[IntMatrix, ...]
    shift_residuals: tuple[dict[int, float], ...] = field(default_factory=tuple)

    def max_residual(self, j: int) -> float:
        return max(self.shift_residuals[j].values(), default=0.0)


def stratify(graph: Graph, base: int) -> Stratification:
    if graph.vertex_count < 1:
        raise InputError("Cannot stratify an empty graph")
    if not 0 <= base < graph.vertex_count:
        raise InputError(f"Base vertex {base} out of range for {graph.vertex_count} vertices")

    layers = [tuple(sorted(layer)) for layer in nx.bfs_layers(graph.to_networkx(), [base])]
    reached = {x for layer in layers for x in layer}
    unreachable = tuple(x for x in range(graph.vertex_count) if x not in reached)
    if unreachable:
        logger.warning(f"{len(unreachable)} vertices unreachable from base {base} are excluded")

    return Stratification(
        vertex_count=graph.vertex_count,
        base=base,
        strata=tuple(layers),
        unreachable=unreachable,
    )


def _check_matches(graph: Graph, strat: Stratification) -> None:
    if strat.vertex_count != graph.vertex_count:
        raise InputError(
            f"Stratification covers {strat.vertex_count} vertices but the graph has {graph.vertex_count}"
        )


def quantum_decompose(graph: Graph, strat: Stratification) -> QuantumDecomposition:
    """Split A entrywise by the stratum difference of its row and column.

    B⁺[x][y] = A[x][y] when x sits one stratum above y.
    """
    _check_matches(graph, strat)
    a = graph.adjacency
    layer = strat.stratum_of
    reached = layer >= 0
    both = reached[:, None] & reached[None, :]
    diff = layer[:, None] - layer[None, :]

    raising = np.where(both & (diff == 1), a, 0)
    lowering = np.where(both & (diff == -1), a, 0)
    diagonal = np.where(both & (diff == 0), a, 0)
    residual = a - raising - lowering - diagonal
    if np.any(residual[both]):
        logger.warning(f"Stratification from base {strat.base} has edges skipping strata")

    return QuantumDecomposition(
        raising=frozen(raising.astype(np.int64)),
        lowering=frozen(lowering.astype(np.int64)),
        diagonal=frozen(diagonal.astype(np.int64)),
        residual=frozen(residual.astype(np.int64)),
    )


def _reported_strata(graph: Graph, strat: Stratification) -> int:
    if graph.truncation_depth is None:
        return len(strat.strata)
    return max(1, min(len(strat.strata), graph.truncation_depth))


def jacobi_coefficients(
    graph: Graph,
    strat: Stratification,
    *,
    config: Optional[SchemeWalkConfig] = None,
) -> JacobiSequences:
    """Read ω and α off the action of A on the strata vectors.

    Truncated graphs report only the strata below the truncation. Raises
    TridiagonalityError when AΦ_n leaves span{Φ_{n-1}, Φ_n, Φ_{n+1}} unless
    the config forces a projection.
    """
    config = resolve_config(config)
    _check_matches(graph, strat)

    phi = strat.strata_vectors
    a_phi = phi @ graph.adjacency.astype(np.float64)  # row n is (AΦ_n)^T, A symmetric
    gram = a_phi @ phi.T  # gram[n][m] = <Φ_m, AΦ_n>
    count = _reported_strata(graph, strat)

    alpha = []
    omega = []
    leakage = []
    for n in range(count):
        near = [m for m in (n - 1, n, n + 1) if 0 <= m < len(strat.strata)]
        projected = sum(gram[n, m] * phi[m] for m in near)
        leak = float(np.linalg.norm(a_phi[n] - projected))
        leakage.append(leak)
        if leak > config.tridiagonal_tol and not config.force_projection:
            raise TridiagonalityError(
                f"A Φ_{n} leaves the neighbouring strata (leakage {leak:.3e}); "
                f"graph is not distance-regular around base {strat.base}",
                stratum=n,
                leakage=leak,
            )
        alpha.append(float(gram[n, n]))
        if n + 1 < count:
            omega.append(float(gram[n, n + 1] ** 2))

    if config.force_projection and max(leakage) > config.tridiagonal_tol:
        logger.warning(f"Projected onto tri-diagonal form, max leakage {max(leakage):.3e}")

    logger.info(f"Jacobi data from base {strat.base}: omega={omega} alpha={alpha}")
    return JacobiSequences(
        omega=tuple(omega),
        alpha=tuple(alpha),
        terminated=graph.truncation_depth is None,
        leakage=tuple(leakage),
        projected=config.force_projection,
    )


def jacobi_from_intersection_numbers(tensor: IntersectionTensor) -> JacobiSequences:
    """ω_{n+1} = p^n_{1,n+1} p^{n+1}_{1,n} and α_{n+1} = p^n_{1,n} for a distance-ordered scheme."""
    if not is_distance_ordered(tensor):
        raise InputError("Classes are not in distance order: A_1 does not step one class at a time")
    p = tensor.p
    d = tensor.num_classes
    omega = tuple(float(p[n, 1, n + 1] * p[n + 1, 1, n]) for n in range(d))
    alpha = tuple(float(p[n, 1, n]) for n in range(d + 1))
    return JacobiSequences(omega=omega, alpha=alpha, terminated=True)


def bosonic_sequences(depth: int) -> JacobiSequences:
    if depth < 1:
        raise InputError(f"depth must be positive, got {depth}")
    return JacobiSequences(omega=tuple(float(n) for n in range(1, depth)), alpha=(0.0,) * depth)


def fermionic_sequences(depth: int) -> JacobiSequences:
    if depth < 1:
        raise InputError(f"depth must be positive, got {depth}")
    omega = tuple(1.0 if n == 1 else 0.0 for n in range(1, depth))
    return JacobiSequences(omega=omega, alpha=(0.0,) * depth)


def tridiagonal_from_jacobi(jac: JacobiSequences, depth: int) -> FloatMatrix:
    if not 1 <= depth <= jac.depth:
        raise InputError(f"depth must lie in [1, {jac.depth}], got {depth}")
    if len(jac.omega) < depth - 1:
        raise InputError(f"Need {depth - 1} omega values, have {len(jac.omega)}")
    if any(w < 0 for w in jac.omega[: depth - 1]):
        raise InputError("omega must be non-negative")
    off = np.sqrt(np.asarray(jac.omega[: depth - 1], dtype=np.float64))
    return np.diag(np.asarray(jac.alpha[:depth], dtype=np.float64)) + np.diag(off, 1) + np.diag(off, -1)


def orthogonal_polynomials(jac: JacobiSequences, n: int) -> list[Polynomial]:
    """Monic P_0..P_n with x P_k = P_{k+1} + α_{k+1} P_k + ω_k P_{k-1}."""
    if not 0 <= n <= jac.depth:
        raise InputError(f"n must lie in [0, {jac.depth}], got {n}")
    x = Polynomial([0.0, 1.0])
    polys = [Polynomial([1.0])]
    for k in range(n):
        nxt = (x - jac.alpha[k]) * polys[k]
        if k > 0:
            nxt = nxt - jac.omega[k - 1] * polys[k - 1]
        polys.append(nxt)
    return polys


def spectral_measure(jac: JacobiSequences) -> tuple[np.ndarray, np.ndarray]:
    """Atoms and weights of the vacuum spectral measure of the finite Jacobi matrix."""
    depth = min(jac.depth, len(jac.omega) + 1)
    off = np.sqrt(np.asarray(jac.omega[: depth - 1], dtype=np.float64))
    atoms, vectors = scipy.linalg.eigh_tridiagonal(np.asarray(jac.alpha[:depth], dtype=np.float64), off)
    weights = vectors[0] ** 2
    return atoms, weights


def vacuum_moments(graph: Graph, base: int, m_max: int) -> list[int]:
    """Closed walk counts <δ_base, A^m δ_base> for m = 0..m_max in exact integers.

    Raises MomentOverflowError carrying the exact prefix once a moment
    exceeds the signed 64-bit range.
    """
    if m_max < 0:
        raise InputError(f"m_max must be non-negative, got {m_max}")
    if not 0 <= base < graph.vertex_count:
        raise InputError(f"Base vertex {base} out of range for {graph.vertex_count} vertices")

    a = graph.adjacency.astype(object)
    walk = np.zeros(graph.vertex_count, dtype=object)
    walk[base] = 1
    moments: list[int] = []
    for m in range(m_max + 1):
        value = int(walk[base])
        if value > INT64_MAX:
            raise MomentOverflowError(
                f"Moment m={m} exceeds 64-bit range; {len(moments)} exact moments computed",
                moments=moments,
                overflow_at=m,
            )
        moments.append(value)
        walk = a.dot(walk)
    logger.debug(f"Vacuum moments at base {base}: {moments}")
    return moments


def moments_from_jacobi(jac: JacobiSequences, m_max: int) -> list[float]:
    """Moments as the top-left entry of T^m."""
    if m_max < 0:
        raise InputError(f"m_max must be non-negative, got {m_max}")
    finite = jac.terminated or 0.0 in jac.omega
    if not finite and jac.depth <= m_max / 2:
        raise InputError(
            f"Jacobi data of depth {jac.depth} cannot determine moments up to m={m_max}; "
            f"need depth > {m_max / 2}"
        )
    depth = min(jac.depth, len(jac.omega) + 1)
    t = tridiagonal_from_jacobi(jac, depth)
    vec = np.zeros(depth)
    vec[0] = 1.0
    moments = []
    for _ in range(m_max + 1):
        moments.append(float(vec[0]))
        vec = t @ vec
    return moments


def cap_operators(scheme: AssociationScheme, base: int) -> CAPFamily:
    """Split every A_j by strata shift, with V_n = {x : (base, x) in class n}.

    For non-symmetric classes the lowering part of A_j is the transpose of
    the raising part of A_j^T.
    """
    if not scheme.commutative:
        raise NotCommutativeError("CAP operators need a commutative scheme")
    if not 0 <= base < scheme.vertex_count:
        raise InputError(f"Base vertex {base} out of range for {scheme.vertex_count} vertices")

    layer = scheme.relation_matrix[base]
    size = len(scheme.classes)
    strata = tuple(tuple(int(x) for x in np.nonzero(layer == n)[0]) for n in range(size))
    diff = layer[:, None] - layer[None, :]

    raising, lowering, preserving, residuals, norms = [], [], [], [], []
    for a in scheme.classes:
        raising.append(frozen(np.where(diff == 1, a, 0)))
        lowering.append(frozen(np.where(diff == -1, a, 0)))
        preserving.append(frozen(np.where(diff == 0, a, 0)))
        residual = np.where(np.abs(diff) >= 2, a, 0)
        residuals.append(frozen(residual))
        per_shift = {}
        for s in range(-(size - 1), size):
            if abs(s) >= 2:
                per_shift[s] = float(np.linalg.norm(np.where(diff == s, a, 0)))
        norms.append(per_shift)

    return CAPFamily(
        base=base,
        strata=strata,
        raising=tuple(raising),
        lowering=tuple(lowering),
        preserving=tuple(preserving),
        residuals=tuple(residuals),
        shift_residuals=tuple(norms),
    )
