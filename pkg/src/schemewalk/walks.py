"""
Discrete-time quantum walks.

The Grover walk lives on the arc space of a graph: each step mixes the arcs
leaving a vertex with the Grover coin, then reverses every arc. Exact runs keep
amplitudes as `Fraction` objects; float runs use complex128.

Line walks carry a (coin-0, coin-1) amplitude pair per position over a window
that grows by one position on each side per step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Optional, Sequence

import networkx as nx
import numpy as np

from .config import SchemeWalkConfig, resolve_config
from .exceptions import InputError, NormalizationError
from .graphs import Graph
from .ifs import Stratification
from .types import Arc, ComplexMatrix, FloatMatrix
from .utils import frozen

logger = logging.getLogger(__name__)


def grover_coin(degree: int, *, exact: bool = False) -> np.ndarray:
    """Grover matrix with entries 2/degree − δ; object dtype of Fractions when exact."""
    if degree < 1:
        raise InputError(f"Grover coin needs degree >= 1, got {degree}")
    if exact:
        coin = np.full((degree, degree), Fraction(2, degree), dtype=object)
        for i in range(degree):
            coin[i, i] = Fraction(2, degree) - 1
        return coin
    return np.full((degree, degree), 2.0 / degree) - np.eye(degree)


@dataclass(frozen=True, eq=False)
class CoinSpec:
    kind: str
    matrix: ComplexMatrix
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"Coin matrix must be square, got shape {m.shape}")
        drift = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if drift > 1e-12:
            raise InputError(f"{self.kind} coin is not unitary (deviation {drift:.3e})")
        object.__setattr__(self, "matrix", frozen(np.array(m)))


def unitary_coin(a: complex, b: complex) -> CoinSpec:
    """T = [[a, −b*], [b, a*]] with |a|² + |b|² = 1."""
    a, b = complex(a), complex(b)
    weight = abs(a) ** 2 + abs(b) ** 2
    if abs(weight - 1.0) > 1e-12:
        raise InputError(f"|a|^2 + |b|^2 must equal 1, got {weight}")
    matrix = np.array([[a, -b.conjugate()], [b, a.conjugate()]], dtype=np.complex128)
    return CoinSpec("unitary2x2", matrix, {"a": a, "b": b})


def rotation_coin(theta: float) -> CoinSpec:
    c, s = math.cos(theta), math.sin(theta)
    return CoinSpec("rotation", np.array([[c, -s], [s, c]], dtype=np.complex128), {"theta": theta})


def hadamard_coin() -> CoinSpec:
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2)
    return CoinSpec("hadamard", h)


def identity_coin() -> CoinSpec:
    return CoinSpec("identity", np.eye(2, dtype=np.complex128))


def line_coin(kind: str, *, theta: float = 0.0) -> CoinSpec:
    if kind == "hadamard":
        return hadamard_coin()
    if kind == "identity":
        return identity_coin()
    if kind == "rotation":
        return rotation_coin(theta)
    if kind == "grover":
        return CoinSpec("grover", grover_coin(2).astype(np.complex128), {"degree": 2})
    raise InputError(f"Unknown line coin '{kind}', expected hadamard, identity, rotation or grover")


@dataclass(frozen=True, eq=False)
class ArcState:
    graph: Graph
    amplitudes: np.ndarray
    step: int = 0

    @property
    def exact(self) -> bool:
        return self.amplitudes.dtype == object

    def norm_squared(self):
        if self.exact:
            return sum((a * a for a in self.amplitudes), Fraction(0))
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def probabilities(self) -> np.ndarray:
        if self.exact:
            return np.array([a * a for a in self.amplitudes], dtype=object)
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, arc: Arc):
        try:
            return self.amplitudes[self.graph.arc_index[arc]]
        except KeyError:
            raise InputError(f"{arc} is not an arc of the graph")

    def nonzero(self) -> dict[Arc, Any]:
        return {arc: a for arc, a in zip(self.graph.arcs, self.amplitudes) if a != 0}

    @classmethod
    def from_arc(cls, graph: Graph, arc: Arc, *, exact: bool = True) -> ArcState:
        if arc not in graph.arc_index:
            raise InputError(f"{arc} is not an arc of the graph")
        if exact:
            amps = np.array([Fraction(0)] * len(graph.arcs), dtype=object)
            amps[graph.arc_index[arc]] = Fraction(1)
        else:
            amps = np.zeros(len(graph.arcs), dtype=np.complex128)
            amps[graph.arc_index[arc]] = 1.0
        return cls(graph, amps)

    @classmethod
    def uniform(cls, graph: Graph) -> ArcState:
        if not graph.arcs:
            raise InputError("Graph has no arcs")
        size = len(graph.arcs)
        return cls(graph, np.full(size, 1.0 / math.sqrt(size), dtype=np.complex128))

    @classmethod
    def from_amplitudes(cls, graph: Graph, values: Sequence, *, normalize: bool = False) -> ArcState:
        amps = np.asarray(values, dtype=np.complex128)
        if amps.shape != (len(graph.arcs),):
            raise InputError(f"Expected {len(graph.arcs)} arc amplitudes, got shape {amps.shape}")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise NormalizationError("Cannot normalize the zero state")
            amps = amps / norm
        return cls(graph, amps)


@dataclass(frozen=True, eq=False)
class _ArcLayout:
    sources: np.ndarray
    reverse: np.ndarray
    degrees: np.ndarray


def _layout(graph: Graph) -> _ArcLayout:
    arcs = graph.arcs
    index = graph.arc_index
    return _ArcLayout(
        sources=np.array([u for u, _ in arcs], dtype=np.int64),
        reverse=np.array([index[(v, u)] for u, v in arcs], dtype=np.int64),
        degrees=np.array(graph.degrees, dtype=np.int64),
    )


def _check_normalized(norm_sq, exact: bool, tol: float, step: int = 0) -> None:
    """Float runs may drift by `tol` per step; exact runs never."""
    state = "Initial state" if step == 0 else f"State after step {step}"
    if exact:
        if norm_sq != 1:
            raise NormalizationError(f"{state} has squared norm {norm_sq}, expected exactly 1")
    elif abs(norm_sq - 1.0) > tol * max(step, 1):
        raise NormalizationError(f"{state} has squared norm {norm_sq}, expected 1")


def _grover_step(amps: np.ndarray, layout: _ArcLayout, vertex_count: int) -> np.ndarray:
    """coined = (2/deg) * (sum over arcs at the source) − amps, then arc reversal."""
    if amps.dtype == object:
        sums = [Fraction(0)] * vertex_count
        for src, a in zip(layout.sources, amps):
            sums[src] += a
        coined = np.array(
            [Fraction(2, int(layout.degrees[src])) * sums[src] - a for src, a in zip(layout.sources, amps)],
            dtype=object,
        )
    else:
        sums = np.bincount(layout.sources, weights=amps.real, minlength=vertex_count) + 1j * np.bincount(
            layout.sources, weights=amps.imag, minlength=vertex_count
        )
        coined = (2.0 / layout.degrees[layout.sources]) * sums[layout.sources] - amps
    return coined[layout.reverse]


def grover_walk_run(
    graph: Graph,
    initial: ArcState,
    steps: int,
    *,
    config: Optional[SchemeWalkConfig] = None,
) -> list[ArcState]:
    """Snapshots U^t initial for t = 0..steps with U = S C."""
    config = resolve_config(config)
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    if initial.graph is not graph and len(initial.amplitudes) != len(graph.arcs):
        raise InputError(
            f"Initial state has {len(initial.amplitudes)} amplitudes for a graph with {len(graph.arcs)} arcs"
        )
    _check_normalized(initial.norm_squared(), initial.exact, config.unitarity_tol)

    layout = _layout(graph)
    snapshots = [ArcState(graph, initial.amplitudes, 0)]
    amps = initial.amplitudes
    for t in range(1, steps + 1):
        amps = _grover_step(amps, layout, graph.vertex_count)
        state = ArcState(graph, amps, t)
        _check_normalized(state.norm_squared(), state.exact, config.unitarity_tol, t)
        snapshots.append(state)

    logger.info(f"Grover walk on '{graph.name}' finished {steps} steps ({'exact' if initial.exact else 'float'})")
    return snapshots


def grover_walk_matrix(graph: Graph) -> FloatMatrix:
    """Dense U = S C on the arc space, rows and columns in arc order."""
    layout = _layout(graph)
    size = len(graph.arcs)
    same_source = layout.sources[:, None] == layout.sources[None, :]
    weight = 2.0 / layout.degrees[layout.sources]
    coin = np.where(same_source, weight[:, None], 0.0) - np.eye(size)
    shift = np.zeros((size, size))
    shift[np.arange(size), layout.reverse] = 1.0
    return shift @ coin


def position_distribution(state: ArcState) -> np.ndarray:
    """Probability per vertex: sum of |amplitude|^2 over arcs leaving it."""
    graph = state.graph
    probs = state.probabilities()
    if state.exact:
        dist = np.array([Fraction(0)] * graph.vertex_count, dtype=object)
        for (u, _), p in zip(graph.arcs, probs):
            dist[u] += p
        return dist
    sources = np.array([u for u, _ in graph.arcs], dtype=np.int64)
    return np.bincount(sources, weights=probs, minlength=graph.vertex_count)


def stratum_distribution(state: ArcState, strat: Stratification) -> list:
    """Probability mass per stratum of a base-vertex stratification."""
    per_vertex = position_distribution(state)
    zero = Fraction(0) if state.exact else 0.0
    return [sum((per_vertex[x] for x in stratum), zero) for stratum in strat.strata]


@dataclass(frozen=True)
class TreeOrbitState:
    """Grover walk state on a truncated regular tree, constant on the orbits
    of the stabiliser of the initial arc (0, 1).

    Side 0 holds the root's half of the tree, side 1 the half hanging from
    vertex 1. Level ℓ counts the distance from the side's endpoint; side 0
    has levels 0..depth and side 1 levels 0..depth-1. `up[s][ℓ]` is the
    amplitude on each arc from level ℓ towards the central edge (level 0 is
    the central arc itself) and `down[s][ℓ]` on each arc from level ℓ to a
    child.
    """

    degree: int
    depth: int
    up: tuple[tuple, tuple]
    down: tuple[tuple, tuple]
    step: int = 0

    @property
    def branching(self) -> int:
        return self.degree - 1

    @property
    def exact(self) -> bool:
        return isinstance(self.up[0][0], Fraction)

    def norm_squared(self):
        k1 = self.branching
        total = Fraction(0) if self.exact else 0.0
        for s in (0, 1):
            for level, a in enumerate(self.up[s]):
                total += k1**level * _abs2(a)
            for level, a in enumerate(self.down[s]):
                total += k1 ** (level + 1) * _abs2(a)
        return total

    def distance_masses(self) -> list:
        """Probability mass per distance from the root."""
        k1 = self.branching
        zero = Fraction(0) if self.exact else 0.0
        masses = [zero] * (self.depth + 1)
        for s in (0, 1):
            for level, a in enumerate(self.up[s]):
                mass = k1**level * _abs2(a)
                if level < len(self.down[s]):
                    mass += k1 ** (level + 1) * _abs2(self.down[s][level])
                masses[level + s] += mass
        return masses

    def to_arc_state(self, graph: Graph) -> ArcState:
        """Spread orbit amplitudes over the explicit tree from `regular_tree(degree, depth)`."""
        g = graph.to_networkx()
        from_root = nx.single_source_shortest_path_length(g, 0)
        from_one = nx.single_source_shortest_path_length(g, 1)

        def place(x):
            side = 1 if from_one[x] < from_root[x] else 0
            return side, (from_one[x] if side else from_root[x])

        values = []
        for u, v in graph.arcs:
            su, lu = place(u)
            sv, lv = place(v)
            towards_centre = (lu == 0 and lv == 0) or (sv == su and lv == lu - 1)
            values.append(self.up[su][lu] if towards_centre else self.down[su][lu])
        dtype = object if self.exact else np.complex128
        return ArcState(graph, np.array(values, dtype=dtype), self.step)


def _abs2(a):
    if isinstance(a, Fraction):
        return a * a
    return abs(a) ** 2


def _tree_orbit_step(state: TreeOrbitState) -> TreeOrbitState:
    k1 = state.branching
    coined_up = ([], [])
    coined_down = ([], [])
    for s in (0, 1):
        levels = len(state.up[s])
        for level in range(levels):
            up = state.up[s][level]
            leaf = level == levels - 1
            if leaf:
                coined_up[s].append(up)
                continue
            down = state.down[s][level]
            deg = 1 + k1
            if isinstance(up, Fraction):
                mix = Fraction(2, deg) * (up + k1 * down)
            else:
                mix = 2.0 * (up + k1 * down) / deg
            coined_up[s].append(mix - up)
            coined_down[s].append(mix - down)

    new_up = ([], [])
    new_down = ([], [])
    for s in (0, 1):
        levels = len(state.up[s])
        new_up[s].append(coined_up[1 - s][0])
        for level in range(levels - 1):
            new_up[s].append(coined_down[s][level])
            new_down[s].append(coined_up[s][level + 1])
    return TreeOrbitState(
        degree=state.degree,
        depth=state.depth,
        up=(tuple(new_up[0]), tuple(new_up[1])),
        down=(tuple(new_down[0]), tuple(new_down[1])),
        step=state.step + 1,
    )


def tree_orbit_initial(degree: int, depth: int, *, exact: bool = True) -> TreeOrbitState:
    """Unit amplitude on the root arc (0, 1)."""
    if degree < 2:
        raise InputError(f"Tree orbit walk needs degree >= 2, got {degree}")
    if depth < 1:
        raise InputError(f"Tree orbit walk needs depth >= 1, got {depth}")
    zero, one = (Fraction(0), Fraction(1)) if exact else (0j, 1 + 0j)
    levels = (depth + 1, depth)
    up = tuple(tuple(one if (s == 0 and level == 0) else zero for level in range(levels[s])) for s in (0, 1))
    down = tuple(tuple(zero for _ in range(levels[s] - 1)) for s in (0, 1))
    return TreeOrbitState(degree=degree, depth=depth, up=up, down=down)


def tree_orbit_walk_run(
    degree: int,
    depth: int,
    steps: int,
    *,
    exact: bool = True,
    config: Optional[SchemeWalkConfig] = None,
) -> list[TreeOrbitState]:
    """Grover walk on the truncated tree from unit amplitude on the root arc, on arc orbits."""
    config = resolve_config(config)
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    state = tree_orbit_initial(degree, depth, exact=exact)
    snapshots = [state]
    for t in range(1, steps + 1):
        state = _tree_orbit_step(state)
        _check_normalized(state.norm_squared(), exact, config.unitarity_tol, t)
        snapshots.append(state)

    logger.info(f"Tree orbit walk degree={degree} depth={depth} finished {steps} steps")
    return snapshots


@dataclass(frozen=True, eq=False)
class LineState:
    """Amplitudes[i] = (coin-0, coin-1) at position offset + i."""

    offset: int
    amplitudes: ComplexMatrix
    step: int = 0

    @property
    def window(self) -> tuple[int, int]:
        return self.offset, self.offset + len(self.amplitudes) - 1

    @cached_property
    def positions(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def total_probability(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, position: int, coin: int) -> complex:
        i = position - self.offset
        if not 0 <= i < len(self.amplitudes):
            return 0j
        return complex(self.amplitudes[i, coin])

    @classmethod
    def localized(cls, position: int = 0, coin_state: Sequence[complex] | int = 0) -> LineState:
        if isinstance(coin_state, (int, np.integer)):
            if coin_state not in (0, 1):
                raise InputError(f"coin state must be 0 or 1, got {coin_state}")
            vec = np.zeros(2, dtype=np.complex128)
            vec[coin_state] = 1.0
        else:
            vec = np.asarray(coin_state, dtype=np.complex128)
            if vec.shape != (2,):
                raise InputError(f"coin state must have two components, got shape {vec.shape}")
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise NormalizationError("coin state is zero")
            vec = vec / norm
        return cls(offset=position, amplitudes=vec[None, :])


def _conditional_shift(amps: np.ndarray, offset: int, *, up: bool, down: bool) -> tuple[np.ndarray, int]:
    """Move coin-0 by +1 (when `up`) and coin-1 by −1 (when `down`)."""
    size = len(amps)
    grow_left = 1 if down else 0
    shifted = np.zeros((size + grow_left + (1 if up else 0), 2), dtype=np.complex128)
    start0 = grow_left + (1 if up else 0)
    start1 = grow_left - (1 if down else 0)
    shifted[start0 : start0 + size, 0] = amps[:, 0]
    shifted[start1 : start1 + size, 1] = amps[:, 1]
    return shifted, offset - grow_left


def _coin_apply(amps: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    return amps @ matrix.T


def _check_line_norm(state: LineState, tol: float) -> None:
    _check_normalized(state.total_probability(), False, tol, state.step)


def line_walk_run(
    coin: CoinSpec,
    initial: LineState,
    steps: int,
    *,
    config: Optional[SchemeWalkConfig] = None,
) -> list[LineState]:
    """Each step applies the coin, then coin-0 moves +1 and coin-1 moves −1."""
    config = resolve_config(config)
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    if coin.matrix.shape != (2, 2):
        raise InputError(f"Line walk needs a 2x2 coin, got shape {coin.matrix.shape}")
    _check_line_norm(initial, config.unitarity_tol)

    snapshots = [initial]
    amps, offset = initial.amplitudes, initial.offset
    for t in range(1, steps + 1):
        amps, offset = _conditional_shift(_coin_apply(amps, coin.matrix), offset, up=True, down=True)
        state = LineState(offset, amps, t)
        _check_line_norm(state, config.unitarity_tol)
        snapshots.append(state)
    logger.debug(f"Line walk ({coin.kind}) finished {steps} steps, window {snapshots[-1].window}")
    return snapshots


def split_step_run(
    theta1: float,
    theta2: float,
    initial: LineState,
    steps: int,
    *,
    config: Optional[SchemeWalkConfig] = None,
) -> list[LineState]:
    """One step is R(θ1), up-shift of coin-0, R(θ2), down-shift of coin-1."""
    config = resolve_config(config)
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    _check_line_norm(initial, config.unitarity_tol)
    r1 = rotation_coin(theta1).matrix
    r2 = rotation_coin(theta2).matrix

    snapshots = [initial]
    amps, offset = initial.amplitudes, initial.offset
    for t in range(1, steps + 1):
        amps, offset = _conditional_shift(_coin_apply(amps, r1), offset, up=True, down=False)
        amps, offset = _conditional_shift(_coin_apply(amps, r2), offset, up=False, down=True)
        state = LineState(offset, amps, t)
        _check_line_norm(state, config.unitarity_tol)
        snapshots.append(state)
    logger.debug(f"Split-step walk θ1={theta1} θ2={theta2} finished {steps} steps")
    return snapshots
