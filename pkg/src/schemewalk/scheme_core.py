"""
Association schemes and their Bose-Mesner algebras.

Everything in the adjacency basis (class matrices, intersection numbers,
axiom checks) is exact int64 arithmetic. Floating point enters only with the
primitive idempotents and the Krein parameters.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Any, Optional, Sequence

import networkx as nx
import numpy as np
import scipy.linalg

from .config import SchemeWalkConfig, resolve_config
from .exceptions import (
    EigenspaceSeparationError,
    InputError,
    IntegerOverflowError,
    NotCommutativeError,
    SchemeAxiomError,
    VertexCapExceeded,
)
from .finite_field import enumerate_subspaces, intersection_dimension
from .graphs import Graph
from .reports import AxiomCheck, VerificationReport
from .types import IntMatrix
from .utils import as_binary_matrix, frozen, gaussian_binomial, integrality_deviation

logger = logging.getLogger(__name__)

INT64_LIMIT = int(np.iinfo(np.int64).max)

AXIOMS = ("identity", "partition", "transpose", "closure", "commutativity")


@dataclass(frozen=True, eq=False)
class AssociationScheme:
    vertex_count: int
    classes: tuple[IntMatrix, ...]
    valencies: tuple[int, ...]
    commutative: bool
    family: str = "custom"
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        """d, the number of non-identity classes."""
        return len(self.classes) - 1

    @cached_property
    def relation_matrix(self) -> IntMatrix:
        """R[x][y] = index of the class containing (x, y)."""
        rel = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for j, a in enumerate(self.classes):
            rel[a == 1] = j
        return frozen(rel)

    @cached_property
    def transpose_map(self) -> tuple[int, ...]:
        """j -> j' with A_j^T = A_j'."""
        return tuple(_find_class(self.classes, a.T) for a in self.classes)

    def relation(self, x: int, y: int) -> int:
        return int(self.relation_matrix[x, y])


@dataclass(frozen=True, eq=False)
class IntersectionTensor:
    """p[k][i][j] = p^k_ij, so that A_i A_j = sum_k p[k][i][j] A_k."""

    p: IntMatrix

    @property
    def num_classes(self) -> int:
        return self.p.shape[0] - 1


@dataclass(frozen=True, eq=False)
class BoseMesnerSpectral:
    vertex_count: int
    idempotents: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]
    eigenmatrix_P: np.ndarray
    dual_eigenmatrix_Q: np.ndarray
    seed: int = 0
    attempt: int = 0


@dataclass(frozen=True, eq=False)
class KreinTensor:
    """q[k][i][j] = q^k_ij, so that E_i ∘ E_j = (1/|X|) sum_k q[k][i][j] E_k.

    Values are kept raw; `rounded` and `integral_mask` are the companion
    integrality view.
    """

    q: np.ndarray
    multiplicities: tuple[int, ...] = ()
    integrality_tol: float = 1e-6
    zero_tol: float = 1e-9

    @cached_property
    def rounded(self) -> IntMatrix:
        return frozen(np.rint(self.q).astype(np.int64))

    @cached_property
    def integral_mask(self) -> np.ndarray:
        return frozen(integrality_deviation(self.q) <= self.integrality_tol)

    @property
    def min_entry(self) -> float:
        return float(self.q.min())

    @property
    def satisfies_krein_condition(self) -> bool:
        return self.min_entry >= -self.zero_tol


def _find_class(classes: Sequence[np.ndarray], target: np.ndarray) -> int:
    for j, a in enumerate(classes):
        if np.array_equal(a, target):
            return j
    return -1


def _coerce_classes(candidate) -> list[IntMatrix]:
    if len(candidate) == 0:
        raise InputError("A scheme needs at least one class matrix")
    classes = [as_binary_matrix(a, f"class {j}") for j, a in enumerate(candidate)]
    n = classes[0].shape[0]
    for j, a in enumerate(classes):
        if a.shape != (n, n):
            raise InputError(f"class {j} has shape {a.shape}, expected {(n, n)}")
    if n == 0:
        raise InputError("Class matrices must have at least one vertex")
    return classes


def _read_structure_constants(classes: Sequence[IntMatrix]) -> tuple[IntMatrix, Optional[tuple]]:
    """Read p^k_ij off one representative entry of each A_k, then confirm the full identity.

    Returns the tensor and the first failing (i, j, (x, y)) witness, if any.
    """
    size = len(classes)
    reps = []
    for a in classes:
        nz = np.argwhere(a == 1)
        reps.append(tuple(int(v) for v in nz[0]) if nz.size else None)

    p = np.zeros((size, size, size), dtype=np.int64)
    witness = None
    for i, a_i in enumerate(classes):
        for j, a_j in enumerate(classes):
            product = a_i @ a_j
            combo = np.zeros_like(product)
            for k, a_k in enumerate(classes):
                if reps[k] is None:
                    continue
                coeff = product[reps[k]]
                p[k, i, j] = coeff
                combo += coeff * a_k
            if witness is None and not np.array_equal(product, combo):
                x, y = (int(v) for v in np.argwhere(product != combo)[0])
                witness = (i, j, (x, y))
    return p, witness


def verify_scheme(candidate: Sequence) -> VerificationReport:
    """Check axioms (1)-(5) on a list of 0/1 class matrices.

    Axioms 1-4 decide the verdict; commutativity is reported as a flag.
    """
    classes = _coerce_classes(candidate)
    n = classes[0].shape[0]
    checks = []

    identity = np.eye(n, dtype=np.int64)
    if np.array_equal(classes[0], identity):
        checks.append(AxiomCheck("identity", True))
    else:
        x, y = (int(v) for v in np.argwhere(classes[0] != identity)[0])
        checks.append(AxiomCheck("identity", False, (0, 0, (x, y)), "A_0 differs from I"))

    total = np.sum(classes, axis=0)
    if np.all(total == 1):
        checks.append(AxiomCheck("partition", True))
    else:
        x, y = (int(v) for v in np.argwhere(total != 1)[0])
        checks.append(AxiomCheck(
            "partition", False, (-1, -1, (x, y)),
            f"entry ({x}, {y}) is covered {int(total[x, y])} times",
        ))

    missing = [j for j, a in enumerate(classes) if _find_class(classes, a.T) < 0]
    if missing:
        j = missing[0]
        checks.append(AxiomCheck("transpose", False, (j, j, None), f"A_{j}^T is not a class"))
    else:
        checks.append(AxiomCheck("transpose", True))

    _, witness = _read_structure_constants(classes)
    if witness is None:
        checks.append(AxiomCheck("closure", True))
    else:
        i, j, xy = witness
        checks.append(AxiomCheck(
            "closure", False, witness,
            f"A_{i} A_{j} differs from the span combination at {xy}",
        ))

    commute_witness = None
    for i, j in combinations(range(len(classes)), 2):
        if not np.array_equal(classes[i] @ classes[j], classes[j] @ classes[i]):
            diff = np.argwhere(classes[i] @ classes[j] != classes[j] @ classes[i])[0]
            commute_witness = (i, j, tuple(int(v) for v in diff))
            break
    commutative = commute_witness is None
    checks.append(AxiomCheck(
        "commutativity", commutative, commute_witness,
        "" if commutative else "classes do not commute",
    ))

    report = VerificationReport(
        checks=tuple(checks),
        informational=frozenset({"commutativity"}),
        extras={"commutative": commutative, "num_classes": len(classes) - 1, "vertex_count": n},
    )
    if not report.passed:
        logger.warning(f"Scheme verification failed: {[c.name for c in report.failures()]}")
    return report


def scheme_from_classes(
    classes: Sequence,
    *,
    family: str = "custom",
    params: Optional[dict[str, Any]] = None,
) -> AssociationScheme:
    """Verify and wrap a list of class matrices, raising SchemeAxiomError on failure."""
    coerced = _coerce_classes(classes)
    report = verify_scheme(coerced)
    if not report.passed:
        failed = report.failures()[0]
        raise SchemeAxiomError(f"Axiom '{failed.name}' fails: {failed.detail} (witness {failed.witness})")

    valencies = []
    for j, a in enumerate(coerced):
        rows = a.sum(axis=1)
        if not np.all(rows == rows[0]):
            raise SchemeAxiomError(f"A_{j} does not have constant row sum")
        valencies.append(int(rows[0]))

    scheme = AssociationScheme(
        vertex_count=coerced[0].shape[0],
        classes=tuple(frozen(a) for a in coerced),
        valencies=tuple(valencies),
        commutative=report.extras["commutative"],
        family=family,
        params=dict(params or {}),
    )
    logger.info(
        f"Built {family} scheme: |X|={scheme.vertex_count} d={scheme.num_classes} "
        f"valencies={scheme.valencies} commutative={scheme.commutative}"
    )
    return scheme


def _check_cap(count: int, what: str, config: SchemeWalkConfig) -> None:
    if count > config.vertex_cap:
        raise VertexCapExceeded(f"{what} has {count} vertices, above the cap {config.vertex_cap}")


def _classes_from_relation(relation: np.ndarray, d: int) -> list[IntMatrix]:
    return [(relation == i).astype(np.int64) for i in range(d + 1)]


def build_complete_scheme(n: int) -> AssociationScheme:
    if n < 1:
        raise InputError(f"Complete scheme needs at least one vertex, got {n}")
    identity = np.eye(n, dtype=np.int64)
    classes = [identity] if n == 1 else [identity, np.ones((n, n), dtype=np.int64) - identity]
    return scheme_from_classes(classes, family="complete", params={"n": n})


def build_johnson(v: int, k: int, *, config: Optional[SchemeWalkConfig] = None) -> AssociationScheme:
    config = resolve_config(config)
    if v < 2 or not 1 <= k <= v - 1:
        raise InputError(f"Johnson scheme needs v >= 2 and 1 <= k <= v-1, got v={v}, k={k}")
    _check_cap(math.comb(v, k), f"J({v},{k})", config)

    subsets = [frozenset(s) for s in combinations(range(1, v + 1), k)]
    n = len(subsets)
    relation = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            relation[a, b] = relation[b, a] = k - len(subsets[a] & subsets[b])
    d = min(k, v - k)
    return scheme_from_classes(_classes_from_relation(relation, d), family="johnson", params={"v": v, "k": k})


def build_grassmann(q: int, v: int, dsub: int, *, config: Optional[SchemeWalkConfig] = None) -> AssociationScheme:
    """Grassmann scheme J_q(v, dsub); class i relates subspaces meeting in dimension dsub - i."""
    config = resolve_config(config)
    if q not in (2, 3):
        raise InputError(f"Unsupported field size q={q}, expected 2 or 3")
    if v < 2 or not 1 <= dsub <= v - 1:
        raise InputError(f"Grassmann scheme needs 1 <= dsub <= v-1, got v={v}, dsub={dsub}")
    _check_cap(gaussian_binomial(v, dsub, q), f"J_{q}({v},{dsub})", config)

    bases = list(enumerate_subspaces(q, v, dsub))
    n = len(bases)
    relation = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            relation[a, b] = relation[b, a] = dsub - intersection_dimension(bases[a], bases[b], q)
    d = min(dsub, v - dsub)
    return scheme_from_classes(
        _classes_from_relation(relation, d),
        family="grassmann",
        params={"q": q, "v": v, "d": dsub},
    )


def build_distance_scheme(graph: Graph) -> AssociationScheme:
    """Distance matrices A_i[x][y] = [dist(x, y) == i] of a connected graph."""
    g = graph.to_networkx()
    if not nx.is_connected(g):
        raise InputError(f"Graph '{graph.name}' is not connected")
    n = graph.vertex_count
    relation = np.zeros((n, n), dtype=np.int64)
    for x, lengths in nx.all_pairs_shortest_path_length(g):
        for y, dist in lengths.items():
            relation[x, y] = dist
    d = int(relation.max())
    return scheme_from_classes(
        _classes_from_relation(relation, d),
        family="distance",
        params={"graph": graph.name or f"{n}-vertex graph"},
    )


def cyclic_group_table(n: int) -> IntMatrix:
    if n < 1:
        raise InputError(f"Cyclic group order must be positive, got {n}")
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def symmetric_group_table(n: int) -> IntMatrix:
    """Cayley table of S_n with elements in lexicographic order (identity first).

    Product a·b is the composition "apply b, then a".
    """
    elems = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    table = np.zeros((len(elems), len(elems)), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[tuple(a[b[x]] for x in range(n))]
    return table


def _validate_group_table(cayley_table) -> tuple[np.ndarray, np.ndarray]:
    table = np.asarray(cayley_table)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise InputError(f"Cayley table must be a non-empty square array, got shape {table.shape}")
    if not np.issubdtype(table.dtype, np.integer):
        raise InputError(f"Cayley table entries must be integers, got dtype {table.dtype}")
    table = table.astype(np.int64)
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise InputError(f"Cayley table entries must lie in [0, {n})")
    idx = np.arange(n)
    if not (np.array_equal(table[0], idx) and np.array_equal(table[:, 0], idx)):
        raise InputError("Element 0 is not a two-sided identity")
    # Associativity (a·b)·c == a·(b·c) for every triple.
    left = table[table[:, :, None], idx[None, None, :]]
    right = table[idx[:, None, None], table[None, :, :]]
    if not np.array_equal(left, right):
        a, b, c = (int(v) for v in np.argwhere(left != right)[0])
        raise InputError(f"Cayley table is not associative at ({a}, {b}, {c})")
    inverse = np.full(n, -1, dtype=np.int64)
    for a in range(n):
        hits = np.nonzero(table[a] == 0)[0]
        if hits.size != 1 or table[int(hits[0]), a] != 0:
            raise InputError(f"Element {a} has no two-sided inverse")
        inverse[a] = int(hits[0])
    return table, inverse


def _conjugacy_classes(table: np.ndarray, inverse: np.ndarray) -> list[list[int]]:
    n = table.shape[0]
    seen = set()
    orbits = []
    for g in range(n):
        if g in seen:
            continue
        orbit = sorted({int(table[table[h, g], inverse[h]]) for h in range(n)})
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def _validate_explicit_orbits(orbits, n: int, inverse: np.ndarray) -> list[list[int]]:
    if orbits is None:
        raise InputError("orbit_mode 'explicit' needs an orbit partition")
    blocks = [sorted(int(x) for x in block) for block in orbits]
    flat = [x for block in blocks for x in block]
    if sorted(flat) != list(range(n)) or any(not block for block in blocks):
        raise InputError(f"Explicit orbits do not partition the {n} group elements")
    if [0] not in blocks:
        raise InputError("Explicit orbits must contain the identity {0} as its own block")
    block_sets = {frozenset(block) for block in blocks}
    for block in blocks:
        if frozenset(int(inverse[x]) for x in block) not in block_sets:
            raise InputError(f"Explicit orbit {block} is not closed under the inversion action")
    return blocks


def build_group_scheme(
    cayley_table,
    orbit_mode: str = "conjugation",
    orbits: Optional[Sequence[Sequence[int]]] = None,
) -> AssociationScheme:
    """Subscheme B_j = sum_{x in C_j} A_x of the group scheme; (x, y) in class j iff y·x^{-1} in C_j."""
    table, inverse = _validate_group_table(cayley_table)
    n = table.shape[0]

    if orbit_mode == "conjugation":
        blocks = _conjugacy_classes(table, inverse)
    elif orbit_mode == "trivial":
        blocks = [[g] for g in range(n)]
    elif orbit_mode == "explicit":
        blocks = _validate_explicit_orbits(orbits, n, inverse)
    else:
        raise InputError(f"Unknown orbit_mode '{orbit_mode}', expected conjugation, trivial or explicit")

    blocks = sorted(blocks, key=min)
    block_of = np.zeros(n, dtype=np.int64)
    for j, block in enumerate(blocks):
        block_of[block] = j

    # quotient[x][y] = y·x^{-1}
    quotient = table[np.arange(n)[None, :], inverse[:, None]]
    relation = block_of[quotient]
    classes = _classes_from_relation(relation, len(blocks) - 1)

    try:
        return scheme_from_classes(
            classes,
            family="group",
            params={"order": n, "orbit_mode": orbit_mode, "orbits": blocks},
        )
    except SchemeAxiomError as e:
        if orbit_mode == "explicit":
            raise InputError(f"Explicit orbits are not invariant under any automorphism action: {e}")
        raise


def intersection_numbers(scheme: AssociationScheme) -> IntersectionTensor:
    """Exact p^k_ij. Raises IntegerOverflowError when k_i k_j does not fit in int64."""
    largest = max(scheme.valencies)
    if largest * largest > INT64_LIMIT:
        raise IntegerOverflowError(
            f"Valency {largest} squared exceeds the int64 range; intersection numbers would overflow"
        )
    p, witness = _read_structure_constants(scheme.classes)
    if witness is not None:
        i, j, xy = witness
        raise SchemeAxiomError(f"A_{i} A_{j} is not in the span of the classes (mismatch at {xy})")
    return IntersectionTensor(p=frozen(p))


def class_inner_products(scheme: AssociationScheme) -> IntMatrix:
    """Gram matrix of the trace form <A_i, A_j> = sum(A_i ∘ A_j) = δ_ij |X| k_i."""
    size = len(scheme.classes)
    gram = np.zeros((size, size), dtype=np.int64)
    for i, a in enumerate(scheme.classes):
        for j, b in enumerate(scheme.classes):
            gram[i, j] = int(np.sum(a * b))
    return frozen(gram)


def is_distance_ordered(tensor: IntersectionTensor) -> bool:
    """A_1 generates the scheme in the given class order (distance-regular ordering)."""
    p = tensor.p
    d = tensor.num_classes
    if d == 0:
        return True
    for i in range(d):
        if p[i + 1, 1, i] <= 0:
            return False
    for i in range(d + 1):
        for j in range(d + 1):
            if abs(i - j) > 1 and p[j, 1, i] != 0:
                return False
    return True


def _generic_hermitian(scheme: AssociationScheme, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian element of the Bose-Mesner algebra (handles non-symmetric classes)."""
    n = scheme.vertex_count
    m = np.zeros((n, n), dtype=np.complex128)
    for a in scheme.classes[1:]:
        c_sym, c_anti = rng.standard_normal(2)
        m += c_sym * (a + a.T) + 1j * c_anti * (a - a.T)
    return m


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    groups = [[0]]
    for idx in range(1, len(values)):
        scale = max(1.0, abs(values[idx]))
        if values[idx] - values[groups[-1][-1]] <= tol * scale:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def _sort_key(scheme: AssociationScheme, e: np.ndarray, rank: int) -> tuple:
    key = []
    for a in scheme.classes[1:]:
        theta = np.trace(a @ e) / rank
        key.extend([-round(theta.real, 9), -round(theta.imag, 9)])
    return tuple(key)


def _maybe_real(m: np.ndarray, tol: float) -> np.ndarray:
    if np.max(np.abs(m.imag), initial=0.0) <= tol:
        return np.ascontiguousarray(m.real)
    return m


def primitive_idempotents(
    scheme: AssociationScheme,
    *,
    config: Optional[SchemeWalkConfig] = None,
) -> BoseMesnerSpectral:
    """Simultaneously diagonalise the scheme via one generic element of its algebra.

    E_0 = J/|X| comes first; the rest are sorted by descending eigenvalue of
    A_1 (ties broken by A_2, A_3, ...).
    """
    config = resolve_config(config)
    if not scheme.commutative:
        raise NotCommutativeError("Primitive idempotents need a commutative scheme")

    n = scheme.vertex_count
    size = len(scheme.classes)
    ones = np.ones(n) / math.sqrt(n)

    for attempt in range(config.separation_retries):
        rng = np.random.default_rng([config.separation_seed, attempt])
        values, vectors = scipy.linalg.eigh(_generic_hermitian(scheme, rng))
        groups = _cluster(values, config.eigen_cluster_tol)
        if len(groups) != size:
            logger.warning(
                f"Eigenspace separation attempt {attempt} found {len(groups)} clusters, "
                f"expected {size}; reseeding"
            )
            continue

        projections = []
        for group in groups:
            v = vectors[:, group]
            projections.append(v @ v.conj().T)
        ranks = [len(group) for group in groups]

        lead = int(np.argmax([np.linalg.norm(e @ ones) for e in projections]))
        rest = [i for i in range(size) if i != lead]
        rest.sort(key=lambda i: _sort_key(scheme, projections[i], ranks[i]))
        order = [lead] + rest
        idempotents = [projections[i] for i in order]
        multiplicities = [ranks[i] for i in order]

        P = np.zeros((size, size), dtype=np.complex128)
        Q = np.zeros((size, size), dtype=np.complex128)
        for i, e in enumerate(idempotents):
            for j, a in enumerate(scheme.classes):
                P[i, j] = np.trace(a @ e) / multiplicities[i]
                Q[j, i] = np.sum(e * a) / scheme.valencies[j]

        tol = config.idempotent_tol
        residual = max(
            np.max(np.abs(sum(idempotents) - np.eye(n))),
            np.max(np.abs(idempotents[0] - np.full((n, n), 1.0 / n))),
            np.max(np.abs(P @ Q - n * np.eye(size))),
        )
        if residual > tol:
            logger.warning(f"Eigenspace separation attempt {attempt} residual {residual:.3e} above {tol}")
            continue

        logger.info(f"Separated {size} idempotents on |X|={n} (attempt {attempt}, multiplicities {multiplicities})")
        return BoseMesnerSpectral(
            vertex_count=n,
            idempotents=tuple(frozen(_maybe_real(e, tol)) for e in idempotents),
            multiplicities=tuple(multiplicities),
            eigenmatrix_P=frozen(_maybe_real(P, tol)),
            dual_eigenmatrix_Q=frozen(_maybe_real(Q, tol)),
            seed=config.separation_seed,
            attempt=attempt,
        )

    raise EigenspaceSeparationError(
        f"Could not separate {size} common eigenspaces after {config.separation_retries} combinations"
    )


def krein_parameters(
    spectral: BoseMesnerSpectral,
    *,
    config: Optional[SchemeWalkConfig] = None,
) -> KreinTensor:
    """q[k][i][j] = |X| tr((E_i ∘ E_j) E_k) / m_k."""
    config = resolve_config(config)
    n = spectral.vertex_count
    size = len(spectral.idempotents)
    if any(m <= 0 for m in spectral.multiplicities):
        raise InputError(f"Idempotent with zero rank in multiplicities {spectral.multiplicities}")

    q = np.zeros((size, size, size), dtype=np.float64)
    for i, e_i in enumerate(spectral.idempotents):
        for j, e_j in enumerate(spectral.idempotents):
            schur = e_i * e_j
            for k, e_k in enumerate(spectral.idempotents):
                # tr(X E_k) = sum(X ∘ E_k^T)
                q[k, i, j] = (n * np.sum(schur * e_k.T) / spectral.multiplicities[k]).real

    tensor = KreinTensor(
        q=frozen(q),
        multiplicities=spectral.multiplicities,
        integrality_tol=config.integrality_tol,
        zero_tol=config.krein_zero_tol,
    )
    if not tensor.satisfies_krein_condition:
        logger.warning(f"Krein condition violated: min q = {tensor.min_entry:.3e}")
    return tensor


def schur_residual(spectral: BoseMesnerSpectral, krein: KreinTensor) -> float:
    """max over i, j of |E_i ∘ E_j − (1/|X|) sum_k q[k][i][j] E_k|."""
    n = spectral.vertex_count
    worst = 0.0
    for i, e_i in enumerate(spectral.idempotents):
        for j, e_j in enumerate(spectral.idempotents):
            combo = sum(krein.q[k, i, j] * e_k for k, e_k in enumerate(spectral.idempotents)) / n
            worst = max(worst, float(np.max(np.abs(e_i * e_j - combo))))
    return worst
