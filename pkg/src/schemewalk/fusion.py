"""
Fusion rings and anyon model data.

A fusion ring is stored as its integer tensor N[a][b][c] = N^c_ab with label 0
the vacuum. Everything combinatorial (axioms, powers, fusion trees) is exact
integer arithmetic; quantum dimensions and the modular data are floats.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import SchemeWalkConfig, resolve_config
from .exceptions import FusionAxiomError, InputError
from .reports import AxiomCheck, VerificationReport
from .scheme_core import KreinTensor
from .types import ComplexMatrix, FloatMatrix, IntMatrix, Label
from .utils import frozen, integrality_deviation

logger = logging.getLogger(__name__)

LABEL_ALIASES = {
    "vacuum": "1",
    "sigma": "σ",
    "psi": "ψ",
}


@dataclass(frozen=True, eq=False)
class FusionRing:
    labels: tuple[str, ...]
    n_tensor: IntMatrix
    dual: tuple[int, ...]
    commutative: bool = True

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.rank:
                raise InputError(f"Label index {label} out of range for rank {self.rank}")
            return int(label)
        name = LABEL_ALIASES.get(str(label), str(label))
        try:
            return self.labels.index(name)
        except ValueError:
            raise InputError(f"Unknown label '{label}', expected one of {list(self.labels)}")

    def fuse(self, a: Label, b: Label) -> dict[str, int]:
        row = self.n_tensor[self.index(a), self.index(b)]
        return {self.labels[c]: int(n) for c, n in enumerate(row) if n}


@dataclass(frozen=True, eq=False)
class AnyonModelData:
    ring: FusionRing
    s_matrix: FloatMatrix
    twists: ComplexMatrix
    qdims: FloatMatrix


@dataclass(frozen=True)
class FusionTreeSpace:
    """Left-associated fusion trees; basis[i] lists the internal charges e_1..e_{n-2}."""

    inputs: tuple[str, ...]
    total: str
    basis: tuple[tuple[str, ...], ...]
    multiplicities: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)


@dataclass(frozen=True)
class KreinFusionCandidate:
    """One normalisation of a Krein tensor read as fusion rules."""

    normalization: str
    integral: bool
    non_integral: tuple[tuple[tuple[int, int, int], float, float], ...] = ()
    ring: Optional[FusionRing] = None
    report: Optional[VerificationReport] = None

    @property
    def accepted(self) -> bool:
        return self.integral and self.report is not None and self.report.passed

    def to_payload(self) -> dict:
        return {
            "normalization": self.normalization,
            "integral": self.integral,
            "accepted": self.accepted,
            "non_integral": [
                {"index": list(idx), "value": value, "deviation": dev} for idx, value, dev in self.non_integral
            ],
            "verification": self.report.to_payload() if self.report is not None else None,
        }


@dataclass(frozen=True)
class KreinFusionVerdict:
    raw: KreinFusionCandidate
    rescaled: KreinFusionCandidate

    def to_payload(self) -> dict:
        return {"raw": self.raw.to_payload(), "rescaled": self.rescaled.to_payload()}


def fusion_ring(
    labels: Sequence[str],
    n_tensor,
    dual: Optional[Sequence[int]] = None,
    *,
    commutative: bool = True,
) -> FusionRing:
    """Validate shape and entries; `dual` defaults to the b with N[a][b][0] >= 1."""
    labels = tuple(str(label) for label in labels)
    tensor = np.asarray(n_tensor)
    rank = len(labels)
    if rank == 0:
        raise InputError("A fusion ring needs at least the vacuum label")
    if len(set(labels)) != rank:
        raise InputError(f"Duplicate labels in {list(labels)}")
    if tensor.shape != (rank, rank, rank):
        raise InputError(f"Fusion tensor has shape {tensor.shape}, expected {(rank, rank, rank)}")
    if tensor.dtype == object or not np.issubdtype(tensor.dtype, np.number):
        raise InputError(f"Fusion tensor must be numeric, got dtype {tensor.dtype}")
    if np.any(tensor < 0):
        a, b, c = (int(v) for v in np.argwhere(tensor < 0)[0])
        raise InputError(f"Negative fusion multiplicity N[{labels[a]}][{labels[b]}][{labels[c]}]")
    if np.any(integrality_deviation(tensor.astype(np.float64)) != 0):
        a, b, c = (int(v) for v in np.argwhere(integrality_deviation(tensor.astype(np.float64)) != 0)[0])
        raise InputError(f"Non-integer fusion multiplicity {tensor[a, b, c]} at ({labels[a]}, {labels[b]}, {labels[c]})")
    tensor = tensor.astype(np.int64)

    if dual is None:
        dual = []
        for a in range(rank):
            hits = np.nonzero(tensor[a, :, 0])[0]
            dual.append(int(hits[0]) if hits.size else -1)
    dual = tuple(int(x) for x in dual)
    if len(dual) != rank:
        raise InputError(f"Dual map has {len(dual)} entries for {rank} labels")

    return FusionRing(labels=labels, n_tensor=frozen(tensor), dual=dual, commutative=commutative)


def trivial_ring() -> FusionRing:
    return fusion_ring(("1",), [[[1]]], (0,))


def ising_ring() -> FusionRing:
    """σ × σ = 1 + ψ, σ × ψ = σ, ψ × ψ = 1 on labels (1, σ, ψ)."""
    n = np.zeros((3, 3, 3), dtype=np.int64)
    one, sigma, psi = range(3)
    for a in range(3):
        n[one, a, a] = n[a, one, a] = 1
    n[sigma, sigma, one] = n[sigma, sigma, psi] = 1
    n[sigma, psi, sigma] = n[psi, sigma, sigma] = 1
    n[psi, psi, one] = 1
    return fusion_ring(("1", "σ", "ψ"), n, (0, 1, 2))


def anyon_model(ring: FusionRing, s_matrix, twists, qdims=None) -> AnyonModelData:
    s = np.asarray(s_matrix, dtype=np.float64)
    theta = np.asarray(twists, dtype=np.complex128)
    if s.shape != (ring.rank, ring.rank):
        raise InputError(f"S matrix has shape {s.shape}, expected {(ring.rank, ring.rank)}")
    if theta.shape != (ring.rank,):
        raise InputError(f"Expected {ring.rank} twists, got shape {theta.shape}")
    d = quantum_dimensions(ring) if qdims is None else np.asarray(qdims, dtype=np.float64)
    return AnyonModelData(ring=ring, s_matrix=frozen(s), twists=frozen(theta), qdims=frozen(d))


def ising_model() -> AnyonModelData:
    root2 = math.sqrt(2)
    s = [[1.0, root2, 1.0], [root2, 0.0, -root2], [1.0, -root2, 1.0]]
    twists = [1.0, cmath.exp(1j * math.pi / 8), -1.0]
    return anyon_model(ising_ring(), s, twists, [1.0, root2, 1.0])


def fusion_matrices(ring: FusionRing) -> list[IntMatrix]:
    """(N_a)[b][c] = N[a][b][c]."""
    return [ring.n_tensor[a] for a in range(ring.rank)]


def _first(mask: np.ndarray) -> Optional[tuple[int, ...]]:
    hits = np.argwhere(mask)
    return tuple(int(v) for v in hits[0]) if hits.size else None


def verify_fusion_ring(ring: FusionRing) -> VerificationReport:
    """Unit, associativity, duality and (when claimed) commutativity, with the first counterexample."""
    n = ring.n_tensor
    rank = ring.rank
    eye = np.eye(rank, dtype=np.int64)
    names = ring.labels

    def labelled(idx):
        return tuple(names[i] for i in idx) if idx is not None else None

    checks = []

    bad = _first(n[0] != eye)
    if bad is None:
        bad = _first(n[:, 0, :] != eye)
        bad = (bad[0], 0, bad[1]) if bad is not None else None
    else:
        bad = (0, *bad)
    checks.append(AxiomCheck("unit", bad is None, labelled(bad), "" if bad is None else "vacuum is not a unit"))

    left = np.einsum("abe,ecd->abcd", n, n)
    right = np.einsum("bce,aed->abcd", n, n)
    bad = _first(left != right)
    detail = ""
    if bad is not None:
        detail = f"(a×b)×c gives {int(left[bad])} copies of d, a×(b×c) gives {int(right[bad])}"
    checks.append(AxiomCheck("associativity", bad is None, labelled(bad), detail))

    expected = np.zeros((rank, rank), dtype=np.int64)
    involution = all(0 <= ring.dual[a] < rank and ring.dual[ring.dual[a]] == a for a in range(rank))
    if involution:
        for a in range(rank):
            expected[a, ring.dual[a]] = 1
        bad = _first(n[:, :, 0] != expected)
        checks.append(AxiomCheck(
            "duality", bad is None, labelled(bad), "" if bad is None else "N[a][b][1] differs from δ(b, a*)",
        ))
    else:
        a = next(a for a in range(rank) if not (0 <= ring.dual[a] < rank and ring.dual[ring.dual[a]] == a))
        checks.append(AxiomCheck("duality", False, (names[a],), "dual map is not an involution"))

    bad = _first(n != n.transpose(1, 0, 2))
    checks.append(AxiomCheck(
        "commutativity", bad is None, labelled(bad), "" if bad is None else "a×b differs from b×a",
    ))

    report = VerificationReport(
        checks=tuple(checks),
        informational=frozenset() if ring.commutative else frozenset({"commutativity"}),
        extras={"labels": list(names)},
    )
    if not report.passed:
        logger.warning(f"Fusion ring {list(names)} fails {[c.name for c in report.failures()]}")
    return report


def require_verified(ring: FusionRing) -> FusionRing:
    report = verify_fusion_ring(ring)
    if not report.passed:
        failed = report.failures()[0]
        raise FusionAxiomError(f"Fusion ring fails {failed.name} at {failed.witness}: {failed.detail}")
    return ring


def _top_multiplicity(m: np.ndarray, tol: float) -> int:
    eig = np.linalg.eigvals(m.astype(np.float64))
    return int(np.sum(np.abs(eig - eig.real.max()) <= tol))


def perron_multiplicities(ring: FusionRing, *, tol: float = 1e-6) -> dict[str, int]:
    """Algebraic multiplicity of the top eigenvalue of each N_a."""
    return {label: _top_multiplicity(m, tol) for label, m in zip(ring.labels, fusion_matrices(ring))}


def quantum_dimensions(ring: FusionRing, *, tol: float = 1e-12) -> np.ndarray:
    """Perron-Frobenius eigenvalue of each fusion matrix, checked against d_a d_b = Σ_c N^c_ab d_c."""
    d = np.array([max(np.linalg.eigvals(m.astype(np.float64)).real) for m in fusion_matrices(ring)])
    if np.any(d <= 0):
        raise FusionAxiomError(f"Non-positive Perron eigenvalue in {d.tolist()}")
    lhs = np.outer(d, d)
    rhs = ring.n_tensor.astype(np.float64) @ d
    worst = float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))))
    if worst > tol:
        a, b = (int(v) for v in np.unravel_index(np.argmax(np.abs(lhs - rhs)), lhs.shape))
        raise FusionAxiomError(
            f"Perron eigenvalues {d.tolist()} do not satisfy d_a d_b = Σ N d_c "
            f"at ({ring.labels[a]}, {ring.labels[b]}), deviation {worst:.3e}"
        )
    if _top_multiplicity(sum(fusion_matrices(ring)), 1e-6) > 1:
        logger.warning(
            f"Perron eigenvalue of the summed fusion matrix is degenerate: {list(ring.labels)} is not irreducible "
            f"and its quantum dimensions need not be unique"
        )
    return d


def total_quantum_dimension(model: AnyonModelData) -> float:
    return float(math.sqrt(np.sum(model.qdims**2)))


def central_charge(model: AnyonModelData) -> float:
    """c mod 8 from the Gauss sum Σ d_a² θ_a / D = e^{2πi c / 8}."""
    gauss = np.sum(model.qdims**2 * model.twists) / total_quantum_dimension(model)
    return float((cmath.phase(gauss) / (2 * math.pi) * 8) % 8)


def fusion_power(ring: FusionRing, label: Label, n: int) -> dict[str, int]:
    """Decomposition of a^n = a × a × ... × a, by iterated right multiplication."""
    if n < 1:
        raise InputError(f"Fusion power needs n >= 1, got {n}")
    a = ring.index(label)
    tensor = ring.n_tensor.astype(object)
    vec = np.zeros(ring.rank, dtype=object)
    vec[a] = 1
    for _ in range(n - 1):
        vec = vec.dot(tensor[:, a, :])
    return {ring.labels[c]: int(m) for c, m in enumerate(vec) if m}


def format_multiset(decomposition: dict[str, int]) -> str:
    """{σ: 4} -> "4σ"; {1: 2, ψ: 2} -> "2·1 + 2ψ"."""
    terms = []
    for label, mult in decomposition.items():
        if mult == 1:
            terms.append(label)
        else:
            sep = "·" if label[:1].isdigit() else ""
            terms.append(f"{mult}{sep}{label}")
    return " + ".join(terms) if terms else "0"


def fusion_tree_space(ring: FusionRing, inputs: Sequence[Label], total: Label) -> FusionTreeSpace:
    if not inputs:
        raise InputError("Fusion tree needs at least one input label")
    target = ring.index(total)
    idx = [ring.index(label) for label in inputs]
    n = ring.n_tensor

    # (internal charges so far, current charge, multiplicity)
    partial = [((), idx[0], 1)]
    for position, b in enumerate(idx[1:], start=1):
        grown = []
        for charges, current, mult in partial:
            for c in np.nonzero(n[current, b])[0]:
                c = int(c)
                internal = charges + (c,) if position < len(idx) - 1 else charges
                grown.append((internal, c, mult * int(n[current, b, c])))
        partial = grown

    trees = [(charges, mult) for charges, current, mult in partial if current == target]
    return FusionTreeSpace(
        inputs=tuple(ring.labels[i] for i in idx),
        total=ring.labels[target],
        basis=tuple(tuple(ring.labels[c] for c in charges) for charges, _ in trees),
        multiplicities=tuple(mult for _, mult in trees),
    )


@dataclass(frozen=True)
class QutritEncoding:
    """Three pair-fusion states of six σ anyons and their left-associated tree labels."""

    pair_charges: tuple[tuple[str, str, str], ...]
    tree_labels: tuple[tuple[str, ...], ...]
    space: FusionTreeSpace = field(repr=False)


def qutrit_encoding(ring: Optional[FusionRing] = None) -> QutritEncoding:
    """|0> = (σσ→1)(σσ→1)(σσ→1), |1> = (σσ→1)(σσ→ψ)(σσ→ψ), |2> = (σσ→ψ)(σσ→ψ)(σσ→1)."""
    ring = ring or ising_ring()
    states = (("1", "1", "1"), ("1", "ψ", "ψ"), ("ψ", "ψ", "1"))
    space = fusion_tree_space(ring, ["σ"] * 6, "1")

    labels = []
    for x, y, z in states:
        xy = _single_channel(ring, x, y)
        if _single_channel(ring, xy, z) != "1":
            raise FusionAxiomError(f"Pair charges ({x}, {y}, {z}) do not fuse to the vacuum")
        tree = (x, "σ", xy, "σ")
        if tree not in space.basis:
            raise FusionAxiomError(f"Encoded state {tree} is not a fusion tree of six σ with total 1")
        labels.append(tree)
    return QutritEncoding(pair_charges=states, tree_labels=tuple(labels), space=space)


def _single_channel(ring: FusionRing, a: str, b: str) -> str:
    channels = ring.fuse(a, b)
    if len(channels) != 1 or next(iter(channels.values())) != 1:
        raise FusionAxiomError(f"{a} × {b} = {channels} is not a single abelian channel")
    return next(iter(channels))


def verlinde_check(model: AnyonModelData, *, config: Optional[SchemeWalkConfig] = None) -> VerificationReport:
    """Symmetry and unitarity of S, the Verlinde formula, and S columns as fusion eigenvectors.

    The S matrix is unnormalised, so the Verlinde sum reads
    N^c_ab = Σ_x S[a][x] S[b][x] conj(S[c][x]) / (D² S[0][x]).
    """
    config = resolve_config(config)
    s = model.s_matrix
    ring = model.ring
    names = ring.labels
    rank = ring.rank
    total = total_quantum_dimension(model)
    checks = []

    bad = _first(np.abs(s - s.T) > config.unitarity_tol)
    checks.append(AxiomCheck(
        "symmetry", bad is None, tuple(names[i] for i in bad) if bad else None,
        "" if bad is None else "S is not symmetric",
    ))

    normalized = s / total
    drift = float(np.max(np.abs(normalized @ normalized.conj().T - np.eye(rank))))
    checks.append(AxiomCheck(
        "unitarity", drift <= config.unitarity_tol, None, f"max deviation {drift:.3e}",
    ))

    vacuum_row = s[0]
    if np.any(np.abs(vacuum_row) <= config.verlinde_tol):
        x = int(np.argmin(np.abs(vacuum_row)))
        raise InputError(f"S[1][{names[x]}] vanishes; Verlinde formula undefined")

    reproduced = np.einsum("ax,bx,cx->abc", s, s, s.conj() / (total**2 * vacuum_row))
    err = np.abs(reproduced - ring.n_tensor)
    bad = _first(err > config.verlinde_tol)
    detail = f"max deviation {float(err.max()):.3e}"
    if bad is not None:
        detail = f"N[{']['.join(names[i] for i in bad)}] = {int(ring.n_tensor[bad])}, Verlinde gives {reproduced[bad].real:.6g}"
    checks.append(AxiomCheck(
        "verlinde", bad is None, tuple(names[i] for i in bad) if bad else None, detail,
    ))

    eigen_bad = None
    worst = 0.0
    for a, n_a in enumerate(fusion_matrices(ring)):
        for x in range(rank):
            residual = n_a @ s[:, x] - (s[a, x] / s[0, x]) * s[:, x]
            dev = float(np.max(np.abs(residual)))
            worst = max(worst, dev)
            if dev > config.verlinde_tol and eigen_bad is None:
                eigen_bad = (names[a], names[x])
    checks.append(AxiomCheck(
        "eigenvectors", eigen_bad is None, eigen_bad, f"max residual {worst:.3e}",
    ))

    report = VerificationReport(checks=tuple(checks), extras={"total_quantum_dimension": total})
    if not report.passed:
        logger.warning(f"Modular data check failed: {[c.name for c in report.failures()]}")
    return report


def _candidate_from_tensor(name: str, q: np.ndarray, tol: float) -> KreinFusionCandidate:
    size = q.shape[0]
    deviation = integrality_deviation(q)
    non_integral = []
    for k, i, j in np.argwhere((deviation > tol) | (q < -tol)):
        k, i, j = int(k), int(i), int(j)
        non_integral.append(((k, i, j), float(q[k, i, j]), float(deviation[k, i, j])))
    if non_integral:
        logger.info(f"Krein tensor ({name}) rejected: {len(non_integral)} non-integral entries")
        return KreinFusionCandidate(name, False, tuple(non_integral))

    # fusion N[i][j][k] = q^k_ij
    n_tensor = np.rint(q).astype(np.int64).transpose(1, 2, 0)
    n_tensor[n_tensor < 0] = 0
    labels = ("1",) + tuple(f"E{i}" for i in range(1, size))
    ring = fusion_ring(labels, n_tensor)
    return KreinFusionCandidate(name, True, (), ring, verify_fusion_ring(ring))


def fusion_ring_from_krein(
    krein: KreinTensor,
    multiplicities: Sequence[int],
    *,
    tol: Optional[float] = None,
    config: Optional[SchemeWalkConfig] = None,
) -> KreinFusionVerdict:
    """Read q^k_ij (raw) and q^k_ij m_k / (m_i m_j) (rescaled) as candidate fusion rules."""
    config = resolve_config(config)
    tol = config.integrality_tol if tol is None else tol
    q = np.asarray(krein.q, dtype=np.float64)
    m = np.asarray(multiplicities, dtype=np.float64)
    if q.ndim != 3 or len(set(q.shape)) != 1:
        raise InputError(f"Krein tensor must be cubic, got shape {q.shape}")
    if m.shape != (q.shape[0],):
        raise InputError(f"Got {m.shape[0]} multiplicities for a Krein tensor of size {q.shape[0]}")
    if np.any(m <= 0):
        raise InputError(f"Multiplicities must be positive, got {list(multiplicities)}")

    rescaled = q * m[:, None, None] / (m[None, :, None] * m[None, None, :])
    verdict = KreinFusionVerdict(
        raw=_candidate_from_tensor("raw", q, tol),
        rescaled=_candidate_from_tensor("rescaled", rescaled, tol),
    )
    logger.info(f"Krein fusion verdicts: raw={verdict.raw.accepted} rescaled={verdict.rescaled.accepted}")
    return verdict
