from __future__ import annotations

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import SchemeWalkConfig
from .exceptions import InputError
from .fusion import AnyonModelData, FusionRing, anyon_model, fusion_ring
from .graphs import Graph, cycle_graph, complete_graph, graph_from_edges, path_graph, regular_tree
from .ifs import JacobiSequences
from .reports import VerificationReport
from .scheme_core import AssociationScheme, IntersectionTensor, KreinTensor


class DocumentKind:
    INTERSECTION = "intersection_numbers"
    KREIN = "krein"


class SchemeDocument(BaseModel):
    """Classes are stored row-major and flattened; nested rows are accepted on input."""

    vertex_count: int
    classes: list[list[int]]
    family: Optional[str] = None
    params: dict[str, Any] = {}

    @model_validator(mode="before")
    @classmethod
    def _flatten_rows(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("classes"), list):
            flat = []
            for a in data["classes"]:
                if isinstance(a, list) and a and isinstance(a[0], list):
                    a = [x for row in a for x in row]
                flat.append(a)
            data = {**data, "classes": flat}
        return data

    @model_validator(mode="after")
    def _check_entries(self) -> SchemeDocument:
        n = self.vertex_count
        if n < 1:
            raise ValueError(f"vertex_count must be positive, got {n}")
        for j, a in enumerate(self.classes):
            if len(a) != n * n:
                raise ValueError(f"class {j} has {len(a)} entries, expected {n * n}")
            bad = next((pos for pos, x in enumerate(a) if x not in (0, 1)), None)
            if bad is not None:
                raise ValueError(f"class {j} has entry {a[bad]} at ({bad // n}, {bad % n}), expected 0 or 1")
        return self

    def to_classes(self) -> list[np.ndarray]:
        n = self.vertex_count
        return [np.asarray(a, dtype=np.int64).reshape(n, n) for a in self.classes]

    @classmethod
    def from_scheme(cls, scheme: AssociationScheme) -> SchemeDocument:
        return cls(
            vertex_count=scheme.vertex_count,
            classes=[a.reshape(-1).tolist() for a in scheme.classes],
            family=scheme.family,
            params=_plain(scheme.params),
        )


class TensorDocument(BaseModel):
    """A [k][i][j] tensor; Krein tensors also carry their integrality view."""

    kind: str
    values: list[list[list[float]]]
    multiplicities: Optional[list[int]] = None
    rounded: Optional[list[list[list[int]]]] = None
    integral: Optional[list[list[list[bool]]]] = None
    min_entry: Optional[float] = None
    krein_condition: Optional[bool] = None

    @field_validator("values")
    @classmethod
    def _cubic(cls, values: list) -> list:
        size = len(values)
        if any(len(plane) != size or any(len(row) != size for row in plane) for plane in values):
            raise ValueError("tensor must be cubic")
        return values

    @classmethod
    def from_intersection(cls, tensor: IntersectionTensor) -> TensorDocument:
        return cls(kind=DocumentKind.INTERSECTION, values=tensor.p.tolist())

    @classmethod
    def from_krein(cls, krein: KreinTensor) -> TensorDocument:
        return cls(
            kind=DocumentKind.KREIN,
            values=krein.q.tolist(),
            multiplicities=list(krein.multiplicities),
            rounded=krein.rounded.tolist(),
            integral=krein.integral_mask.tolist(),
            min_entry=krein.min_entry,
            krein_condition=krein.satisfies_krein_condition,
        )

    def to_krein(self, config: Optional[SchemeWalkConfig] = None) -> KreinTensor:
        if self.kind != DocumentKind.KREIN:
            raise InputError(f"Expected a Krein tensor document, got kind '{self.kind}'")
        config = config or SchemeWalkConfig()
        return KreinTensor(
            q=np.asarray(self.values, dtype=np.float64),
            multiplicities=tuple(self.multiplicities or ()),
            integrality_tol=config.integrality_tol,
            zero_tol=config.krein_zero_tol,
        )


class VerificationDocument(BaseModel):
    passed: bool
    checks: list[dict[str, Any]]
    extras: dict[str, Any] = {}

    @classmethod
    def from_report(cls, report: VerificationReport) -> VerificationDocument:
        return cls(
            passed=report.passed,
            checks=[c.to_payload() for c in report.checks],
            extras=_plain(report.extras),
        )


class GraphDocument(BaseModel):
    """Explicit `{vertex_count, edges}` or a generator shorthand with `family`."""

    vertex_count: Optional[int] = None
    edges: Optional[list[tuple[int, int]]] = None
    family: Optional[str] = None
    degree: Optional[int] = None
    depth: Optional[int] = None
    n: Optional[int] = None

    @model_validator(mode="after")
    def _one_form(self) -> GraphDocument:
        if self.family is None and self.vertex_count is None:
            raise ValueError("graph needs either vertex_count/edges or a family")
        return self

    def to_graph(self, config: Optional[SchemeWalkConfig] = None) -> Graph:
        if self.family is None:
            return graph_from_edges(self.vertex_count, self.edges or [])
        if self.family == "tree":
            if self.degree is None or self.depth is None:
                raise InputError("tree graph needs degree and depth")
            return regular_tree(self.degree, self.depth, config=config)
        if self.n is None:
            raise InputError(f"{self.family} graph needs n")
        generators = {"cycle": cycle_graph, "path": path_graph, "complete": complete_graph}
        if self.family not in generators:
            raise InputError(f"Unknown graph family '{self.family}', expected tree, {', '.join(generators)}")
        return generators[self.family](self.n)

    @classmethod
    def from_graph(cls, graph: Graph) -> GraphDocument:
        return cls(vertex_count=graph.vertex_count, edges=list(graph.edges))


class JacobiDocument(BaseModel):
    omega: list[float]
    alpha: list[float]
    leakage: Optional[list[float]] = None

    @classmethod
    def from_sequences(cls, jac: JacobiSequences) -> JacobiDocument:
        return cls(
            omega=list(jac.omega),
            alpha=list(jac.alpha),
            leakage=list(jac.leakage) if jac.projected else None,
        )

    def to_sequences(self) -> JacobiSequences:
        return JacobiSequences(omega=tuple(self.omega), alpha=tuple(self.alpha))


class FusionRingDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    labels: list[str]
    n_tensor: list[list[list[int]]] = Field(alias="N")
    dual: Optional[list[int]] = None

    def to_ring(self) -> FusionRing:
        return fusion_ring(self.labels, np.asarray(self.n_tensor, dtype=np.int64), self.dual)

    @classmethod
    def from_ring(cls, ring: FusionRing) -> FusionRingDocument:
        return cls(labels=list(ring.labels), N=ring.n_tensor.tolist(), dual=list(ring.dual))


class AnyonModelDocument(FusionRingDocument):
    """Twists are (re, im) pairs."""

    s_matrix: list[list[float]] = Field(alias="S")
    twists: list[tuple[float, float]]
    qdims: Optional[list[float]] = None

    def to_model(self) -> AnyonModelData:
        theta = [complex(re, im) for re, im in self.twists]
        return anyon_model(self.to_ring(), self.s_matrix, theta, self.qdims)

    @classmethod
    def from_model(cls, model: AnyonModelData) -> AnyonModelDocument:
        ring = model.ring
        return cls(
            labels=list(ring.labels),
            N=ring.n_tensor.tolist(),
            dual=list(ring.dual),
            S=model.s_matrix.tolist(),
            twists=[(float(t.real), float(t.imag)) for t in model.twists],
            qdims=model.qdims.tolist(),
        )


def _plain(value: Any) -> Any:
    """numpy scalars and arrays to JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value
