from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from typing import Mapping, Optional

from .exceptions import InputError

SEED_ENV_VAR = "SCHEMEWALK_SEED"

_DEFAULT_SEED = 0xA55C


@dataclass
class SchemeWalkConfig:
    vertex_cap: int = 10_000
    separation_seed: int = _DEFAULT_SEED
    separation_retries: int = 5
    eigen_cluster_tol: float = 1e-8
    idempotent_tol: float = 1e-8
    krein_zero_tol: float = 1e-9
    integrality_tol: float = 1e-6
    verlinde_tol: float = 1e-9
    tridiagonal_tol: float = 1e-10
    unitarity_tol: float = 1e-12
    force_projection: bool = False

    def with_vertex_cap(self, cap: int) -> SchemeWalkConfig:
        if cap < 1:
            raise InputError(f"vertex_cap must be positive, got {cap}")
        self.vertex_cap = cap
        return self

    def with_seed(self, seed: int) -> SchemeWalkConfig:
        self.separation_seed = seed
        return self

    def with_tolerances(self, **overrides: float) -> SchemeWalkConfig:
        known = {f.name for f in fields(self) if f.name.endswith("_tol")}
        for name, value in overrides.items():
            if name not in known:
                raise InputError(f"Unknown tolerance '{name}', expected one of {sorted(known)}")
            if value <= 0:
                raise InputError(f"Tolerance '{name}' must be positive, got {value}")
            setattr(self, name, float(value))
        return self

    def with_force_projection(self, enabled: bool = True) -> SchemeWalkConfig:
        self.force_projection = enabled
        return self

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **kwargs) -> SchemeWalkConfig:
        """Build a config, taking the idempotent-separation seed from SCHEMEWALK_SEED when set."""
        environ = os.environ if environ is None else environ
        config = cls(**kwargs)
        raw = environ.get(SEED_ENV_VAR)
        if raw:
            try:
                config.with_seed(int(raw, 0))
            except ValueError:
                raise InputError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")
        return config


@dataclass
class SchemeCommandConfig(SchemeWalkConfig):
    generator: list[str] = field(default_factory=list)
    input_path: Optional[str] = None
    output_dir: str = "."
    orbits: str = "conjugation"
    orbit_path: Optional[str] = None


@dataclass
class IfsCommandConfig(SchemeWalkConfig):
    graph_path: Optional[str] = None
    tree_degree: Optional[int] = None
    cycle_length: Optional[int] = None
    depth: int = 4
    base: int = 0
    moments: int = 8
    output_dir: str = "."


@dataclass
class WalkCommandConfig(SchemeWalkConfig):
    kind: str = "grover"
    graph_path: Optional[str] = None
    tree_degree: Optional[int] = None
    steps: int = 0
    arc: Optional[tuple[int, int]] = None
    vacuum_split: bool = False
    coin: str = "hadamard"
    theta: float = 0.0
    theta1: float = 0.0
    theta2: float = 0.0
    position: int = 0
    coin_state: int = 0
    output_dir: str = "."
    format: str = "csv"


@dataclass
class FusionCommandConfig(SchemeWalkConfig):
    source: str = "ising"
    ring_path: Optional[str] = None
    krein_path: Optional[str] = None
    power: Optional[tuple[str, int]] = None
    trees: Optional[list[str]] = None
    total: Optional[str] = None
    qutrit: bool = False
    output_dir: str = "."


def resolve_config(config: Optional[SchemeWalkConfig]) -> SchemeWalkConfig:
    return config if config is not None else SchemeWalkConfig()
