"""
Command-line front end. Every subcommand writes a directory of artifacts.

Exit codes: 0 success, 1 input error, 2 verification failure, 3 tridiagonality
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import (
    FusionCommandConfig,
    IfsCommandConfig,
    SchemeCommandConfig,
    SchemeWalkConfig,
    WalkCommandConfig,
)
from .documents import (
    AnyonModelDocument,
    FusionRingDocument,
    GraphDocument,
    JacobiDocument,
    SchemeDocument,
    TensorDocument,
    VerificationDocument,
)
from .exceptions import (
    FusionAxiomError,
    InputError,
    MomentOverflowError,
    SchemeAxiomError,
    SchemeWalkError,
    SerializationError,
    TridiagonalityError,
)
from .fusion import (
    central_charge,
    format_multiset,
    fusion_power,
    fusion_ring_from_krein,
    fusion_tree_space,
    ising_model,
    qutrit_encoding,
    quantum_dimensions,
    total_quantum_dimension,
    verify_fusion_ring,
    verlinde_check,
)
from .graphs import Graph, cycle_graph, regular_tree, regular_tree_size
from .ifs import (
    jacobi_coefficients,
    moments_from_jacobi,
    quantum_decompose,
    stratify,
    vacuum_moments,
)
from .scheme_core import (
    AssociationScheme,
    build_complete_scheme,
    build_distance_scheme,
    build_grassmann,
    build_group_scheme,
    build_johnson,
    intersection_numbers,
    krein_parameters,
    primitive_idempotents,
    scheme_from_classes,
    verify_scheme,
)
from .serialization import (
    ARC_COLUMNS,
    LINE_COLUMNS,
    ORBIT_COLUMNS,
    arc_snapshot_rows,
    format_number,
    line_snapshot_rows,
    orbit_snapshot_rows,
    read_document,
    rows_to_csv,
    rows_to_document,
    write_document,
    write_text,
)
from .walks import (
    ArcState,
    LineState,
    grover_walk_run,
    line_coin,
    line_walk_run,
    split_step_run,
    stratum_distribution,
    tree_orbit_walk_run,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFICATION = 2
EXIT_TRIDIAGONAL = 3


def _load_group_table(path: str) -> list:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise SerializationError(f"Cannot read Cayley table {path}: {e}")
    table = payload.get("table") if isinstance(payload, dict) else payload
    if not isinstance(table, list):
        raise SerializationError(f"{path} holds no Cayley table")
    return table


def _load_orbits(path: Optional[str]) -> Optional[list]:
    if path is None:
        return None
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise SerializationError(f"Cannot read orbits {path}: {e}")
    return payload.get("orbits") if isinstance(payload, dict) else payload


def _build_scheme(config: SchemeCommandConfig) -> AssociationScheme:
    kind, *args = config.generator
    try:
        if kind == "johnson":
            v, k = (int(x) for x in args)
            return build_johnson(v, k, config=config)
        if kind == "grassmann":
            q, v, d = (int(x) for x in args)
            return build_grassmann(q, v, d, config=config)
        if kind == "complete":
            (n,) = (int(x) for x in args)
            return build_complete_scheme(n)
        if kind == "cycle":
            (n,) = (int(x) for x in args)
            return build_distance_scheme(cycle_graph(n))
    except ValueError:
        raise InputError(f"Bad arguments for '{kind}': {args}")
    if kind == "group":
        return build_group_scheme(
            _load_group_table(config.input_path),
            orbit_mode=config.orbits,
            orbits=_load_orbits(config.orbit_path),
        )
    raise InputError(f"Unknown scheme generator '{kind}'")


def run_scheme(config: SchemeCommandConfig) -> int:
    out = Path(config.output_dir)
    if config.generator[0] == "verify":
        document = read_document(config.input_path, SchemeDocument)
        report = verify_scheme(document.to_classes())
        write_document(out / "verification.json", VerificationDocument.from_report(report))
        if not report.passed:
            failed = report.failures()[0]
            print(f"scheme verification failed: {failed.name} at {failed.witness}", file=sys.stderr)
            return EXIT_VERIFICATION
        scheme = scheme_from_classes(document.to_classes(), family=document.family or "custom", params=document.params)
    else:
        scheme = _build_scheme(config)
        report = verify_scheme(scheme.classes)
        write_document(out / "verification.json", VerificationDocument.from_report(report))

    write_document(out / "scheme.json", SchemeDocument.from_scheme(scheme))
    write_document(out / "intersection_numbers.json", TensorDocument.from_intersection(intersection_numbers(scheme)))
    if scheme.commutative:
        spectral = primitive_idempotents(scheme, config=config)
        krein = krein_parameters(spectral, config=config)
        write_document(out / "krein.json", TensorDocument.from_krein(krein))
    else:
        logger.info("Scheme is not commutative; no Krein tensor written")
    return EXIT_OK


def _ifs_graph(config: IfsCommandConfig) -> Graph:
    if config.graph_path is not None:
        return read_document(config.graph_path, GraphDocument).to_graph(config)
    if config.tree_degree is not None:
        return regular_tree(config.tree_degree, config.depth, config=config)
    if config.cycle_length is not None:
        return cycle_graph(config.cycle_length)
    raise InputError("ifs needs --graph, --tree-degree or --cycle")


def run_ifs(config: IfsCommandConfig) -> int:
    out = Path(config.output_dir)
    graph = _ifs_graph(config)
    strat = stratify(graph, config.base)
    write_document(out / "stratification.json", {
        "base": strat.base,
        "sizes": list(strat.sizes),
        "strata": [list(s) for s in strat.strata],
        "unreachable": list(strat.unreachable),
    })

    decomposition = quantum_decompose(graph, strat)
    write_document(out / "decomposition.json", {
        "raising_edges": int(decomposition.raising.sum()),
        "diagonal_edges": int(decomposition.diagonal.sum() // 2),
        "residual_norm": float(abs(decomposition.residual).sum() ** 0.5),
    })

    try:
        jac = jacobi_coefficients(graph, strat, config=config)
    except TridiagonalityError as e:
        print(f"tridiagonality fails at stratum {e.stratum}: leakage {e.leakage:.3e}", file=sys.stderr)
        return EXIT_TRIDIAGONAL
    write_document(out / "jacobi.json", JacobiDocument.from_sequences(jac))

    try:
        moments = vacuum_moments(graph, config.base, config.moments)
        overflow = None
    except MomentOverflowError as e:
        moments, overflow = e.moments, e.overflow_at
    try:
        from_jacobi = moments_from_jacobi(jac, len(moments) - 1)
    except InputError as e:
        logger.warning(f"Moments from Jacobi data skipped: {e}")
        from_jacobi = None
    write_document(out / "moments.json", {
        "vacuum_moments": moments,
        "overflow_at": overflow,
        "from_jacobi": from_jacobi,
    })
    return EXIT_OK


def _walk_graph(config: WalkCommandConfig) -> Optional[Graph]:
    """None means the tree is too large to build and the orbit walk is used."""
    if config.graph_path is not None:
        return read_document(config.graph_path, GraphDocument).to_graph(config)
    if config.tree_degree is not None:
        depth = config.steps + 2
        if regular_tree_size(config.tree_degree, depth) > config.vertex_cap:
            return None
        return regular_tree(config.tree_degree, depth, config=config)
    raise InputError("grover walk needs --graph or --tree-degree")


def _emit_rows(config: WalkCommandConfig, columns, rows) -> None:
    out = Path(config.output_dir)
    if config.format == "csv":
        write_text(out / "walk.csv", rows_to_csv(columns, rows))
    else:
        write_document(out / "walk.json", rows_to_document(columns, rows))


def _run_grover(config: WalkCommandConfig) -> dict:
    """Without --arc the walk starts from the vacuum split: unit amplitude on (0, first neighbour)."""
    if config.vacuum_split and config.arc is not None:
        raise InputError("--arc and --vacuum-split are mutually exclusive")
    graph = _walk_graph(config)
    if graph is None:
        if config.arc not in (None, (0, 1)):
            raise InputError("Trees above the vertex cap only support the root arc (0, 1)")
        snapshots = tree_orbit_walk_run(config.tree_degree, config.steps + 2, config.steps, config=config)
        _emit_rows(config, ORBIT_COLUMNS, orbit_snapshot_rows(snapshots))
        return {
            "mode": "orbits",
            "norms": [format_number(s.norm_squared()) for s in snapshots],
            "stratum_masses": [[format_number(m) for m in s.distance_masses()] for s in snapshots],
        }

    if config.arc is not None:
        arc = tuple(config.arc)
    else:
        neighbours = graph.neighbors(0)
        if not neighbours:
            raise InputError("Vertex 0 has no arcs to split the vacuum onto")
        arc = (0, neighbours[0])
    initial = ArcState.from_arc(graph, arc, exact=True)
    snapshots = grover_walk_run(graph, initial, config.steps, config=config)
    _emit_rows(config, ARC_COLUMNS, arc_snapshot_rows(snapshots))
    strat = stratify(graph, arc[0])
    return {
        "mode": "arcs",
        "initial_arc": list(arc),
        "norms": [format_number(s.norm_squared()) for s in snapshots],
        "stratum_masses": [[format_number(m) for m in stratum_distribution(s, strat)] for s in snapshots],
    }


def _run_line(config: WalkCommandConfig) -> dict:
    initial = LineState.localized(config.position, config.coin_state)
    if config.kind == "split-step":
        snapshots = split_step_run(config.theta1, config.theta2, initial, config.steps, config=config)
    else:
        snapshots = line_walk_run(line_coin(config.coin, theta=config.theta), initial, config.steps, config=config)
    _emit_rows(config, LINE_COLUMNS, line_snapshot_rows(snapshots))
    return {
        "mode": config.kind,
        "norms": [s.total_probability() for s in snapshots],
        "windows": [list(s.window) for s in snapshots],
    }


def run_walk(config: WalkCommandConfig) -> int:
    if config.steps < 0:
        raise InputError(f"--steps must be non-negative, got {config.steps}")
    summary = _run_grover(config) if config.kind == "grover" else _run_line(config)
    write_document(Path(config.output_dir) / "summary.json", {"steps": config.steps, **summary})
    return EXIT_OK


def _load_fusion_source(path: str):
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise SerializationError(f"Cannot read {path}: {e}")
    model = AnyonModelDocument if isinstance(payload, dict) and "S" in payload else FusionRingDocument
    document = read_document(path, model)
    return document.to_model() if model is AnyonModelDocument else document.to_ring()


def run_fusion(config: FusionCommandConfig) -> int:
    out = Path(config.output_dir)

    if config.krein_path is not None:
        tensor = read_document(config.krein_path, TensorDocument)
        if not tensor.multiplicities:
            raise InputError(f"{config.krein_path} carries no multiplicities")
        verdict = fusion_ring_from_krein(tensor.to_krein(config), tensor.multiplicities, config=config)
        write_document(out / "fusion_report.json", {"krein": verdict.to_payload()})
        return EXIT_OK

    model = None
    if config.source == "ising":
        model = ising_model()
        ring = model.ring
    else:
        loaded = _load_fusion_source(config.ring_path)
        model = loaded if hasattr(loaded, "ring") else None
        ring = model.ring if model is not None else loaded

    report = verify_fusion_ring(ring)
    payload = {"labels": list(ring.labels), "verification": VerificationDocument.from_report(report).model_dump()}
    if not report.passed:
        write_document(out / "fusion_report.json", payload)
        failed = report.failures()[0]
        print(f"fusion ring fails {failed.name} at {failed.witness}", file=sys.stderr)
        return EXIT_VERIFICATION

    payload["quantum_dimensions"] = quantum_dimensions(ring).tolist()

    if config.power is not None:
        label, n = config.power
        payload["powers"] = [
            {"n": k, "decomposition": fusion_power(ring, label, k), "formatted": format_multiset(fusion_power(ring, label, k))}
            for k in range(1, n + 1)
        ]
    if config.trees is not None:
        space = fusion_tree_space(ring, config.trees, config.total or 0)
        payload["trees"] = {
            "inputs": list(space.inputs),
            "total": space.total,
            "dimension": space.dimension,
            "basis": [list(b) for b in space.basis],
            "multiplicities": list(space.multiplicities),
        }
    if config.qutrit:
        encoding = qutrit_encoding(ring)
        payload["qutrit"] = {
            "pair_charges": [list(s) for s in encoding.pair_charges],
            "tree_labels": [list(t) for t in encoding.tree_labels],
            "space_dimension": encoding.space.dimension,
        }

    status = EXIT_OK
    if model is not None:
        verlinde = verlinde_check(model, config=config)
        payload["verlinde"] = VerificationDocument.from_report(verlinde).model_dump()
        payload["total_quantum_dimension"] = total_quantum_dimension(model)
        payload["central_charge"] = central_charge(model)
        if not verlinde.passed:
            print(f"modular data fails {[c.name for c in verlinde.failures()]}", file=sys.stderr)
            status = EXIT_VERIFICATION

    write_document(out / "fusion_report.json", payload)
    return status


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got '{text}'")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance '{name}' is not a number: {value}")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common(*, nested: bool = False) -> argparse.ArgumentParser:
    """Shared options; nested copies default to SUPPRESS and keep values given before the subcommand."""

    def default(value):
        return argparse.SUPPRESS if nested else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=default("."), help="output directory")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=default(None), help="idempotent separation seed")
    common.add_argument("--tol", type=_tolerance, action="append", default=default([]), metavar="NAME=VALUE")
    common.add_argument("--vertex-cap", type=int, default=default(None))
    common.add_argument("-v", "--verbose", action="store_true", default=default(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="schemewalk", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    commands = parser.add_subparsers(dest="command", required=True)

    scheme = commands.add_parser("scheme", help="build and verify association schemes")
    generators = scheme.add_subparsers(dest="generator", required=True)
    johnson = generators.add_parser("johnson", parents=[common])
    johnson.add_argument("params", nargs=2, metavar=("V", "K"))
    grassmann = generators.add_parser("grassmann", parents=[common])
    grassmann.add_argument("params", nargs=3, metavar=("Q", "V", "D"))
    complete = generators.add_parser("complete", parents=[common])
    complete.add_argument("params", nargs=1, metavar="N")
    cycle = generators.add_parser("cycle", parents=[common])
    cycle.add_argument("params", nargs=1, metavar="N")
    group = generators.add_parser("group", parents=[common])
    group.add_argument("path", metavar="TABLE")
    group.add_argument("--orbits", choices=("conjugation", "trivial", "explicit"), default="conjugation")
    group.add_argument("--orbit-file", default=None)
    verify = generators.add_parser("verify", parents=[common])
    verify.add_argument("path", metavar="FILE")

    ifs = commands.add_parser("ifs", parents=[common], help="interacting Fock space data of a graph")
    ifs.add_argument("--graph", default=None)
    ifs.add_argument("--tree-degree", type=int, default=None)
    ifs.add_argument("--cycle", type=int, default=None)
    ifs.add_argument("--depth", type=int, default=4)
    ifs.add_argument("--base", type=int, default=0)
    ifs.add_argument("--moments", type=int, default=8)
    ifs.add_argument("--force-projection", action="store_true")

    walk = commands.add_parser("walk", help="quantum walks")
    kinds = walk.add_subparsers(dest="kind", required=True)
    grover = kinds.add_parser("grover", parents=[common])
    grover.add_argument("--graph", default=None)
    grover.add_argument("--tree-degree", type=int, default=None)
    grover.add_argument("--steps", type=int, default=0)
    grover.add_argument("--arc", type=int, nargs=2, default=None, metavar=("U", "V"))
    grover.add_argument("--vacuum-split", action="store_true")
    grover.add_argument("--format", choices=("csv", "json"), default="csv")
    line = kinds.add_parser("line", parents=[common])
    line.add_argument("--coin", choices=("hadamard", "identity", "rotation", "grover"), default="hadamard")
    line.add_argument("--theta", type=float, default=0.0)
    split = kinds.add_parser("split-step", parents=[common])
    split.add_argument("--theta1", type=float, default=0.0)
    split.add_argument("--theta2", type=float, default=0.0)
    for sub in (line, split):
        sub.add_argument("--steps", type=int, default=0)
        sub.add_argument("--position", type=int, default=0)
        sub.add_argument("--coin-state", type=int, choices=(0, 1), default=0)
        sub.add_argument("--format", choices=("csv", "json"), default="csv")

    fusion = commands.add_parser("fusion", parents=[common], help="fusion rings and anyon models")
    fusion.add_argument("--from-krein", dest="from_krein", default=None, metavar="TENSOR")
    sources = fusion.add_subparsers(dest="source", required=False)
    nested = _common(nested=True)
    ising = sources.add_parser("ising", parents=[nested])
    fusion_verify = sources.add_parser("verify", parents=[nested])
    fusion_verify.add_argument("path", metavar="FILE")
    krein = sources.add_parser("krein", parents=[nested])
    krein.add_argument("path", metavar="TENSOR")
    for sub in (ising, fusion_verify):
        sub.add_argument("--power", nargs=2, default=None, metavar=("LABEL", "N"))
        sub.add_argument("--trees", default=None, help="comma separated input labels")
        sub.add_argument("--total", default=None)
        sub.add_argument("--qutrit", action="store_true")
    return parser


def _apply_common(config: SchemeWalkConfig, args: argparse.Namespace) -> None:
    if getattr(args, "seed", None) is not None:
        config.with_seed(args.seed)
    if getattr(args, "vertex_cap", None) is not None:
        config.with_vertex_cap(args.vertex_cap)
    if getattr(args, "tol", None):
        config.with_tolerances(**dict(args.tol))


def config_from_args(args: argparse.Namespace) -> SchemeWalkConfig:
    out = getattr(args, "out", ".")
    if args.command == "scheme":
        config = SchemeCommandConfig.from_env(
            generator=[args.generator, *getattr(args, "params", [])],
            input_path=getattr(args, "path", None),
            output_dir=out,
            orbits=getattr(args, "orbits", "conjugation"),
            orbit_path=getattr(args, "orbit_file", None),
        )
    elif args.command == "ifs":
        config = IfsCommandConfig.from_env(
            graph_path=args.graph,
            tree_degree=args.tree_degree,
            cycle_length=args.cycle,
            depth=args.depth,
            base=args.base,
            moments=args.moments,
            output_dir=out,
        )
        config.with_force_projection(args.force_projection)
    elif args.command == "walk":
        config = WalkCommandConfig.from_env(
            kind=args.kind,
            graph_path=getattr(args, "graph", None),
            tree_degree=getattr(args, "tree_degree", None),
            steps=args.steps,
            arc=tuple(args.arc) if getattr(args, "arc", None) else None,
            vacuum_split=getattr(args, "vacuum_split", False),
            coin=getattr(args, "coin", "hadamard"),
            theta=getattr(args, "theta", 0.0),
            theta1=getattr(args, "theta1", 0.0),
            theta2=getattr(args, "theta2", 0.0),
            position=getattr(args, "position", 0),
            coin_state=getattr(args, "coin_state", 0),
            output_dir=out,
            format=args.format,
        )
    else:
        krein_path = args.from_krein or (args.path if args.source == "krein" else None)
        if krein_path is None and args.source is None:
            raise InputError("fusion needs a source: ising, verify FILE, krein FILE or --from-krein")
        power = None
        if getattr(args, "power", None):
            try:
                power = (args.power[0], int(args.power[1]))
            except ValueError:
                raise InputError(f"--power needs LABEL N, got {args.power}")
        trees = getattr(args, "trees", None)
        config = FusionCommandConfig.from_env(
            source=args.source or "krein",
            ring_path=getattr(args, "path", None),
            krein_path=krein_path,
            power=power,
            trees=[t.strip() for t in trees.split(",")] if trees else None,
            total=getattr(args, "total", None),
            qutrit=getattr(args, "qutrit", False),
            output_dir=out,
        )
    _apply_common(config, args)
    return config


RUNNERS = {
    SchemeCommandConfig: run_scheme,
    IfsCommandConfig: run_ifs,
    WalkCommandConfig: run_walk,
    FusionCommandConfig: run_fusion,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        return RUNNERS[type(config)](config)
    except (SchemeAxiomError, FusionAxiomError) as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
    except TridiagonalityError as e:
        print(f"tridiagonality fails at stratum {e.stratum}: {e}", file=sys.stderr)
        return EXIT_TRIDIAGONAL
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SchemeWalkError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
