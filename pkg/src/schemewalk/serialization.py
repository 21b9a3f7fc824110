import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence, TypeVar, Union

from pydantic import BaseModel, ValidationError

from .exceptions import SerializationError
from .walks import ArcState, LineState, TreeOrbitState

T = TypeVar("T", bound=BaseModel)

Document = Union[BaseModel, dict, list]

ARC_COLUMNS = ("step", "source", "target", "re", "im", "prob")
LINE_COLUMNS = ("step", "position", "coin", "re", "im")
ORBIT_COLUMNS = ("step", "side", "level", "direction", "arcs", "re", "im", "prob")


def encode_document(payload: Document) -> bytes:
    """JSON bytes with sorted keys and a trailing newline, so equal inputs give equal bytes."""
    if isinstance(payload, BaseModel):
        try:
            payload = payload.model_dump(mode="json", by_alias=True)
        except (TypeError, ValueError) as e:
            raise SerializationError(f"Failed to dump {type(payload).__name__}: {e}")
    if not isinstance(payload, (dict, list)):
        raise SerializationError(f"Unsupported payload type: {type(payload)}")
    try:
        return (json.dumps(payload, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n").encode("utf-8")
    except (TypeError, ValueError) as e:
        raise SerializationError(f"Failed to encode {type(payload).__name__}: {e}")


def decode_document(data: bytes, model: type[T]) -> T:
    try:
        text = data.decode("utf-8", errors="strict")
    except UnicodeDecodeError as e:
        raise SerializationError(f"Document is not UTF-8: {e}")
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise SerializationError(f"Invalid {model.__name__}: {e}")


def read_document(path: Union[str, Path], model: type[T]) -> T:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise SerializationError(f"Cannot read {path}: {e}")
    return decode_document(data, model)


def write_document(path: Union[str, Path], payload: Document) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_document(payload))
    return path


def format_number(value: Any) -> str:
    """Exact values as "p/q" (or "p"), floats via repr."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _split(value: Any) -> tuple[str, str]:
    if isinstance(value, Fraction):
        return str(value), "0"
    value = complex(value)
    return repr(value.real), repr(value.imag)


def _prob(value: Any) -> str:
    if isinstance(value, Fraction):
        return str(value * value)
    return repr(abs(complex(value)) ** 2)


def rows_to_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def rows_to_document(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> dict:
    return {"columns": list(columns), "rows": [list(row) for row in rows]}


def arc_snapshot_rows(snapshots: Iterable[ArcState]) -> list[tuple]:
    """Rows step-major, then arc order; `step` counts applications of U."""
    rows = []
    for state in snapshots:
        for (u, v), amp in zip(state.graph.arcs, state.amplitudes):
            re, im = _split(amp)
            rows.append((state.step, u, v, re, im, _prob(amp)))
    return rows


def line_snapshot_rows(snapshots: Iterable[LineState]) -> list[tuple]:
    rows = []
    for state in snapshots:
        for position, pair in zip(state.positions, state.amplitudes):
            for coin, amp in enumerate(pair):
                rows.append((state.step, int(position), coin, repr(float(amp.real)), repr(float(amp.imag))))
    return rows


def orbit_snapshot_rows(snapshots: Iterable[TreeOrbitState]) -> list[tuple]:
    """One row per arc orbit; `arcs` is the number of tree arcs sharing the amplitude."""
    rows = []
    for state in snapshots:
        k1 = state.branching
        for side in (0, 1):
            for level, amp in enumerate(state.up[side]):
                re, im = _split(amp)
                rows.append((state.step, side, level, "up", k1**level, re, im, _prob(amp)))
            for level, amp in enumerate(state.down[side]):
                re, im = _split(amp)
                rows.append((state.step, side, level, "down", k1 ** (level + 1), re, im, _prob(amp)))
    return rows


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
