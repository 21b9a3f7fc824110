import numpy as np

from .exceptions import InputError


def frozen(array: np.ndarray) -> np.ndarray:
    """Return a read-only view so values handed out stay immutable."""
    view = array.view()
    view.setflags(write=False)
    return view


def as_binary_matrix(data, what: str = "matrix") -> np.ndarray:
    """Coerce to a square int64 0/1 matrix, rejecting anything else."""
    try:
        arr = np.asarray(data)
    except (TypeError, ValueError) as e:
        raise InputError(f"{what} is not array-like: {e}")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"{what} must be square, got shape {arr.shape}")
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.number):
        raise InputError(f"{what} must be numeric, got dtype {arr.dtype}")
    bad = np.argwhere((arr != 0) & (arr != 1))
    if bad.size:
        x, y = (int(v) for v in bad[0])
        raise InputError(f"{what} has entry {arr[x, y]!r} at ({x}, {y}), expected 0 or 1")
    return arr.astype(np.int64)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def integrality_deviation(values: np.ndarray) -> np.ndarray:
    return np.abs(values - np.rint(values))
