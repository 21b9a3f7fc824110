from typing import Union

import numpy as np
from numpy.typing import NDArray

IntMatrix = NDArray[np.int64]
FloatMatrix = NDArray[np.float64]
ComplexMatrix = NDArray[np.complex128]
Arc = tuple[int, int]
Label = Union[int, str]
