"""Dense float64 tensor constructors with finiteness enforced at the boundary.

Everything internal is a plain contiguous float64 ndarray; these helpers are
the single place where external values (configs, files, user input) become
tensors, so NaN/Inf never enters a computation unnoticed.
"""

import numpy as np


def dense(values, shape=None):
    """Build a C-contiguous float64 array, rejecting NaN/Inf.

    If shape is given, the value count must match it exactly.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        expected = int(np.prod(shape)) if shape else 1
        if arr.size != expected:
            raise ValueError(
                f"shape {shape} needs {expected} values, got {arr.size}")
        arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError("tensor values must be finite (NaN/Inf rejected)")
    return arr


def check_finite(arr, what="tensor"):
    """Raise ValueError if arr contains NaN/Inf; return arr unchanged."""
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    return arr
