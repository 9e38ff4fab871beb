"""Kernel backend selection.

The kernels where tight compiled loops beat numpy (fused Adam, the
sequential GAE scan, pairwise overlap tests) exist twice: a Cython
extension and a pure-numpy fallback with identical contracts. Affine
layers and activations go through BLAS/SIMD numpy in every backend, where
a hand-compiled loop only loses. Selection happens once at import:

  SOCIALGF_BACKEND=auto      compiled if built, else python (default)
  SOCIALGF_BACKEND=compiled  require the extension, fail otherwise
  SOCIALGF_BACKEND=python    force the numpy fallback

Both backends are individually bit-deterministic; cross-backend results can
differ in the last ulps (summation order), so reproducibility guarantees
hold per backend. The active name is exported as BACKEND and recorded in
artifact metadata.
"""

import os

from socialgf.backend import pykernels
from socialgf.errors import ConfigurationError

ACT_IDENTITY = pykernels.ACT_IDENTITY
ACT_RELU = pykernels.ACT_RELU
ACT_TANH = pykernels.ACT_TANH

_requested = os.environ.get("SOCIALGF_BACKEND", "auto")
if _requested not in ("auto", "compiled", "python"):
    raise ConfigurationError(
        f"SOCIALGF_BACKEND must be auto, compiled, or python; got {_requested!r}")

if _requested == "python":
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from socialgf import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ConfigurationError(
                "SOCIALGF_BACKEND=compiled but the socialgf._ckernels extension "
                "is not built; run `python3 setup.py build_ext --inplace`")
        _impl = pykernels
        BACKEND = "python"

# affine layers are BLAS-backed and activations SIMD-vectorized in numpy;
# hand-compiled versions of either only lose (see benchmarks/bench_kernels.py).
# The compiled extension carries the kernels where tight loops win: the
# sequential GAE scan, the pairwise overlap test, and the fused Adam update.
affine_forward = pykernels.affine_forward
affine_backward = pykernels.affine_backward
act_forward = pykernels.act_forward
act_backward = pykernels.act_backward
adam_update = _impl.adam_update
gae_scan = _impl.gae_scan
overlap_pairs = _impl.overlap_pairs


def available_backends():
    names = ["python"]
    try:
        from socialgf import _ckernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the kernel module for an explicit backend name (for benchmarks)."""
    if name == "python":
        return pykernels
    if name == "compiled":
        from socialgf import _ckernels
        return _ckernels
    raise ConfigurationError(f"unknown backend {name!r}")
