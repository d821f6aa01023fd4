"""Team-lattice kernels: the compiled extension when importable, numpy otherwise.

Set ``PREFTEAM_PURE_PYTHON=1`` to force the numpy backend.
"""

import os

from prefteam._kernels import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("PREFTEAM_PURE_PYTHON"):
    try:
        from prefteam._kernels import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"

eval_program = backend.eval_program
or_cover = backend.or_cover
or_partition = backend.or_partition
or_union = backend.or_union
max_subteam = backend.max_subteam
strict_down_exists = backend.strict_down_exists
strict_up_exists = backend.strict_up_exists


def available_backends():
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["compiled"] = compiled_backend
    return out
