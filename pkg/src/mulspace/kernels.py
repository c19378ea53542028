"""Backend selection for the inner loops.

The compiled extension ``mulspace._ckernels`` is used when it imports;
otherwise, or when ``MULSPACE_PURE_PYTHON=1`` is set, the numpy versions in
``mulspace._pykernels`` are used.  ``BACKEND`` names the active choice.
"""

import os

from . import _pykernels

if os.environ.get("MULSPACE_PURE_PYTHON", "") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

smooth_step = _impl.smooth_step
bump_profile = _impl.bump_profile
lattice_power_sums_1d = _impl.lattice_power_sums_1d
lattice_power_sums_2d = _impl.lattice_power_sums_2d
masked_shift_l1_1d = _impl.masked_shift_l1_1d
masked_shift_l1_2d = _impl.masked_shift_l1_2d


def implementations():
    """Return ``{name: module}`` for every importable backend."""
    impls = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        impls["compiled"] = _ckernels
    return impls
