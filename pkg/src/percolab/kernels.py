"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python mirror when the
extension is missing or when ``PERCOLAB_PURE_PYTHON=1`` is set.  Both
backends expose the same functions and produce bit-identical results.
"""

from __future__ import annotations

import os

if os.environ.get("PERCOLAB_PURE_PYTHON", "") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND

components_site = _impl.components_site
components_bond = _impl.components_bond
nz_reach_site = _impl.nz_reach_site
nz_wrap_site = _impl.nz_wrap_site
nz_face_site = _impl.nz_face_site
nz_reach_bond = _impl.nz_reach_bond
nz_wrap_bond = _impl.nz_wrap_bond
nz_face_bond = _impl.nz_face_bond
