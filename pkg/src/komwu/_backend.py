"""Selects the kernel implementation: compiled extension or pure fallback.

The default is the compiled ``komwu._core`` extension when it imported
successfully, otherwise the pure numpy/Python twin. The environment variable
``KOMWU_BACKEND`` (``auto`` | ``pure`` | ``compiled``) overrides the choice,
and callers can request a specific implementation via :func:`get_backend`
(used by the ``bench`` CLI to time both).
"""

import os

from . import _pure

try:
    from . import _core
except ImportError:
    _core = None

HAVE_COMPILED = _core is not None


def get_backend(name="auto"):
    """Return the kernel implementation module for ``name``.

    ``auto`` resolves to the compiled extension when available.
    """
    if name in (None, "auto"):
        return _core if HAVE_COMPILED else _pure
    if name == "pure":
        return _pure
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled backend requested but the "
                               "komwu._core extension is not available")
        return _core
    raise ValueError(f"unknown backend {name!r} "
                     "(expected auto, pure, or compiled)")


def backend_name(impl=None):
    impl = impl if impl is not None else DEFAULT
    return "compiled" if impl is _core else "pure"


DEFAULT = get_backend(os.environ.get("KOMWU_BACKEND", "auto"))
