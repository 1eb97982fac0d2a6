"""Backend selection for the hot bit kernels.

The compiled extension is preferred when importable; the pure-Python
fallback is bit-exact and used otherwise. Set ``NRPDCCH_BACKEND=python``
(or ``c``) to force a choice; ``use()`` switches at runtime, which the
benchmark and the parity tests rely on.
"""

from __future__ import annotations

import os

from . import _ref_kernels

_BACKENDS = {"python": _ref_kernels}
try:
    from . import _ckernels

    _BACKENDS["c"] = _ckernels
except ImportError:
    _ckernels = None

_active = _ref_kernels


def available() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def backend_module(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; available: {available()}") from None


def use(name: str) -> None:
    global _active
    _active = backend_module(name)


def current() -> str:
    return _active.BACKEND_NAME


def gold_sequence(c_init, length, offset=1600):
    return _active.gold_sequence(c_init, length, offset)


def crc_remainder(bits, poly):
    return _active.crc_remainder(bits, poly)


_requested = os.environ.get("NRPDCCH_BACKEND")
if _requested:
    use(_requested)
elif "c" in _BACKENDS:
    use("c")
