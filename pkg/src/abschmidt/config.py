"""Numerical tolerances shared by every module.

All thresholds live in a single frozen record so that a run is reproducible
from its provenance block alone. Overrides are scoped with :func:`override`,
which is backed by a context variable and therefore safe under threads.
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass
from typing import Iterator

DIM_CAP = 16


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10
    unitarity: float = 1e-9
    trace: float = 1e-10
    psd: float = 1e-10
    pure_norm: float = 1e-12
    jacobi_offdiag: float = 1e-14
    schmidt_cutoff: float = 1e-10
    majorization: float = 1e-10
    det: float = 1e-10
    p3_slack: float = 1e-12
    purity_slack: float = 1e-12
    normalizer: float = 1e-12
    witness: float = 1e-10
    covariance: float = 1e-9
    detection: float = 1e-10
    kraus: float = 1e-9
    priors: float = 1e-12
    opt_gap: float = 1e-4

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT = Tolerances()
_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar("tolerances", default=DEFAULT)


def get() -> Tolerances:
    return _current.get()


@contextlib.contextmanager
def override(**changes: float) -> Iterator[Tolerances]:
    """Temporarily replace selected tolerances, e.g. ``override(det=1e-8)``."""
    unknown = set(changes) - {f.name for f in dataclasses.fields(Tolerances)}
    if unknown:
        raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
    token = _current.set(dataclasses.replace(_current.get(), **changes))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
