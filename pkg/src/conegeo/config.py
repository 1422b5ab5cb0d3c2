"""Numerical tolerances shared by every module.

Defaults are tuned for double precision; :func:`override` swaps in new
values for the duration of a ``with`` block (the CLI ``--tol KEY=VAL`` flag
uses it).
"""
from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10       # relative to ||H||
    unitary: float = 1e-10    # ||u*u - id||, relative to ||u||^2
    recon: float = 1e-9       # relative spectral reconstruction
    eps_pd: float = 1e-12     # min eig > eps_pd * max eig
    eps_inv: float = 1e-12    # smallest singular value, relative to largest
    group: float = 1e-8       # element equality in group closure
    fix: float = 1e-8         # fixed-equation residual
    nullspace: float = 1e-9   # relative singular-value threshold
    unitarize: float = 1e-7
    split: float = 1e-8
    cc: float = 1e-6          # circumcenter radius tolerance
    sim: float = 1e-6


_current = Tolerances()


def tol() -> Tolerances:
    return _current


def set_tolerances(**kw) -> Tolerances:
    global _current
    _current = dataclasses.replace(_current, **kw)
    return _current


@contextlib.contextmanager
def override(**kw):
    global _current
    saved = _current
    _current = dataclasses.replace(_current, **kw)
    try:
        yield _current
    finally:
        _current = saved


def parse_overrides(items) -> dict:
    """Parse ``["group=1e-7", ...]`` into a kwargs dict, rejecting unknown keys."""
    names = {f.name for f in dataclasses.fields(Tolerances)}
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValueError(f"bad tolerance override {item!r}; known keys: {sorted(names)}")
        out[key] = float(val)
    return out
