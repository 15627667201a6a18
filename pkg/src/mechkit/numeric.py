"""Global numeric mode and scalar/vector helpers.

Two modes are supported process-wide:

* ``"float"`` (default): binary64 arithmetic with a 1e-9 comparison tolerance.
* ``"exact"``: ``fractions.Fraction`` arithmetic with zero tolerance, so that
  constraints that bind at optima compare exactly.

The mode is read from the ``MECHKIT_NUMERIC`` environment variable at import
time and can be changed with :func:`set_mode` or the :func:`numeric_mode`
context manager.  Values are normalized into the active mode at construction
time; mixing objects built under different modes is not supported.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, float, Fraction]
Vector = tuple  # k-tuple of Number

EXACT = "exact"
FLOAT = "float"

FLOAT_TOL = 1e-9


def _initial_mode() -> str:
    mode = os.environ.get("MECHKIT_NUMERIC", FLOAT)
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"MECHKIT_NUMERIC must be 'exact' or 'float', got {mode!r}")
    return mode


_mode = _initial_mode()


def get_mode() -> str:
    return _mode


def set_mode(mode: str) -> None:
    global _mode
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"numeric mode must be 'exact' or 'float', got {mode!r}")
    _mode = mode


def exact_mode() -> bool:
    return _mode == EXACT


@contextmanager
def numeric_mode(mode: str):
    """Temporarily switch the global numeric mode."""
    previous = get_mode()
    set_mode(mode)
    try:
        yield
    finally:
        set_mode(previous)


def num(x) -> Number:
    """Normalize a scalar into the active numeric mode.

    In exact mode floats are read through their shortest decimal repr, so
    ``num(0.1)`` is ``Fraction(1, 10)``.
    """
    if exact_mode():
        if isinstance(x, Fraction):
            return x
        if isinstance(x, bool):
            return Fraction(int(x))
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite value {x!r}")
            return Fraction(Decimal(repr(x)))
        if isinstance(x, (str, Decimal)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to a rational")
    value = float(x)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {x!r}")
    return value


def zero() -> Number:
    return Fraction(0) if exact_mode() else 0.0


def one() -> Number:
    return Fraction(1) if exact_mode() else 1.0


def tolerance() -> Number:
    return Fraction(0) if exact_mode() else FLOAT_TOL


def close(a: Number, b: Number, tol: Number | None = None) -> bool:
    if tol is None:
        tol = tolerance()
    return abs(a - b) <= tol


def leq(a: Number, b: Number, tol: Number | None = None) -> bool:
    if tol is None:
        tol = tolerance()
    return a <= b + tol


def geq(a: Number, b: Number, tol: Number | None = None) -> bool:
    return leq(b, a, tol)


def active_cutoff(vmax: Number) -> Number:
    """Threshold below the maximum at which a piece still counts as active."""
    if exact_mode():
        return vmax
    return vmax - max(FLOAT_TOL, FLOAT_TOL * abs(vmax))


# ---------------------------------------------------------------------------
# vectors (plain tuples, so they work under both modes)
# ---------------------------------------------------------------------------


def vec(xs: Iterable) -> Vector:
    return tuple(num(x) for x in xs)


def zero_vec(k: int) -> Vector:
    z = zero()
    return tuple(z for _ in range(k))


def dot(u: Sequence, v: Sequence) -> Number:
    if len(u) == 1 and len(v) == 1:
        return u[0] * v[0]
    return sum(a * b for a, b in zip(u, v, strict=True))


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c: Number, u: Sequence) -> Vector:
    return tuple(c * a for a in u)


def norm_sq(u: Sequence) -> Number:
    return sum(a * a for a in u)


def norm(u: Sequence) -> float:
    return math.sqrt(float(norm_sq(u)))


def vjoin(u: Sequence, v: Sequence) -> Vector:
    """Componentwise maximum."""
    return tuple(max(a, b) for a, b in zip(u, v, strict=True))


def vmeet(u: Sequence, v: Sequence) -> Vector:
    """Componentwise minimum."""
    return tuple(min(a, b) for a, b in zip(u, v, strict=True))


def vec_leq(u: Sequence, v: Sequence, tol: Number | None = None) -> bool:
    """Componentwise u <= v within tolerance."""
    if tol is None:
        tol = tolerance()
    return all(a <= b + tol for a, b in zip(u, v, strict=True))


def is_nonnegative(u: Sequence, tol: Number | None = None) -> bool:
    if tol is None:
        tol = tolerance()
    return all(a >= -tol for a in u)
