"""Power-series coefficient containers and truncated sums with certified tails.

A :class:`CoefficientSequence` stores ``a_0 .. a_N`` explicitly and describes
everything beyond index ``N`` through a :class:`TailBound`:

* ``zero``       -- the series is a polynomial;
* ``geometric``  -- ``|a_n| <= c * q**n`` for ``n > N`` (``c >= 0``, ``0 <= q < 1``);
* ``exact``      -- ``a_n = c * r**n`` for ``n > N`` with complex ``c``, ``r`` and
  ``|r| <= 1``.  Möbius and half-plane extremal functions have this form, so
  their infinite sums are available in closed form.

Every summation returns a :class:`BoundedValue` whose ``err`` covers the
truncation only; floating point rounding is not tracked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "BoundedValue",
    "CoefficientSequence",
    "SeriesError",
    "TailBound",
    "area_functional",
    "eval_series",
    "eval_series_many",
    "majorant_sum",
    "refined_weight_sum",
    "square_sum",
]


class SeriesError(ValueError):
    """Raised when a sum cannot be evaluated or its tail cannot be certified."""


@dataclass(frozen=True)
class BoundedValue:
    """A value together with an absolute error radius.

    ``value`` is usually real; :func:`eval_series` returns complex values.
    """

    value: float | complex
    err: float = 0.0

    def __post_init__(self):
        if not self.err >= 0.0:
            raise ValueError(f"error radius must be nonnegative, got {self.err!r}")

    @property
    def lower(self) -> float:
        return self.value - self.err

    @property
    def upper(self) -> float:
        return self.value + self.err

    def __add__(self, other: BoundedValue | float) -> BoundedValue:
        if isinstance(other, BoundedValue):
            return BoundedValue(self.value + other.value, self.err + other.err)
        return BoundedValue(self.value + other, self.err)

    __radd__ = __add__

    def scaled(self, factor: float) -> BoundedValue:
        return BoundedValue(self.value * factor, self.err * abs(factor))

    def modulus(self) -> BoundedValue:
        """``|x|`` for the enclosed quantity (reverse triangle inequality)."""
        return BoundedValue(abs(self.value), self.err)

    def power(self, p: float) -> BoundedValue:
        """Apply ``x -> x**p`` to a nonnegative enclosure.

        The map is increasing on ``[0, inf)``, so the image of
        ``[max(0, v - e), v + e]`` is enclosed by the endpoint images.
        """
        v = float(self.value)
        if v < 0:
            raise ValueError("power() needs a nonnegative value")
        centre = v**p
        lo = max(v - self.err, 0.0) ** p
        hi = (v + self.err) ** p
        return BoundedValue(centre, max(hi - centre, centre - lo))

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return abs(x - self.value) <= self.err + slack

    def overlaps(self, other: BoundedValue, slack: float = 0.0) -> bool:
        return abs(self.value - other.value) <= self.err + other.err + slack

    @staticmethod
    def maximum(values: Sequence[BoundedValue]) -> BoundedValue:
        """Enclosure of ``max_j x_j`` given enclosures of each ``x_j``."""
        if not values:
            raise ValueError("maximum() of an empty sequence")
        lo = max(v.lower for v in values)
        hi = max(v.upper for v in values)
        return BoundedValue(0.5 * (lo + hi), 0.5 * (hi - lo))


@dataclass(frozen=True)
class TailBound:
    """Description of the coefficients beyond the stored ones."""

    kind: str = "zero"
    c: complex = 0.0
    q: complex = 0.0

    def __post_init__(self):
        if self.kind == "zero":
            return
        if self.kind == "geometric":
            c, q = self.c, self.q
            if isinstance(c, complex) or isinstance(q, complex):
                raise ValueError("geometric tail bound takes real c and q")
            if not (math.isfinite(c) and c >= 0):
                raise ValueError(f"geometric tail needs c >= 0, got {c!r}")
            if not 0 <= q < 1:
                raise ValueError(f"geometric tail needs 0 <= q < 1, got {q!r}")
            return
        if self.kind == "exact":
            if not (cmath_isfinite(self.c) and cmath_isfinite(self.q)):
                raise ValueError("exact tail parameters must be finite")
            if abs(self.q) > 1.0:
                raise ValueError(f"exact tail ratio must satisfy |r| <= 1, got {self.q!r}")
            return
        raise ValueError(f"unknown tail kind {self.kind!r}")

    @classmethod
    def zero(cls) -> TailBound:
        return cls("zero")

    @classmethod
    def geometric(cls, c: float, q: float) -> TailBound:
        c, q = float(c), float(q)
        if c == 0.0 or q == 0.0:
            # c * q**n vanishes for every n >= 1
            return cls("zero")
        return cls("geometric", c, q)

    @classmethod
    def exact(cls, c: complex, r: complex) -> TailBound:
        c, r = complex(c), complex(r)
        if c == 0 or r == 0:
            return cls("zero")
        return cls("exact", c, r)

    @property
    def is_exact(self) -> bool:
        return self.kind != "geometric"

    @property
    def modulus_ratio(self) -> float:
        return abs(self.q)

    @property
    def modulus_scale(self) -> float:
        return abs(self.c)

    def to_json(self) -> dict:
        if self.kind == "zero":
            return {"type": "zero"}
        if self.kind == "geometric":
            return {"type": "geometric", "c": self.c, "q": self.q}
        return {
            "type": "exact",
            "c": [self.c.real, self.c.imag],
            "r": [self.q.real, self.q.imag],
        }

    @classmethod
    def from_json(cls, data: dict) -> TailBound:
        kind = data.get("type")
        if kind == "zero":
            return cls.zero()
        if kind == "geometric":
            return cls.geometric(float(data["c"]), float(data["q"]))
        if kind == "exact":
            return cls.exact(_complex_from_pair(data["c"]), _complex_from_pair(data["r"]))
        raise ValueError(f"unknown tail type {kind!r}")


def cmath_isfinite(x: complex) -> bool:
    x = complex(x)
    return math.isfinite(x.real) and math.isfinite(x.imag)


def _complex_from_pair(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(float(re), float(im))


class CoefficientSequence:
    """Finite coefficient vector ``a_0 .. a_N`` plus a tail description.

    Instances are immutable; the coefficient array is read-only.
    """

    __slots__ = ("_coeffs", "_tail")

    def __init__(self, coeffs, tail: TailBound | None = None):
        arr = np.array(coeffs, dtype=complex).reshape(-1)
        if arr.size == 0:
            raise ValueError("a coefficient sequence needs at least a_0")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        self._coeffs = arr
        self._tail = tail if tail is not None else TailBound.zero()

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def tail(self) -> TailBound:
        return self._tail

    @property
    def N(self) -> int:
        """Index of the last stored coefficient."""
        return self._coeffs.size - 1

    def __len__(self) -> int:
        return self._coeffs.size

    def __getitem__(self, n: int) -> complex:
        return self.coefficient(n)

    def __repr__(self) -> str:
        return f"CoefficientSequence(N={self.N}, tail={self._tail.kind})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientSequence):
            return NotImplemented
        return self._tail == other._tail and np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self):
        return hash((self._coeffs.tobytes(), self._tail))

    def coefficient(self, n: int) -> complex:
        """Coefficient ``a_n``; beyond ``N`` only known for zero or exact tails."""
        if n < 0:
            raise IndexError("negative index")
        if n <= self.N:
            return complex(self._coeffs[n])
        if self._tail.kind == "zero":
            return 0j
        if self._tail.kind == "exact":
            return self._tail.c * self._tail.q**n
        raise SeriesError(f"a_{n} lies in a bound-only tail")

    def extended(self, n_max: int) -> CoefficientSequence:
        """Materialise coefficients up to ``n_max`` (zero or exact tails only)."""
        if n_max <= self.N:
            return self
        if self._tail.kind == "geometric":
            raise SeriesError("cannot extend a sequence whose tail is only bounded")
        extra = [self.coefficient(n) for n in range(self.N + 1, n_max + 1)]
        return CoefficientSequence(np.concatenate([self._coeffs, extra]), self._tail)

    def map_coeffs(self, factor: complex, drop_constant: bool = False) -> CoefficientSequence:
        """Multiply every coefficient (and the tail) by ``factor``."""
        factor = complex(factor)
        coeffs = self._coeffs * factor
        if drop_constant:
            coeffs = coeffs.copy()
            coeffs[0] = 0
        t = self._tail
        if t.kind == "geometric":
            tail = TailBound.geometric(t.c * abs(factor), t.q)
        elif t.kind == "exact":
            tail = TailBound.exact(t.c * factor, t.q)
        else:
            tail = t
        return CoefficientSequence(coeffs, tail)

    def is_schur_consistent(self, tol: float = 1e-12) -> bool:
        """Necessary condition for ``sup|h| <= 1``: ``|a_0| <= 1`` and
        ``|a_n| <= 1 - |a_0|**2`` for the stored ``n >= 1``."""
        mod = np.abs(self._coeffs)
        if mod[0] > 1 + tol:
            return False
        return bool(np.all(mod[1:] <= 1 - mod[0] ** 2 + tol))

    def to_json(self) -> dict:
        return {
            "coeffs": [[float(c.real), float(c.imag)] for c in self._coeffs],
            "tail": self._tail.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> CoefficientSequence:
        if "coeffs" not in data:
            raise ValueError("sequence JSON needs a 'coeffs' array")
        coeffs = [_complex_from_pair(p) for p in data["coeffs"]]
        tail = TailBound.from_json(data.get("tail", {"type": "zero"}))
        return cls(coeffs, tail)


# ---------------------------------------------------------------------------
# closed-form geometric pieces
# ---------------------------------------------------------------------------

def _geom_tail(x: float | complex, m: int):
    """sum_{n >= m} x**n"""
    return x**m / (1 - x)


def _ngeom_tail(x: float | complex, m: int):
    """sum_{n >= m} n x**n"""
    return x**m * (m / (1 - x) + x / (1 - x) ** 2)


def _dgeom_tail(x: float | complex, m: int):
    """sum_{n >= m} n x**(n-1)"""
    if m == 0:
        m = 1
    return x ** (m - 1) * (m / (1 - x) + x / (1 - x) ** 2)


def _check_radius(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho < 1.0:
        raise SeriesError(f"radius must satisfy 0 <= rho < 1, got {rho!r}")
    return rho


def _check_ratio(s: CoefficientSequence, x: float) -> None:
    if s.tail.kind != "zero" and s.tail.modulus_ratio * x >= 1.0:
        raise SeriesError("tail ratio times radius >= 1; truncation cannot be certified")


def _powers(rho: float, lo: int, hi: int) -> np.ndarray:
    return rho ** np.arange(lo, hi + 1, dtype=float)


# ---------------------------------------------------------------------------
# sums
# ---------------------------------------------------------------------------

def majorant_sum(s: CoefficientSequence, rho: float, start: int = 0) -> BoundedValue:
    """``sum_{n >= start} |a_n| rho**n``."""
    rho = _check_radius(rho)
    if start < 0:
        raise SeriesError("start index must be nonnegative")
    _check_ratio(s, rho)
    head = 0.0
    if start <= s.N:
        head = float(np.abs(s.coeffs[start:]) @ _powers(rho, start, s.N))
    m = max(start, s.N + 1)
    t = s.tail
    if t.kind == "zero" or rho == 0.0:
        return BoundedValue(head)
    x = t.modulus_ratio * rho
    tail = t.modulus_scale * _geom_tail(x, m)
    if t.kind == "exact":
        return BoundedValue(head + tail)
    return BoundedValue(head, tail)


def square_sum(s: CoefficientSequence, rho: float, start: int = 1) -> BoundedValue:
    """``sum_{n >= start} |a_n|**2 rho**(2n)``."""
    rho = _check_radius(rho)
    _check_ratio(s, rho)
    head = 0.0
    if start <= s.N:
        head = float(np.abs(s.coeffs[start:]) ** 2 @ _powers(rho * rho, start, s.N))
    t = s.tail
    if t.kind == "zero" or rho == 0.0:
        return BoundedValue(head)
    x = (t.modulus_ratio * rho) ** 2
    tail = t.modulus_scale**2 * _geom_tail(x, max(start, s.N + 1))
    if t.kind == "exact":
        return BoundedValue(head + tail)
    return BoundedValue(head, tail)


def area_functional(s: CoefficientSequence, rho: float) -> BoundedValue:
    """``S_rho(h) / pi = sum_{n >= 1} n |a_n|**2 rho**(2n)``."""
    rho = _check_radius(rho)
    _check_ratio(s, rho)
    head = 0.0
    if s.N >= 1:
        n = np.arange(1, s.N + 1, dtype=float)
        head = float((n * np.abs(s.coeffs[1:]) ** 2) @ _powers(rho * rho, 1, s.N))
    t = s.tail
    if t.kind == "zero" or rho == 0.0:
        return BoundedValue(head)
    x = (t.modulus_ratio * rho) ** 2
    tail = t.modulus_scale**2 * _ngeom_tail(x, max(1, s.N + 1))
    if t.kind == "exact":
        return BoundedValue(head + tail)
    return BoundedValue(head, tail)


def refined_weight_sum(s: CoefficientSequence, rho: float) -> BoundedValue:
    """``(1/(1+|a_0|) + rho/(1-rho)) * sum_{n >= 1} |a_n|**2 rho**(2n)``."""
    rho = _check_radius(rho)
    weight = 1.0 / (1.0 + abs(s.coeffs[0])) + rho / (1.0 - rho)
    return square_sum(s, rho, start=1).scaled(weight)


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------

def eval_series_many(s: CoefficientSequence, zs, derivative: bool = False):
    """Evaluate ``h`` (or ``h'``) at an array of points.

    Returns ``(values, errs)`` as numpy arrays of the same shape as ``zs``.
    """
    zs = np.asarray(zs, dtype=complex)
    r = np.abs(zs)
    if np.any(r >= 1.0):
        raise SeriesError("evaluation points must lie in the open unit disk")
    _check_ratio(s, float(r.max(initial=0.0)))
    coeffs = s.coeffs
    if derivative:
        coeffs = P.polyder(coeffs) if s.N >= 1 else np.zeros(1, dtype=complex)
    values = P.polyval(zs, coeffs)
    errs = np.zeros(zs.shape, dtype=float)
    t = s.tail
    m = s.N + 1
    if t.kind == "exact":
        y = t.q * zs
        if derivative:
            values = values + t.c * t.q * _dgeom_tail(y, m)
        else:
            values = values + t.c * _geom_tail(y, m)
    elif t.kind == "geometric":
        y = t.q * r
        if derivative:
            errs = t.c * t.q * _dgeom_tail(y, m)
        else:
            errs = t.c * _geom_tail(y, m)
    return values, errs


def eval_series(s: CoefficientSequence, z: complex, derivative: bool = False) -> BoundedValue:
    """Evaluate ``h(z)`` (or ``h'(z)`` with ``derivative=True``) for ``|z| < 1``."""
    values, errs = eval_series_many(s, np.array([complex(z)]), derivative=derivative)
    return BoundedValue(complex(values[0]), float(errs[0]))
