"""Radius equations and sharp constants, with bracketed root finding.

Every K-dependent residual is written in terms of ``k = (K - 1)/(K + 1)`` so
that ``K = inf`` (``k = 1``) is just another parameter value; the identities
``4K/(K+1) = 2(1 + k)`` and ``K/(K+1) = (1 + k)/2`` are used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mappings import QuasiconformalParams

__all__ = [
    "CATALOG_IDS",
    "CatalogError",
    "LimitReport",
    "NoSignChange",
    "NonMonotoneDetected",
    "RadiusEquation",
    "RadiusResult",
    "catalog",
    "closed_form",
    "lambda_T1",
    "limit_consistency",
    "radius",
    "solve",
]

SQRT2_M1 = math.sqrt(2.0) - 1.0
GOLDEN_M1 = (math.sqrt(5.0) - 1.0) / 2.0
NEAR_ONE = 1.0 - 1e-9
PI2_6_M1 = math.sqrt(math.pi**2 / 6.0 - 1.0)


class CatalogError(ValueError):
    pass


class NoSignChange(ArithmeticError):
    pass


class NonMonotoneDetected(ArithmeticError):
    pass


@dataclass(frozen=True)
class RadiusEquation:
    id: str
    residual: Callable[[float], float]
    lo: float
    hi: float
    increasing: bool
    K: float = 1.0
    p: float | None = None
    N: int | None = None
    a0: float | None = None

    @property
    def k(self) -> float:
        return QuasiconformalParams.from_K(self.K).k

    @property
    def bracket(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def __call__(self, rho: float) -> float:
        return self.residual(rho)


@dataclass(frozen=True)
class RadiusResult:
    id: str
    rho0: float
    residual_at_root: float
    bracket_width: float
    method: str = "bisection"


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def _tt1(k):
    return lambda r: (1 - r) * (r * r + 2 * r - 1) + 2 * r * (1 + r) ** 2 * (k + r)


def _t7(k):
    return lambda r: (1 - r) * (1 - r * r - r) - r * (1 + r) ** 2 * (r + k)


def _t6(k):
    def f(r):
        return (
            2 * r**4 + 3 * r**3 + r * r + 3 * r - 1
            + 2 * k * (1 + r) ** 2 * (r + (1 - r) * math.log1p(-r))
        )
    return f


def _t1(k):
    return lambda r: 2 * (1 + k) * r / (1 - r) - 1


def _t2(k, p):
    return lambda r: (2 * r / (1 - r)) ** p + 2 * (1 + k) * r / (1 - r) - 1


def _t4(k, p):
    return lambda r: p * (1 - r) ** 2 - 2 * (1 + k) * r * (1 + r)


def _tf_sharp(k):
    return lambda r: 2 * (1 + k) * r / (1 - r) + 2 * k * math.log1p(-r) - 1


def _tf_nonsharp(k):
    def f(r):
        return r / (1 - r) + k * r * r * math.sqrt((1 + r * r) / (1 - r * r) ** 3) * PI2_6_M1 - 0.5
    return f


def _c1(r):
    return 2 * r**4 + 5 * r**3 + 5 * r**2 + 5 * r - 1


def _c2(r):
    return r**4 + 2 * r**3 + 3 * r**2 + 3 * r - 1


CATALOG_IDS = (
    "E-T1",
    "E-TT1",
    "E-T7",
    "E-T2",
    "E-T4",
    "E-T6",
    "E-TF-sharp",
    "E-TF-nonsharp",
    "E-C1",
    "E-C2",
    "E-G8",
    "E-BOHR",
    "E-E2",
    "E-A",
    "E-A2",
    "E-C",
    "E-D",
)

K_DEPENDENT = ("E-T1", "E-TT1", "E-T7", "E-T2", "E-T4", "E-T6", "E-TF-sharp", "E-TF-nonsharp", "E-E2")


def catalog(id: str, K: float = 1.0, p: float | None = None, N: int | None = None,
            a0: float | None = None) -> RadiusEquation:
    """Look up a radius equation.

    ``p`` is required for ``E-T2`` (positive integer) and ``E-T4`` (``0 < p <= 2``);
    ``N`` for the Bohr-Rogosinski equations ``E-A``/``E-A2``; ``a0`` for ``E-D``.
    """
    if id not in CATALOG_IDS:
        raise CatalogError(f"unknown equation id {id!r}")
    try:
        qc = QuasiconformalParams.from_K(K)
    except ValueError as exc:
        raise CatalogError(str(exc)) from None
    k = qc.k
    K = qc.K

    def eq(residual, lo, hi, increasing, **extra):
        return RadiusEquation(id, residual, lo, hi, increasing, K=K, **extra)

    if id in ("E-T2", "E-T4"):
        if p is None:
            raise CatalogError(f"{id} needs the exponent p")
        p = float(p)
        if id == "E-T2" and (p < 1 or p != int(p)):
            raise CatalogError("E-T2 takes a positive integer p")
        if id == "E-T4" and not 0 < p <= 2:
            raise CatalogError("E-T4 takes p in (0, 2]")
    if id in ("E-A", "E-A2"):
        if N is None or N < 1 or int(N) != N:
            raise CatalogError(f"{id} needs a positive integer N")
        N = int(N)

    if id == "E-T1":
        return eq(_t1(k), 0.0, NEAR_ONE, True)
    if id == "E-TT1":
        return eq(_tt1(k), 0.0, SQRT2_M1, True)
    if id == "E-T7":
        return eq(_t7(k), 0.0, GOLDEN_M1, False)
    if id == "E-T2":
        return eq(_t2(k, p), 0.0, NEAR_ONE, True, p=p)
    if id == "E-T4":
        return eq(_t4(k, p), 0.0, 1.0, False, p=p)
    if id == "E-T6":
        return eq(_t6(k), 0.0, 1.0 / 3.0, True)
    if id == "E-TF-sharp":
        return eq(_tf_sharp(k), 0.0, NEAR_ONE, True)
    if id == "E-TF-nonsharp":
        return eq(_tf_nonsharp(k), 0.0, NEAR_ONE, True)
    if id == "E-C1":
        return eq(_c1, 0.0, SQRT2_M1, True)
    if id == "E-C2":
        return eq(_c2, 0.0, GOLDEN_M1, True)
    if id == "E-G8":
        return eq(_t6(1.0), 0.0, 1.0 / 3.0, True)
    if id == "E-BOHR":
        return eq(lambda r: 3 * r - 1, 0.0, 1.0, True)
    if id == "E-E2":
        # (K+1)/(3K+1) = 1/(2 + k)
        return eq(lambda r: (2 + k) * r - 1, 0.0, 1.0, True)
    if id == "E-A":
        return eq(lambda r: 2 * (1 + r) * r**N - (1 - r) ** 2, 0.0, 1.0, True, N=N)
    if id == "E-A2":
        return eq(lambda r: (1 + r) * r**N - (1 - r) ** 2, 0.0, 1.0, True, N=N)
    if id == "E-C":
        return eq(lambda r: 2 * r * r + 3 * r - 1, 0.0, 1.0, True)
    # E-D
    if a0 is None or not 0 <= a0 <= 1:
        raise CatalogError("E-D needs |a0| in [0, 1]")
    return eq(lambda r: (2 + a0) * r - 1, 0.0, 1.0, True, a0=float(a0))


def lambda_T1(K: float) -> float:
    """Sharp area coefficient ``8K^2(3K+1)^2 / ((5K+1)^2 (K+1)^2)``."""
    if math.isinf(K):
        return 72.0 / 25.0
    if not K >= 1:
        raise CatalogError("K must be >= 1")
    return 8 * K * K * (3 * K + 1) ** 2 / ((5 * K + 1) ** 2 * (K + 1) ** 2)


def closed_form(id: str, K: float = 1.0, p: float | None = None, N: int | None = None,
                a0: float | None = None) -> float | None:
    """Closed-form root when the equation has one, else ``None``."""
    eq = catalog(id, K=K, p=p, N=N, a0=a0)
    k = eq.k
    if id == "E-T1":
        return 1.0 / (2 * k + 3)
    if id == "E-T4":
        c = 2 * (1 + k)
        # smaller root of (p - c) r^2 - (2p + c) r + p = 0, cancellation-free
        return 2 * eq.p / ((2 * eq.p + c) + math.sqrt(c * c + 8 * eq.p * c))
    if id == "E-BOHR":
        return 1.0 / 3.0
    if id == "E-E2":
        return 1.0 / (2 + k)
    if id == "E-C":
        return (math.sqrt(17.0) - 3.0) / 4.0
    if id == "E-D":
        return 1.0 / (2 + eq.a0)
    if id == "E-A" and N == 1:
        # 2(1 + r) r = (1 - r)^2  <=>  r^2 + 4r - 1 = 0
        return math.sqrt(5.0) - 2.0
    return None


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _check_monotone(eq: RadiusEquation, samples: int = 100) -> None:
    xs = np.linspace(eq.lo, eq.hi, samples)
    ys = np.array([eq.residual(float(x)) for x in xs])
    d = np.diff(ys)
    scale = max(1.0, float(np.max(np.abs(ys))))
    tol = 1e-13 * scale
    bad = d < -tol if eq.increasing else d > tol
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonMonotoneDetected(
            f"{eq.id}: residual not {'increasing' if eq.increasing else 'decreasing'} "
            f"between {xs[i]:.6g} and {xs[i + 1]:.6g}"
        )


def solve(eq: RadiusEquation, width: float = 1e-13) -> RadiusResult:
    """Bisection on the catalog bracket, then one secant polish inside it."""
    lo, hi = eq.lo, eq.hi
    flo, fhi = eq.residual(lo), eq.residual(hi)
    if flo == 0.0:
        return RadiusResult(eq.id, lo, 0.0, 0.0)
    if fhi == 0.0:
        return RadiusResult(eq.id, hi, 0.0, 0.0)
    if flo * fhi > 0:
        raise NoSignChange(f"{eq.id}: residual has the same sign at {lo} and {hi}")
    _check_monotone(eq)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = eq.residual(mid)
        if fmid == 0.0:
            return RadiusResult(eq.id, mid, 0.0, 0.0)
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    root = 0.5 * (lo + hi)
    froot = eq.residual(root)
    method = "bisection"
    if fhi != flo:
        cand = lo - flo * (hi - lo) / (fhi - flo)
        if lo <= cand <= hi:
            fc = eq.residual(cand)
            if abs(fc) < abs(froot):
                root, froot, method = cand, fc, "bisection+secant"
    return RadiusResult(eq.id, root, froot, hi - lo, method)


def radius(id: str, K: float = 1.0, p: float | None = None, N: int | None = None,
           a0: float | None = None) -> float:
    """Root of a catalog equation; closed form when available."""
    cf = closed_form(id, K=K, p=p, N=N, a0=a0)
    if cf is not None:
        return cf
    return solve(catalog(id, K=K, p=p, N=N, a0=a0)).rho0


# ---------------------------------------------------------------------------
# K -> infinity consistency
# ---------------------------------------------------------------------------

# (equation, limit id, sign relating them at k = 1)
LIMIT_PAIRS = {
    "E-TT1": ("E-C1", 1.0),
    "E-T7": ("E-C2", -1.0),
    "E-T6": ("E-G8", 1.0),
}


@dataclass(frozen=True)
class LimitReport:
    id: str
    limit_id: str
    sign: float
    max_deviation: float
    points: int
    ok: bool


def limit_consistency(id: str, points: int = 100, tol: float = 1e-12) -> LimitReport:
    """Compare an equation at ``k = 1`` with its ``K -> inf`` limit equation pointwise."""
    if id not in LIMIT_PAIRS:
        raise CatalogError(f"{id!r} has no K -> infinity limit equation")
    limit_id, sign = LIMIT_PAIRS[id]
    eq = catalog(id, K=math.inf)
    lim = catalog(limit_id)
    hi = min(eq.hi, lim.hi)
    xs = np.linspace(0.0, hi, points)
    dev = max(abs(eq.residual(float(x)) - sign * lim.residual(float(x))) for x in xs)
    return LimitReport(id, limit_id, sign, float(dev), points, dev <= tol)
