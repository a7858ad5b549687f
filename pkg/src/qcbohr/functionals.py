"""Left-hand sides of the Bohr-type inequalities and their verdicts.

Each functional is identified by a short id:

========  ==================================================================
F-T1      majorant(h) + majorant(g) + lambda(K) S_rho(h)/pi
F-T3      F-T1 + refined square sum
F-TT1     |h(z)| + |h'(z)| rho + sum_{n>=2} |a_n| rho^n + majorant(g)
F-T7      |h(z)|^2 + |h'(z)| rho + sum_{n>=2} |a_n| rho^n + majorant(g)
F-T2      a0^s + |h(z) - a0|^p + sum_{n>=1} |a_n| rho^n + majorant(g)
F-T4      |h(z)|^p + sum_{n>=1} |a_n| rho^n + refined + majorant(g)
F-T6      |h(z)| + |h'(z)| rho + sum_{n>=2} |a_n| rho^n + refined
          + sum_{n>=2} |b_n| rho^n
F-TF      majorant(h) + sum_{n>=2} |b_n| rho^n
========  ==================================================================

The bound is always 1: inputs must already satisfy ``sup|h| <= 1`` (or, for
F-T2, ``Re h < 1`` with ``h(0) = a0`` in ``[0, 1)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .coeffseq import (
    BoundedValue,
    area_functional,
    eval_series_many,
    majorant_sum,
    refined_weight_sum,
)
from .mappings import (
    ExtremalSpec,
    Family,
    HarmonicMapping,
    QuasiconformalParams,
    make_extremal,
)
from . import radii

__all__ = [
    "FUNCTIONAL_IDS",
    "FunctionalError",
    "FunctionalSpec",
    "InequalityReport",
    "MissingB1Zero",
    "NotNormalized",
    "PointOffCircle",
    "PointRule",
    "RadiusOutOfLemmaRange",
    "Verdict",
    "check",
    "evaluate",
    "evaluate_extremal",
    "extremal_closed_form",
    "evaluate_points",
]

FUNCTIONAL_IDS = ("F-T1", "F-T3", "F-TT1", "F-T7", "F-T2", "F-T4", "F-T6", "F-TF")
HOLD_SLACK = 1e-12
LEMMA4_RANGE = 1.0 / 3.0


class FunctionalError(ValueError):
    pass


class NotNormalized(FunctionalError):
    pass


class MissingB1Zero(FunctionalError):
    pass


class PointOffCircle(FunctionalError):
    pass


class RadiusOutOfLemmaRange(FunctionalError):
    pass


class Verdict(str, Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PointRule:
    """Where on ``|z| = rho`` the functional is evaluated."""

    kind: str = "grid"
    n: int = 64

    def __post_init__(self):
        if self.kind not in ("grid", "radial-neg", "radial-pos"):
            raise ValueError(f"unknown point rule {self.kind!r}")
        if self.kind == "grid" and self.n < 1:
            raise ValueError("grid needs at least one point")

    @classmethod
    def parse(cls, text: str) -> PointRule:
        if text.startswith("grid"):
            _, _, n = text.partition(":")
            return cls("grid", int(n) if n else 64)
        return cls(text)

    def points(self, rho: float) -> np.ndarray:
        if self.kind == "radial-neg":
            return np.array([-rho], dtype=complex)
        if self.kind == "radial-pos":
            return np.array([rho], dtype=complex)
        theta = 2 * np.pi * np.arange(self.n) / self.n
        return rho * np.exp(1j * theta)

    def __str__(self) -> str:
        return f"grid:{self.n}" if self.kind == "grid" else self.kind


RADIAL_NEG = PointRule("radial-neg")


@dataclass(frozen=True)
class FunctionalSpec:
    id: str
    qc: QuasiconformalParams = field(default_factory=lambda: QuasiconformalParams.from_K(1.0))
    p: float | None = None
    s: int = 1
    point_rule: PointRule = field(default_factory=PointRule)

    def __post_init__(self):
        if self.id not in FUNCTIONAL_IDS:
            raise FunctionalError(f"unknown functional {self.id!r}")
        if self.qc.infinite:
            raise FunctionalError("functionals need finite K")
        if self.id == "F-T2":
            p = 1 if self.p is None else self.p
            if p < 1 or int(p) != p:
                raise FunctionalError("F-T2 takes a positive integer p")
            if self.s not in (1, 2):
                raise FunctionalError("F-T2 takes s in {1, 2}")
            object.__setattr__(self, "p", int(p))
        elif self.id == "F-T4":
            p = 1.0 if self.p is None else float(self.p)
            if not 0 < p <= 2:
                raise FunctionalError("F-T4 takes p in (0, 2]")
            object.__setattr__(self, "p", p)

    @classmethod
    def make(cls, id: str, K: float = 1.0, p: float | None = None, s: int = 1,
             point_rule: PointRule | str | None = None) -> FunctionalSpec:
        if isinstance(point_rule, str):
            point_rule = PointRule.parse(point_rule)
        return cls(id, QuasiconformalParams.from_K(K), p, s, point_rule or PointRule())

    @property
    def K(self) -> float:
        return self.qc.K

    @property
    def needs_b1_zero(self) -> bool:
        return self.id in ("F-T6", "F-TF")

    @property
    def half_plane(self) -> bool:
        return self.id == "F-T2"

    def rho0(self) -> float:
        """Sharp radius of the theorem behind this functional."""
        return _rho0(self.id, self.qc.K, self.p)

    @property
    def extremal_family(self) -> Family:
        if self.half_plane:
            return Family.HALF_PLANE
        if self.needs_b1_zero:
            return Family.MOBIUS_Z_DILATATION
        return Family.MOBIUS_PAIR

    def label(self) -> str:
        extra = ""
        if self.id == "F-T2":
            extra = f"(s={self.s},p={self.p})"
        elif self.id == "F-T4":
            extra = f"(p={self.p:g})"
        return f"{self.id}{extra}"


@lru_cache(maxsize=None)
def _rho0(id: str, K: float, p: float | None) -> float:
    if id in ("F-T1", "F-T3"):
        return radii.radius("E-T1", K=K)
    eq_id = {
        "F-TT1": "E-TT1",
        "F-T7": "E-T7",
        "F-T2": "E-T2",
        "F-T4": "E-T4",
        "F-T6": "E-T6",
        "F-TF": "E-TF-sharp",
    }[id]
    return radii.radius(eq_id, K=K, p=p if id in ("F-T2", "F-T4") else None)


@dataclass(frozen=True)
class InequalityReport:
    lhs: BoundedValue
    bound: float
    margin: float
    verdict: Verdict
    spec: str = ""
    rho: float = 0.0
    z: complex | None = None

    @classmethod
    def from_lhs(cls, lhs: BoundedValue, bound: float = 1.0, **kw) -> InequalityReport:
        if lhs.value + lhs.err <= bound + HOLD_SLACK:
            verdict = Verdict.HOLDS
        elif lhs.value - lhs.err > bound:
            verdict = Verdict.VIOLATED
        else:
            verdict = Verdict.INCONCLUSIVE
        return cls(lhs, bound, bound - lhs.value, verdict, **kw)

    def to_json(self) -> dict:
        out = {
            "spec": self.spec,
            "rho": self.rho,
            "lhs": self.lhs.value,
            "lhs_err": self.lhs.err,
            "bound": self.bound,
            "margin": self.margin,
            "verdict": self.verdict.value,
        }
        if self.z is not None:
            out["z"] = [self.z.real, self.z.imag]
        return out


# ---------------------------------------------------------------------------
# preconditions
# ---------------------------------------------------------------------------

def _check_preconditions(spec: FunctionalSpec, f: HarmonicMapping, rho: float) -> None:
    if not 0.0 <= rho < 1.0:
        raise FunctionalError(f"radius must lie in [0, 1), got {rho!r}")
    if spec.needs_b1_zero and not f.b1_zero:
        raise MissingB1Zero(f"{spec.id} needs a mapping with b_1 = 0")
    if spec.id == "F-T6" and rho > LEMMA4_RANGE:
        raise RadiusOutOfLemmaRange(f"{spec.id} is only defined for rho <= 1/3")
    mod = np.abs(f.h.coeffs)
    if spec.half_plane:
        a0 = complex(f.h.coeffs[0])
        if abs(a0.imag) > 1e-12 or not 0.0 <= a0.real < 1.0:
            raise NotNormalized("F-T2 needs h(0) = a0 real in [0, 1)")
        if np.any(mod[1:] > 2 * (1 - a0.real) + 1e-12):
            raise NotNormalized("coefficients exceed 2(1 - a0); Re h < 1 cannot hold")
    elif not f.h.is_schur_consistent():
        raise NotNormalized("coefficients violate |a_n| <= 1 - |a_0|^2; sup|h| > 1")


def _check_on_circle(zs: np.ndarray, rho: float) -> None:
    if np.any(np.abs(np.abs(zs) - rho) > 1e-12 * max(1.0, rho)):
        raise PointOffCircle(f"evaluation points must satisfy |z| = {rho}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _power(values: np.ndarray, errs: np.ndarray, p: float):
    centre = values**p
    lo = np.maximum(values - errs, 0.0) ** p
    hi = (values + errs) ** p
    return centre, np.maximum(hi - centre, centre - lo)


def _base(spec: FunctionalSpec, f: HarmonicMapping, rho: float) -> BoundedValue:
    """The z-independent part of the functional."""
    h, g, sid = f.h, f.g, spec.id
    if sid in ("F-T1", "F-T3"):
        out = majorant_sum(h, rho) + majorant_sum(g, rho, 1)
        out = out + area_functional(h, rho).scaled(radii.lambda_T1(spec.K))
        if sid == "F-T3":
            out = out + refined_weight_sum(h, rho)
        return out
    if sid in ("F-TT1", "F-T7"):
        return majorant_sum(h, rho, 2) + majorant_sum(g, rho, 1)
    if sid == "F-T2":
        a0 = float(h.coeffs[0].real)
        return BoundedValue(a0**spec.s) + majorant_sum(h, rho, 1) + majorant_sum(g, rho, 1)
    if sid == "F-T4":
        return majorant_sum(h, rho, 1) + refined_weight_sum(h, rho) + majorant_sum(g, rho, 1)
    if sid == "F-T6":
        return majorant_sum(h, rho, 2) + refined_weight_sum(h, rho) + majorant_sum(g, rho, 2)
    return majorant_sum(h, rho) + majorant_sum(g, rho, 2)


def _point_terms(spec: FunctionalSpec, f: HarmonicMapping, rho: float, zs: np.ndarray):
    sid = spec.id
    if sid in ("F-T1", "F-T3", "F-TF"):
        return np.zeros(zs.shape), np.zeros(zs.shape)
    hv, he = eval_series_many(f.h, zs)
    mod = np.abs(hv)
    if sid == "F-T2":
        return _power(np.abs(hv - f.h.coeffs[0].real), he, spec.p)
    if sid == "F-T4":
        return _power(mod, he, spec.p)
    dv, de = eval_series_many(f.h, zs, derivative=True)
    if sid == "F-T7":
        vals, errs = _power(mod, he, 2)
    else:
        vals, errs = mod, he
    return vals + np.abs(dv) * rho, errs + de * rho


def evaluate_points(spec: FunctionalSpec, f: HarmonicMapping, rho: float, zs) -> list[BoundedValue]:
    """Functional values at several points of ``|z| = rho``."""
    rho = float(rho)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    _check_preconditions(spec, f, rho)
    _check_on_circle(zs, rho)
    base = _base(spec, f, rho)
    vals, errs = _point_terms(spec, f, rho, zs)
    return [BoundedValue(float(base.value + v), float(base.err + e)) for v, e in zip(vals, errs)]


def evaluate(spec: FunctionalSpec, f: HarmonicMapping, rho: float, z: complex) -> BoundedValue:
    return evaluate_points(spec, f, rho, [z])[0]


def check(spec: FunctionalSpec, f: HarmonicMapping, rho: float,
          point_rule: PointRule | str | None = None) -> InequalityReport:
    """Evaluate on the point rule and compare the (sampled) supremum with 1."""
    rule = point_rule or spec.point_rule
    if isinstance(rule, str):
        rule = PointRule.parse(rule)
    zs = rule.points(float(rho))
    values = evaluate_points(spec, f, rho, zs)
    best = int(np.argmax([v.upper for v in values]))
    lhs = values[0] if len(values) == 1 else BoundedValue.maximum(values)
    return InequalityReport.from_lhs(lhs, spec=spec.label(), rho=float(rho), z=complex(zs[best]))


def evaluate_extremal(spec: FunctionalSpec, a: float, rho: float, phase: complex = 1.0,
                      N: int = 64, tol: float = 1e-10, max_terms: int = 1 << 16):
    """Functional of the designated extremal family at ``z = -rho``.

    Stored terms are doubled until the certified error drops below ``tol``.
    Returns ``(report, N_used)``.
    """
    ext = ExtremalSpec(spec.extremal_family, a, spec.qc, phase)
    while True:
        f = make_extremal(ext, N)
        report = check(spec, f, rho, RADIAL_NEG)
        if report.lhs.err < tol or N >= max_terms:
            return report, N
        N *= 2


def extremal_closed_form(spec: FunctionalSpec, a: float, rho: float) -> float:
    """Closed-form value of the extremal functional at ``z = -rho`` (``lam = 1``).

    Written directly from the geometric-series sums of the extremal families,
    independently of the coefficient machinery; used as a test oracle.
    """
    k, sid = spec.qc.k, spec.id
    r = rho
    if sid == "F-T2":
        x = 2 * (1 - a) * r / (1 - r)
        return a**spec.s + x**spec.p + (1 + k) * x
    mob = (a + r) / (1 + a * r)
    dmob = (1 - a * a) / (1 + a * r) ** 2
    maj1 = (1 - a * a) * r / (1 - a * r)
    maj2 = (1 - a * a) * a * r * r / (1 - a * r)
    area = (1 - a * a) ** 2 * r * r / (1 - a * a * r * r) ** 2
    refined = (1 / (1 + a) + r / (1 - r)) * (1 - a * a) ** 2 * r * r / (1 - a * a * r * r)
    if sid in ("F-T6", "F-TF"):
        y = a * r
        if y < 1e-3:
            # y + (1 - y) log(1 - y) = sum_{n>=2} y^n / (n (n - 1)); divide by a^2 termwise
            series = sum(y ** (n - 2) / (n * (n - 1)) for n in range(2, 8))
            gz = k * (1 - a * a) * r * r * series / (1 - y)
        else:
            gz = k * (1 - a * a) * (y + (1 - y) * math.log1p(-y)) / (a * a * (1 - y))
    if sid == "F-T1":
        return a + (1 + k) * maj1 + radii.lambda_T1(spec.K) * area
    if sid == "F-T3":
        return a + (1 + k) * maj1 + refined + radii.lambda_T1(spec.K) * area
    if sid == "F-TT1":
        return mob + dmob * r + maj2 + k * maj1
    if sid == "F-T7":
        return mob**2 + dmob * r + maj2 + k * maj1
    if sid == "F-T4":
        return mob**spec.p + (1 + k) * maj1 + refined
    if sid == "F-T6":
        return mob + dmob * r + maj2 + refined + gz
    return a + maj1 + gz
