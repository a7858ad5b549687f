"""Harmonic mappings ``f = h + conj(g)``, the extremal families and test samplers.

The extremal families are

* ``MobiusPair``         ``h = (a - z)/(1 - a z)``, ``g = lam k (h - a)``;
* ``HalfPlane``          ``h = a + 2(1 - a) z/(1 + z)``, ``g = lam k (h - a)``;
* ``MobiusZDilatation``  ``h = (a - z)/(1 - a z)``, ``g' = lam k z h'``.

For ``HalfPlane`` the sign of ``h - a`` is chosen so that ``Re h < 1`` on the
disk; ``|A_n| = 2(1 - a)`` either way.

Random samplers draw Schur-class functions as convex combinations of rotated
disk automorphisms and half-plane functions as ``1 - p`` with ``p`` a convex
combination of Carathéodory kernels ``(1 + u z)/(1 - u z)``, ``|u| <= 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .coeffseq import (
    CoefficientSequence,
    TailBound,
    eval_series_many,
)

__all__ = [
    "DilatationMode",
    "ExtremalSpec",
    "Family",
    "HalfPlaneSample",
    "HarmonicMapping",
    "MappingError",
    "QuasiconformalParams",
    "SchurSample",
    "attach_dilatation",
    "draw_half_plane",
    "draw_schur",
    "make_extremal",
    "multiply_series",
    "sample_schur",
]

DEFAULT_TERMS = 64
# Below this centre the closed-form tail constants (1 - a^2)/a overflow; the
# tail is then bounded with this larger ratio instead, which stays sound.
TINY_CENTER = 1e-150


class MappingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# quasiconformality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiconformalParams:
    """Quasiconformality constant ``K >= 1`` and dilatation bound ``k = (K-1)/(K+1)``.

    ``K = inf`` (``k = 1``) is representable for the limiting radius
    equations only; a :class:`HarmonicMapping` needs ``k < 1``.
    """

    K: float
    k: float

    def __post_init__(self):
        if not self.K >= 1.0:
            raise MappingError(f"K must be >= 1, got {self.K!r}")
        if not 0.0 <= self.k <= 1.0:
            raise MappingError(f"k must lie in [0, 1], got {self.k!r}")
        if (self.k == 1.0) != math.isinf(self.K):
            raise MappingError("k = 1 exactly when K is infinite")

    @classmethod
    def from_K(cls, K: float) -> QuasiconformalParams:
        K = float(K)
        if math.isinf(K) and K > 0:
            return cls(K, 1.0)
        if not K >= 1.0:
            raise MappingError(f"K must be >= 1, got {K!r}")
        return cls(K, (K - 1.0) / (K + 1.0))

    @classmethod
    def from_k(cls, k: float) -> QuasiconformalParams:
        k = float(k)
        if k == 1.0:
            return cls(math.inf, 1.0)
        if not 0.0 <= k < 1.0:
            raise MappingError(f"k must lie in [0, 1), got {k!r}")
        return cls((1.0 + k) / (1.0 - k), k)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.K)


# ---------------------------------------------------------------------------
# mappings
# ---------------------------------------------------------------------------

def _dilatation_grid(n_theta: int = 32, n_r: int = 8, r_max: float = 0.95) -> np.ndarray:
    radii = r_max * np.arange(1, n_r + 1) / n_r
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


@dataclass(frozen=True, eq=False)
class HarmonicMapping:
    """``f = h + conj(g)`` with ``g(0) = 0`` and dilatation bounded by ``qc.k``."""

    h: CoefficientSequence
    g: CoefficientSequence
    qc: QuasiconformalParams
    b1_zero: bool = False

    def __post_init__(self):
        if self.qc.k >= 1.0:
            raise MappingError("a mapping needs k < 1")
        if abs(self.g.coeffs[0]) != 0.0:
            raise MappingError("g must have no constant term")
        if self.b1_zero and self.g.N >= 1 and abs(self.g.coeffs[1]) != 0.0:
            raise MappingError("b1_zero mapping has b_1 != 0")

    @property
    def k(self) -> float:
        return self.qc.k

    def dilatation_violation(self, tol: float = 1e-12) -> float:
        """Largest certified excess of ``|g'| - k|h'|`` on a 32x8 polar grid
        (``|z| <= 0.95``); ``<= 0`` means the sampled check passed."""
        zs = _dilatation_grid()
        hv, he = eval_series_many(self.h, zs, derivative=True)
        gv, ge = eval_series_many(self.g, zs, derivative=True)
        lower_g = np.abs(gv) - ge
        upper_h = np.abs(hv) + he
        return float(np.max(lower_g - self.k * upper_h - tol))

    def check_dilatation(self, tol: float = 1e-12) -> None:
        excess = self.dilatation_violation(tol)
        if excess > 0:
            raise MappingError(f"|g'| exceeds k|h'| by {excess:.3e} on the sample grid")

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "g": self.g.to_json(),
            "k": self.qc.k,
            "b1_zero": self.b1_zero,
        }

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> HarmonicMapping:
        try:
            h = CoefficientSequence.from_json(data["h"])
            g = CoefficientSequence.from_json(data["g"])
            k = float(data["k"])
        except KeyError as exc:
            raise MappingError(f"mapping JSON is missing {exc.args[0]!r}") from None
        f = cls(h, g, QuasiconformalParams.from_k(k), bool(data.get("b1_zero", False)))
        if check:
            f.check_dilatation()
        return f


# ---------------------------------------------------------------------------
# extremal families
# ---------------------------------------------------------------------------

class Family(str, Enum):
    MOBIUS_PAIR = "mobius"
    HALF_PLANE = "halfplane"
    MOBIUS_Z_DILATATION = "mobius-z"


@dataclass(frozen=True)
class ExtremalSpec:
    family: Family
    a: float
    qc: QuasiconformalParams
    phase: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not 0.0 <= self.a < 1.0:
            raise MappingError(f"extremal parameter a must lie in [0, 1), got {self.a!r}")
        if abs(abs(self.phase) - 1.0) > 1e-12:
            raise MappingError("phase must be unimodular")


def mobius_sequence(a: float, N: int, rotation: complex = 1.0) -> CoefficientSequence:
    """Coefficients of ``rotation * (a - z)/(1 - a z)``."""
    n = np.arange(1, N + 1)
    coeffs = np.empty(N + 1, dtype=complex)
    coeffs[0] = a
    coeffs[1:] = -(1 - a * a) * np.power(a, n - 1, dtype=float)
    if a == 0.0:
        tail = TailBound.zero()
    elif a < TINY_CENTER:
        # |A_n| = (1 - a^2) a^(n-1) <= (1 - a^2) q^(n-1) with q = TINY_CENTER
        tail = TailBound.geometric((1 - a * a) / TINY_CENTER, TINY_CENTER)
    else:
        tail = TailBound.exact(-(1 - a * a) / a, a)
    return CoefficientSequence(coeffs, tail).map_coeffs(rotation)


def half_plane_sequence(a: float, N: int) -> CoefficientSequence:
    """Coefficients of ``a + 2(1 - a) z/(1 + z)``: ``A_n = 2(1 - a)(-1)**(n+1)``."""
    coeffs = np.empty(N + 1, dtype=complex)
    coeffs[0] = a
    coeffs[1:] = 2 * (1 - a) * (-1.0) ** (np.arange(1, N + 1) + 1)
    return CoefficientSequence(coeffs, TailBound.exact(-2 * (1 - a), -1.0))


def make_extremal(spec: ExtremalSpec, N: int = DEFAULT_TERMS) -> HarmonicMapping:
    if N < 2:
        raise MappingError("extremal mappings need N >= 2")
    a, k, lam = spec.a, spec.qc.k, complex(spec.phase)
    if spec.qc.infinite:
        raise MappingError("extremal mappings need finite K")
    if spec.family is Family.HALF_PLANE:
        h = half_plane_sequence(a, N)
        g = h.map_coeffs(lam * k, drop_constant=True)
        return HarmonicMapping(h, g, spec.qc)
    h = mobius_sequence(a, N)
    if spec.family is Family.MOBIUS_PAIR:
        g = h.map_coeffs(lam * k, drop_constant=True)
        return HarmonicMapping(h, g, spec.qc)
    n = np.arange(2, N + 1)
    b = np.zeros(N + 1, dtype=complex)
    b[2:] = -k * lam * ((n - 1) / n) * (1 - a * a) * np.power(a, n - 2, dtype=float)
    if a == 0.0:
        tail = TailBound.zero()
    else:
        # |B_n| <= k (1 - a^2) q^(n-2) for any q >= a
        q = max(a, TINY_CENTER)
        tail = TailBound.geometric(k * (1 - a * a) / (q * q), q)
    return HarmonicMapping(h, CoefficientSequence(b, tail), spec.qc, b1_zero=True)


# ---------------------------------------------------------------------------
# dilatations
# ---------------------------------------------------------------------------

class DilatationMode(str, Enum):
    CONSTANT = "constant"
    Z_TIMES = "ztimes"


def attach_dilatation(
    h: CoefficientSequence,
    k: float,
    mode: DilatationMode | str = DilatationMode.CONSTANT,
    phase: float = 0.0,
    N: int | None = None,
) -> HarmonicMapping:
    """Build ``g`` from ``g' = omega h'`` with ``omega = k e^{i phase}``
    (``constant``) or ``omega = k e^{i phase} z`` (``ztimes``).

    ``N`` optionally extends ``h`` first (zero or exact tails only).
    """
    mode = DilatationMode(mode)
    qc = QuasiconformalParams.from_k(k)
    if qc.k >= 1.0:
        raise MappingError("dilatation bound must satisfy k < 1")
    if N is not None:
        h = h.extended(N)
    w = k * cmath.exp(1j * phase)
    if mode is DilatationMode.CONSTANT:
        return HarmonicMapping(h, h.map_coeffs(w, drop_constant=True), qc)

    # n b_n = w (n - 1) a_{n-1}
    Nh = h.N
    n = np.arange(2, Nh + 2)
    b = np.zeros(Nh + 2, dtype=complex)
    b[2:] = w * h.coeffs[1:] * (n - 1) / n
    t = h.tail
    if t.kind == "zero" or k == 0.0:
        tail = TailBound.zero()
    elif t.modulus_ratio >= 1.0:
        raise MappingError("z-times dilatation needs a decaying tail on h")
    else:
        # |b_n| <= k |a_{n-1}| <= k c q^(n-1)
        tail = TailBound.geometric(k * t.modulus_scale / t.modulus_ratio, t.modulus_ratio)
    return HarmonicMapping(h, CoefficientSequence(b, tail), qc, b1_zero=True)


def multiply_series(x: np.ndarray, y: np.ndarray, N: int) -> np.ndarray:
    """First ``N + 1`` coefficients of the Cauchy product."""
    return np.convolve(x[: N + 1], y[: N + 1])[: N + 1]


# ---------------------------------------------------------------------------
# random admissible functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchurSample:
    """``h = sum_j w_j e^{i theta_j} (a_j - z)/(1 - a_j z)`` with ``sum w_j = 1``."""

    weights: tuple[float, ...]
    centers: tuple[float, ...]
    phases: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.weights) == len(self.centers) == len(self.phases) >= 1):
            raise MappingError("Schur sample needs matching nonempty component lists")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise MappingError("weights must be nonnegative and sum to 1")
        if any(not 0.0 <= a < 1.0 for a in self.centers):
            raise MappingError("centers must lie in [0, 1)")

    def _parts(self):
        return zip(self.weights, self.centers, self.phases)

    def coefficients(self, N: int) -> np.ndarray:
        out = np.zeros(N + 1, dtype=complex)
        n = np.arange(1, N + 1)
        for w, a, th in self._parts():
            rot = w * cmath.exp(1j * th)
            out[0] += rot * a
            out[1:] += -rot * (1 - a * a) * np.power(a, n - 1, dtype=float)
        return out

    def sequence(self, N: int) -> CoefficientSequence:
        coeffs = self.coefficients(N)
        if len(self.weights) == 1:
            w, a, th = next(self._parts())
            rot = w * cmath.exp(1j * th)
            if a >= TINY_CENTER:
                return CoefficientSequence(coeffs, TailBound.exact(-rot * (1 - a * a) / a, a))
            if a == 0:
                return CoefficientSequence(coeffs, TailBound.zero())
        q = max(max(self.centers), TINY_CENTER) if max(self.centers) > 0 else 0.0
        if q == 0.0:
            return CoefficientSequence(coeffs, TailBound.zero())
        c = sum(w * (1 - a * a) for w, a, _ in self._parts()) / q
        return CoefficientSequence(coeffs, TailBound.geometric(c, q))

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for w, a, th in self._parts():
            out += w * cmath.exp(1j * th) * (a - z) / (1 - a * z)
        return out

    def derivative(self, z, n: int = 1):
        """``h^(n)(z) / n!`` in closed form."""
        z = np.asarray(z, dtype=complex)
        if n == 0:
            return self.value(z)
        out = np.zeros(z.shape, dtype=complex)
        for w, a, th in self._parts():
            out += -w * cmath.exp(1j * th) * a ** (n - 1) * (1 - a * a) / (1 - a * z) ** (n + 1)
        return out

    def to_json(self) -> dict:
        return {
            "kind": "schur",
            "weights": list(self.weights),
            "centers": list(self.centers),
            "phases": list(self.phases),
        }


@dataclass(frozen=True)
class HalfPlaneSample:
    """``h = 1 - (1 - a0) sum_j w_j (1 + u_j z)/(1 - u_j z)``, ``|u_j| <= 1``.

    ``Re h < 1`` on the disk and ``h(0) = a0``.
    """

    a0: float
    weights: tuple[float, ...]
    nodes: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        if not 0.0 <= self.a0 < 1.0:
            raise MappingError("a0 must lie in [0, 1)")
        if len(self.weights) != len(self.nodes) or not self.nodes:
            raise MappingError("half-plane sample needs matching nonempty lists")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise MappingError("weights must be nonnegative and sum to 1")
        if any(abs(u) > 1.0 + 1e-15 for u in self.nodes):
            raise MappingError("nodes must satisfy |u| <= 1")

    def coefficients(self, N: int) -> np.ndarray:
        out = np.zeros(N + 1, dtype=complex)
        out[0] = self.a0
        n = np.arange(1, N + 1)
        for w, u in zip(self.weights, self.nodes):
            out[1:] += -2 * (1 - self.a0) * w * complex(u) ** n
        return out

    def sequence(self, N: int) -> CoefficientSequence:
        coeffs = self.coefficients(N)
        if len(self.nodes) == 1:
            u = complex(self.nodes[0])
            return CoefficientSequence(coeffs, TailBound.exact(-2 * (1 - self.a0), u))
        q = max(abs(u) for u in self.nodes)
        if q >= 1.0:
            raise MappingError("mixtures need |u_j| < 1 for a certified tail")
        return CoefficientSequence(coeffs, TailBound.geometric(2 * (1 - self.a0), q))

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for w, u in zip(self.weights, self.nodes):
            out -= (1 - self.a0) * w * (1 + u * z) / (1 - u * z)
        return out

    def to_json(self) -> dict:
        return {
            "kind": "halfplane",
            "a0": self.a0,
            "weights": list(self.weights),
            "nodes": [[complex(u).real, complex(u).imag] for u in self.nodes],
        }


def draw_schur(rng: np.random.Generator, m: int, a_max: float = 0.9) -> SchurSample:
    if m < 1:
        raise MappingError("need at least one component")
    weights = rng.dirichlet(np.ones(m)) if m > 1 else np.ones(1)
    weights = weights / weights.sum()
    centers = rng.uniform(0.0, a_max, size=m)
    phases = rng.uniform(0.0, 2 * np.pi, size=m)
    return SchurSample(
        tuple(float(w) for w in weights),
        tuple(float(a) for a in centers),
        tuple(float(t) for t in phases),
    )


def draw_half_plane(
    rng: np.random.Generator,
    m: int,
    r_max: float = 0.9,
    a0: float | None = None,
) -> HalfPlaneSample:
    """Random half-plane function; ``m == 1`` draws an extreme kernel (``|u| = 1``)."""
    if m < 1:
        raise MappingError("need at least one component")
    if a0 is None:
        a0 = float(rng.uniform(0.0, 1.0))
    phases = rng.uniform(0.0, 2 * np.pi, size=m)
    if m == 1:
        return HalfPlaneSample(a0, (1.0,), (complex(cmath.exp(1j * phases[0])),))
    weights = rng.dirichlet(np.ones(m))
    weights = weights / weights.sum()
    radii = rng.uniform(0.0, r_max, size=m)
    nodes = tuple(complex(r * cmath.exp(1j * t)) for r, t in zip(radii, phases))
    return HalfPlaneSample(a0, tuple(float(w) for w in weights), nodes)


def sample_schur(seed: int, m: int, N: int = 200) -> CoefficientSequence:
    """Deterministic random Schur-class sequence with ``m`` Möbius components."""
    if N < 1:
        raise MappingError("N must be >= 1")
    rng = np.random.default_rng(seed)
    return draw_schur(rng, m).sequence(N)


def schur_from_json(data: dict):
    kind = data.get("kind")
    if kind == "schur":
        return SchurSample(tuple(data["weights"]), tuple(data["centers"]), tuple(data["phases"]))
    if kind == "halfplane":
        nodes = tuple(complex(re, im) for re, im in data["nodes"])
        return HalfPlaneSample(float(data["a0"]), tuple(data["weights"]), nodes)
    raise MappingError(f"unknown sample kind {kind!r}")

