import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcbohr import radii
from qcbohr.coeffseq import CoefficientSequence
from qcbohr.functionals import (
    FunctionalError,
    FunctionalSpec,
    MissingB1Zero,
    NotNormalized,
    PointOffCircle,
    PointRule,
    RADIAL_NEG,
    RadiusOutOfLemmaRange,
    Verdict,
    check,
    evaluate,
    evaluate_extremal,
    evaluate_points,
    extremal_closed_form,
)
from qcbohr.mappings import (
    DilatationMode,
    ExtremalSpec,
    Family,
    HarmonicMapping,
    QuasiconformalParams,
    attach_dilatation,
    draw_half_plane,
    draw_schur,
    make_extremal,
)

SPEC_VARIANTS = [
    ("F-T1", {}), ("F-T3", {}), ("F-TT1", {}), ("F-T7", {}),
    ("F-T2", {"p": 1}), ("F-T2", {"p": 2}), ("F-T2", {"p": 2, "s": 2}),
    ("F-T4", {"p": 1}), ("F-T4", {"p": 2}), ("F-T4", {"p": 0.5}),
    ("F-T6", {}), ("F-TF", {}),
]


def spec(sid, K=1, **kw):
    return FunctionalSpec.make(sid, K=K, **kw)


def extremal(s, a, N=64):
    return make_extremal(ExtremalSpec(s.extremal_family, a, s.qc), N)


# --- spec construction ------------------------------------------------------------

@pytest.mark.parametrize("bad", [
    dict(id="F-X"),
    dict(id="F-T2", p=1.5),
    dict(id="F-T2", p=0),
    dict(id="F-T2", s=3),
    dict(id="F-T4", p=0),
    dict(id="F-T4", p=2.5),
    dict(id="F-T1", K=math.inf),
])
def test_spec_validation(bad):
    with pytest.raises(FunctionalError):
        FunctionalSpec.make(**bad)


def test_point_rule_parsing():
    assert PointRule.parse("grid:16") == PointRule("grid", 16)
    assert PointRule.parse("grid") == PointRule("grid", 64)
    assert PointRule.parse("radial-neg") == RADIAL_NEG
    assert str(PointRule("grid", 8)) == "grid:8"
    with pytest.raises(ValueError):
        PointRule.parse("diagonal")
    pts = PointRule("grid", 8).points(0.3)
    assert np.allclose(np.abs(pts), 0.3) and len(pts) == 8


def test_rho0_per_spec():
    assert spec("F-T1", K=2).rho0() == pytest.approx(3 / 11)
    assert spec("F-T3", K=2).rho0() == spec("F-T1", K=2).rho0()
    assert spec("F-T4", K=1, p=2).rho0() == pytest.approx(1 / 3)
    assert spec("F-TF", K=1).rho0() == pytest.approx(1 / 3)
    assert spec("F-T6", K=1).rho0() == pytest.approx(radii.radius("E-T6", K=1))
    assert spec("F-TT1", K=5).rho0() == pytest.approx(radii.radius("E-TT1", K=5))


def test_T2_radius_does_not_depend_on_constant_power():
    for K in (1, 2, 10):
        assert spec("F-T2", K=K, p=2, s=1).rho0() == spec("F-T2", K=K, p=2, s=2).rho0()


# --- worked values --------------------------------------------------------------

def test_T1_extremal_at_sharp_radius():
    s = spec("F-T1", K=2)
    rep = check(s, extremal(s, 0.999), s.rho0(), RADIAL_NEG)
    assert 1 - 1e-2 <= rep.lhs.value <= 1
    assert rep.verdict is Verdict.HOLDS


def test_T2_half_plane_equality_at_one_fifth():
    s = spec("F-T2", K=1, p=1)
    rep = check(s, extremal(s, 0.0), 0.2, RADIAL_NEG)
    assert rep.lhs.value == pytest.approx(1.0, abs=1e-14)
    assert rep.lhs.err == 0.0


def test_TT1_on_identity_like_map():
    s = spec("F-TT1", K=1)
    f = make_extremal(ExtremalSpec(Family.MOBIUS_PAIR, 0.0, s.qc), 8)
    for rho in (0.1, 0.25):
        assert evaluate(s, f, rho, -rho).value == pytest.approx(2 * rho, abs=1e-15)


@pytest.mark.parametrize("a", [0.0, 0.4, 0.9])
def test_TF_reduces_to_majorant_at_K1(a):
    s = spec("F-TF", K=1)
    rho = 0.3
    v = evaluate(s, extremal(s, a), rho, rho).value
    assert v == pytest.approx(a + (1 - a * a) * rho / (1 - a * rho), abs=1e-14)


@pytest.mark.parametrize("sid,kw", SPEC_VARIANTS)
def test_rho_zero_holds(sid, kw):
    s = spec(sid, K=2, **kw)
    a = 0.3
    rep = check(s, extremal(s, a), 0.0)
    assert rep.verdict is Verdict.HOLDS
    expected = a**s.s if sid == "F-T2" else {"F-T7": a * a, "F-T4": a ** (s.p or 1)}.get(sid, a)
    assert rep.lhs.value == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("sid,kw", SPEC_VARIANTS)
@pytest.mark.parametrize("K", [1, 2, 10])
@pytest.mark.parametrize("a", [0.0, 0.3, 0.9, 0.999])
def test_extremal_matches_closed_form(sid, kw, K, a):
    s = spec(sid, K=K, **kw)
    for rho in (0.05, 0.5 * s.rho0(), s.rho0(), min(1.05 * s.rho0(), 1 / 3 if sid == "F-T6" else 0.9)):
        rep, _ = evaluate_extremal(s, a, rho)
        assert rep.lhs.value == pytest.approx(extremal_closed_form(s, a, rho), abs=1e-12)
        assert rep.lhs.err < 1e-10


def test_TT1_sharpness_example():
    s = spec("F-TT1", K=2)
    rho = s.rho0() + 0.02
    rep = check(s, extremal(s, 1 - 1e-4), rho, RADIAL_NEG)
    assert rep.verdict is Verdict.VIOLATED
    assert rep.z == complex(-rho)


@pytest.mark.parametrize("sid,kw", SPEC_VARIANTS)
@pytest.mark.parametrize("K", [1, 2, 10])
def test_sharpness_direction(sid, kw, K):
    s = spec(sid, K=K, **kw)
    a = 1e-4 if s.half_plane else 1 - 1e-4
    rep, N = evaluate_extremal(s, a, s.rho0() + 0.02)
    assert rep.verdict is Verdict.VIOLATED
    rep2, _ = evaluate_extremal(s, a, s.rho0() + 0.02, N=2 * N)
    assert rep2.verdict is Verdict.VIOLATED


# --- errors -----------------------------------------------------------------------

def test_T6_radius_limit():
    s = spec("F-T6", K=2)
    with pytest.raises(RadiusOutOfLemmaRange):
        check(s, extremal(s, 0.5), 0.34)


@pytest.mark.parametrize("sid", ["F-T6", "F-TF"])
def test_b1_zero_required(sid):
    s = spec(sid, K=2)
    f = make_extremal(ExtremalSpec(Family.MOBIUS_PAIR, 0.5, s.qc), 16)
    with pytest.raises(MissingB1Zero):
        check(s, f, 0.2)


def test_points_must_lie_on_circle():
    s = spec("F-TT1")
    with pytest.raises(PointOffCircle):
        evaluate(s, extremal(s, 0.5), 0.2, 0.1)


def test_unnormalised_input_rejected():
    h = CoefficientSequence([0.9, 0.5])
    f = HarmonicMapping(h, CoefficientSequence([0.0]), QuasiconformalParams.from_K(1))
    with pytest.raises(NotNormalized):
        check(spec("F-T1"), f, 0.2)
    h2 = CoefficientSequence([0.5, 1.2])
    f2 = HarmonicMapping(h2, CoefficientSequence([0.0]), QuasiconformalParams.from_K(1))
    with pytest.raises(NotNormalized):
        check(spec("F-T2", p=1), f2, 0.2)
    with pytest.raises(FunctionalError):
        check(spec("F-T1"), extremal(spec("F-T1"), 0.5), 1.0)


# --- properties -------------------------------------------------------------------

def random_mapping(s, seed):
    rng = np.random.default_rng(seed)
    sample = draw_half_plane(rng, int(rng.integers(1, 4))) if s.half_plane else draw_schur(rng, int(rng.integers(1, 4)))
    mode = DilatationMode.Z_TIMES if s.needs_b1_zero else DilatationMode.CONSTANT
    f = attach_dilatation(sample.sequence(120), s.qc.k, mode, float(rng.uniform(0, 6)))
    return HarmonicMapping(f.h, f.g, s.qc, f.b1_zero)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), idx=st.integers(0, len(SPEC_VARIANTS) - 1),
       K=st.sampled_from([1.0, 2.0, 10.0]))
def test_lhs_nondecreasing_in_rho(seed, idx, K):
    sid, kw = SPEC_VARIANTS[idx]
    s = spec(sid, K=K, **kw)
    f = random_mapping(s, seed)
    hi = 1 / 3 if sid == "F-T6" else 0.6
    prev = -math.inf
    for rho in np.linspace(0, hi, 12):
        v = check(s, f, float(rho), PointRule("grid", 256)).lhs
        assert v.upper >= prev - 1e-12
        prev = v.lower


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.sampled_from([1.0, 2.0, 10.0]))
def test_holds_below_sharp_radius(seed, K):
    for sid, kw in SPEC_VARIANTS:
        s = spec(sid, K=K, **kw)
        f = random_mapping(s, seed)
        for rho in (0.5 * s.rho0(), s.rho0()):
            assert check(s, f, rho).verdict is Verdict.HOLDS


@pytest.mark.parametrize("seed", range(10))
def test_refined_dominates_plain(seed):
    rho = 0.25
    t1, t3 = spec("F-T1", K=2), spec("F-T3", K=2)
    f = random_mapping(t1, seed)
    assert check(t3, f, rho).lhs.lower >= check(t1, f, rho).lhs.lower - 1e-15
    # F-T6 adds |h(z)| + |h'(z)| rho + refined terms in place of |a_0| + |a_1| rho;
    # on the circle the supremum of |h| + rho |h'| dominates |a_0| + rho |a_1|
    t6, tf = spec("F-T6", K=2), spec("F-TF", K=2)
    g = random_mapping(t6, seed)
    assert check(t6, g, rho, PointRule("grid", 256)).lhs.upper >= check(tf, g, rho).lhs.lower - 1e-12


def test_grid_check_reports_worst_point():
    s = spec("F-TT1", K=2)
    f = extremal(s, 0.8)
    rep = check(s, f, 0.2, PointRule("grid", 64))
    vals = evaluate_points(s, f, 0.2, PointRule("grid", 64).points(0.2))
    assert rep.lhs.upper == pytest.approx(max(v.upper for v in vals))
    assert rep.z == pytest.approx(-0.2)


def test_report_json():
    s = spec("F-T4", K=2, p=2)
    d = check(s, extremal(s, 0.5), 0.2).to_json()
    assert d["verdict"] == "Holds" and d["spec"] == "F-T4(p=2)"
    assert set(d) >= {"lhs", "lhs_err", "bound", "margin", "rho", "z"}


def test_point_rule_accepts_text():
    s = spec("F-TT1", K=2)
    f = extremal(s, 0.9999)
    rep = check(s, f, s.rho0() + 0.02, "radial-neg")
    assert rep.verdict is Verdict.VIOLATED and rep.z == complex(-(s.rho0() + 0.02))
