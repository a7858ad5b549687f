import json

import numpy as np
import pytest

from qcbohr.functionals import FunctionalSpec, Verdict
from qcbohr.mappings import attach_dilatation, schur_from_json
from qcbohr.verify import (
    LEMMA_IDS,
    CampaignReport,
    NoWitnessFound,
    admissible_mapping,
    radius_monotonicity,
    sharpness_scan,
    verify_lemma,
    verify_theorem,
)


def spec(sid, K=1, **kw):
    return FunctionalSpec.make(sid, K=K, **kw)


def test_T1_campaign_counts():
    rep = verify_theorem(spec("F-T1", K=1), 50, seed=0)
    assert (rep.holds, rep.violated, rep.inconclusive, rep.errors) == (500, 0, 0, 0)
    assert rep.total == 500 and rep.ok


def test_TF_campaign_below_sharp_radius():
    rep = verify_theorem(spec("F-TF", K=2), 50, seed=1)
    assert rep.ok and rep.holds == 500
    assert rep.params["rho0"] == pytest.approx(spec("F-TF", K=2).rho0())


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        verify_theorem(spec("F-T1"), 0)
    with pytest.raises(ValueError):
        verify_lemma("L1", 0)
    with pytest.raises(ValueError):
        verify_lemma("L7", 5)


def test_campaign_replay_is_deterministic():
    a = verify_theorem(spec("F-T7", K=2), 20, seed=42).to_json()
    b = verify_theorem(spec("F-T7", K=2), 20, seed=42).to_json()
    assert a == b
    c = verify_theorem(spec("F-T7", K=2), 20, seed=43).to_json()
    assert c["worst_margin"] != a["worst_margin"]


def test_violations_are_recorded_not_raised():
    rep = CampaignReport("probe", 0, 1)
    rep.record(Verdict.VIOLATED, -0.1, {"trial": 0})
    rep.record(Verdict.HOLDS, 0.2, {"trial": 1})
    rep.record_error(ValueError("bad"), {"trial": 2})
    assert (rep.holds, rep.violated, rep.errors) == (1, 1, 1)
    assert not rep.ok and rep.worst_margin == -0.1
    assert rep.failures[1]["error"] == "ValueError: bad"
    assert json.loads(json.dumps(rep.to_json()))["counts"]["violated"] == 1


def test_failure_replays_rebuild_the_mapping():
    rep = verify_theorem(spec("F-T1", K=2), 3, seed=5, radii_count=1)
    assert rep.ok
    # replay dictionaries round-trip through JSON and rebuild the sampled mapping
    f, replay = admissible_mapping(spec("F-T1", K=2), np.random.default_rng([5, 0]))
    sample = schur_from_json(json.loads(json.dumps(replay["sample"])))
    g = attach_dilatation(sample.sequence(160), replay["k"], replay["mode"], replay["phase"])
    assert g.h == f.h and g.g == f.g


@pytest.mark.parametrize("sid,K", [("F-T1", 2), ("F-T6", 1)])
def test_sharpness_examples(sid, K):
    scan = sharpness_scan(spec(sid, K=K), a_list=[1 - 1e-4], delta_list=[0.05])
    w = scan.require_witness()
    assert w["lhs"] - w["lhs_err"] > 1
    assert w["stable"]
    assert all(row["rho"] > scan.rho0 for row in scan.samples)
    if sid == "F-T6":
        assert w["rho"] <= 1 / 3


def test_sharpness_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        sharpness_scan(spec("F-T1"), delta_list=[-0.05])
    with pytest.raises(ValueError):
        sharpness_scan(spec("F-T1"), delta_list=[])


def test_sharpness_reports_missing_witness():
    # far from the extremal limit the functional stays below one
    scan = sharpness_scan(spec("F-T1", K=2), a_list=[0.1], delta_list=[0.01])
    assert not scan.found
    with pytest.raises(NoWitnessFound):
        scan.require_witness()


def test_T2_defaults_scan_towards_zero():
    scan = sharpness_scan(spec("F-T2", K=2, p=2))
    assert scan.found and scan.witness["a"] <= 1e-2


@pytest.mark.parametrize("lemma", LEMMA_IDS)
def test_lemma_suites(lemma):
    rep = verify_lemma(lemma, 200, seed=3)
    assert rep.ok, rep.failures[:2]
    assert rep.total >= 200


def test_lemma_replay_is_deterministic():
    assert verify_lemma("L2", 30, seed=9).to_json() == verify_lemma("L2", 30, seed=9).to_json()


def test_radius_monotonicity():
    rep = radius_monotonicity(["E-TT1", "E-T1"], [1, 2, 5, 10, 100])
    assert rep.all_ok
    t1 = [r["rho0"] for r in rep.rows if r["id"] == "E-T1"]
    assert t1[0] == pytest.approx(1 / 3) and t1[-1] == pytest.approx(101 / 501)
    assert radius_monotonicity(["E-T6"], [3]).all_ok
    with pytest.raises(ValueError):
        radius_monotonicity(["E-C1"], [1, 2])
    with pytest.raises(ValueError):
        radius_monotonicity(["E-T1"], [])
