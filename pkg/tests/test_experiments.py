import json
import math
import os
import tempfile

import numpy as np
import pytest

import polylab as pl
from polylab.errors import DomainError
from polylab.experiments import (ExperimentConfig, TrialReport, aggregate,
                                 recompute_threshold, run_inclusion,
                                 run_opnorm, run_quotient,
                                 run_smallball_lemmas, run_sval, run_volume,
                                 run_meanwidth)


def small_cfg(**kw):
    base = dict(ensemble={"kind": "gaussian"}, n=6, N=48, trials=4, seed=11,
                samples_per_trial=40)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(n=10, N=5).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(trials=0).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(beta=1.0).validate()
    with pytest.raises(DomainError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_report_determinism():
    r1 = run_sval(small_cfg())
    r2 = run_sval(small_cfg())
    d1, d2 = r1.to_dict(), r2.to_dict()
    d1.pop("wall_time_s")
    d2.pop("wall_time_s")
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)


def test_worker_pool_matches_serial():
    r1 = run_sval(small_cfg(workers=1))
    r2 = run_sval(small_cfg(workers=2))
    assert r1.per_trial == r2.per_trial


def test_threshold_auditability():
    reports = [
        run_sval(small_cfg()),
        run_inclusion(small_cfg()),
        run_volume(small_cfg(ensemble={"kind": "rademacher"}, n=3, N=24,
                             samples_per_trial=300)),
        run_opnorm(small_cfg(ensemble={"kind": "sym_pareto", "alpha": 3.0})),
        run_smallball_lemmas(small_cfg(n=4, N=16, samples_per_trial=200)),
        run_meanwidth(small_cfg(n=4, N=32, samples_per_trial=30)),
    ]
    for rep in reports:
        for entry in rep.thresholds.values():
            got = recompute_threshold(entry)
            if entry["value"] is not None and math.isfinite(entry["value"]):
                assert got == pytest.approx(entry["value"], abs=1e-12)


def test_aggregates_consistent_and_csv_roundtrip():
    rep = run_sval(small_cfg())
    for name, series in rep.per_trial.items():
        agg = rep.aggregates[name]
        arr = np.array(series)
        assert agg["min"] == pytest.approx(float(arr.min()))
        assert agg["max"] == pytest.approx(float(arr.max()))
        assert agg["mean"] == pytest.approx(float(arr.mean()))
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "trials.csv")
        rep.dump_csv(path)
        rebuilt = TrialReport.aggregates_from_csv(path)
        for name in rep.per_trial:
            for key, val in rep.aggregates[name].items():
                assert rebuilt[name][key] == pytest.approx(val, abs=1e-12)


def test_sval_trivial_matrix():
    cfg = small_cfg(ensemble={"kind": "rademacher"}, n=1, N=1, trials=3)
    rep = run_sval(cfg)
    assert all(abs(s - 1.0) < 1e-12 for s in rep.per_trial["sn_over_sqrtN"])


def test_inclusion_reports_alpha_policy():
    rep = run_inclusion(small_cfg())
    assert rep.notes["alpha_used"] >= 1.0
    assert "body_R" in rep.thresholds
    # raw R at these sizes sits below 1, so the clamp must be recorded
    assert rep.notes["alpha_clamped"] == (rep.thresholds["body_R"]["value"] < 1.0)


def test_quotient_report_finite():
    rep = run_quotient(small_cfg())
    assert all(math.isfinite(v) for v in rep.per_trial["max_ratio"])
    assert rep.pass_frequency == 1.0


def test_quotient_with_target():
    cfg = small_cfg(thresholds={"quotient_K": 1e-9})
    rep = run_quotient(cfg)
    assert rep.pass_frequency == 0.0  # impossible target


def test_volume_constants_recorded():
    cfg = small_cfg(ensemble={"kind": "rademacher"}, n=3, N=24,
                    samples_per_trial=400)
    rep = run_volume(cfg)
    assert rep.notes["C2_hat"] > 0
    assert rep.notes["C_hat"] >= rep.notes["C2_hat"]


def test_lemmas_bounds_hold():
    cfg = small_cfg(ensemble={"kind": "rademacher"}, n=4, N=16,
                    samples_per_trial=500, trials=3)
    rep = run_smallball_lemmas(cfg)
    v = pl.make_ensemble("rademacher").v
    assert all(c <= v + 0.02 for c in rep.per_trial["weighted_sum_conc"])
    bound_cap = rep.thresholds["cap_exceed_bound"]["value"]
    assert rep.notes["cap_exceed_mean_freq"] >= bound_cap
    assert rep.notes["rows_below_cap_mean_freq"] <= rep.thresholds["rows_below_cap_bound"]["value"] + 0.05
    with pytest.raises(DomainError):
        run_smallball_lemmas(small_cfg(n=13, N=26))
