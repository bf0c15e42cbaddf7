"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Sizes, tolerances and trial counts are pinned here; nothing is deferred to
later calibration.  Independent oracles (enumeration, closed forms, shoelace)
live in this file or in the sibling test modules they were frozen from.
"""

import itertools
import json
import math
import os
import tempfile

import numpy as np
import pytest

import polylab as pl
from polylab.cli import main as cli_main, validate_report
from polylab.experiments import ExperimentConfig, run_inclusion, run_opnorm, \
    run_quotient, run_sval, run_volume
from polylab.nets import TSpec, cover_ball_log_bound


def _report(num, ok, detail):
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


# --------------------------------------------------------------------------


def _partitions_upto(n, m):
    def rec(i, blocks):
        if i == n:
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < m:
            blocks.append([i])
            yield from rec(i + 1, blocks)
            blocks.pop()
    yield from rec(0, [])


def test_criterion_01_norm_oracles():
    rs = np.random.RandomState(101)
    worst_eq = 0.0
    for _ in range(100):
        n = rs.randint(2, 9)
        m = rs.randint(1, n + 3)
        z = rs.randn(n)
        got, cert = pl.ms_norm_brute(z, m)
        best = -math.inf
        for par in _partitions_upto(n, m):
            val = sum(math.sqrt(float((z[list(b)] ** 2).sum())) for b in par)
            best = max(best, val)
        worst_eq = max(worst_eq, abs(got - best))
        assert cert.check_partition(n)
    ok_eq = worst_eq <= 1e-9

    worst_gap = -math.inf
    for _ in range(1000):
        n = rs.randint(2, 11)
        x = rs.randn(n)
        alpha = 1.0 + rs.rand() * (math.sqrt(n) - 1.0)
        m = math.ceil(1.0 + 4.0 * alpha * alpha)
        h = pl.support_cube_cap(x, alpha)
        mv, _ = pl.ms_norm_brute(x, m)
        worst_gap = max(worst_gap, h - mv)
    ok_ms = worst_gap <= 1e-6
    _report(1, ok_eq and ok_ms,
            f"partition-enum equality gap {worst_eq:.2e} (tol 1e-9); "
            f"block-norm domination slack {worst_gap:.2e} (tol 1e-6)")


def test_criterion_02_l1_oracle():
    rs = np.random.RandomState(202)
    worst = 0.0
    for _ in range(100):
        n = rs.randint(1, 4)
        big_n = rs.randint(n, 9)
        a = rs.randn(n, big_n)
        y = a @ rs.randn(big_n)
        best = math.inf
        for k in range(0, n + 1):
            for cols in itertools.combinations(range(big_n), k):
                if k == 0:
                    if np.abs(y).max() < 1e-12:
                        best = 0.0
                    continue
                sub = a[:, cols]
                x, _, _, _ = np.linalg.lstsq(sub, y, rcond=None)
                if np.abs(sub @ x - y).max() <= 1e-8:
                    best = min(best, float(np.abs(x).sum()))
        v, x, st = pl.l1_min(a, y)
        assert st == "optimal"
        worst = max(worst, abs(v - best) / (1.0 + abs(best)))
    _report(2, worst <= 1e-6,
            f"l1 vs support-enumeration worst relative gap {worst:.2e} (tol 1e-6)")


def test_criterion_03_sandwich():
    rs = np.random.RandomState(303)
    exact = True
    sandwich = True
    for _ in range(10_000):
        n = rs.randint(1, 25)
        a = rs.randn(n) * (10.0 ** rs.randint(-2, 3))
        k = rs.randint(1, n + 1)
        mags = np.abs(a)
        full = float(np.sqrt((mags * mags).sum()))
        if pl.k_norm(a, n) != full:
            exact = False
        kn = pl.k_norm(a, k)
        if not (kn <= full + 1e-12 and full <= math.sqrt(n / k) * kn + 1e-9):
            sandwich = False
    _report(3, exact and sandwich,
            "k=N equality exact and two-sided sandwich held on 10^4 draws")


def test_criterion_04_covering():
    rs = np.random.RandomState(404)
    ok = True
    lines = []
    for m in range(1, 7):
        grid_eps = 0.8 / math.sqrt(m)
        sparse_eps = min(0.95, 1.3 / math.sqrt(m) if m > 1 else 1.0)
        for eps in {round(grid_eps, 4), round(sparse_eps, 4)}:
            net = pl.cover_ball_inf(m, eps)
            g = rs.randn(10_000, m)
            g /= np.sqrt((g * g).sum(axis=1))[:, None]
            pts = g * (rs.rand(10_000) ** (1.0 / m))[:, None]
            worst = 0.0
            for lo in range(0, 10_000, 1000):
                chunk = pts[lo:lo + 1000]
                d = np.abs(chunk[:, None, :] - net[None, :, :]).max(axis=2).min(axis=1)
                worst = max(worst, float(d.max()))
            bound_ok = math.log(net.shape[0]) <= cover_ball_log_bound(m, eps) + 1e-12
            cover_ok = worst <= eps + 1e-12
            ok = ok and bound_ok and cover_ok
            lines.append(f"m={m} eps={eps}: |net|={net.shape[0]} worst={worst:.3f}")
    _report(4, ok, "; ".join(lines))


def test_criterion_05_Q_enumeration():
    ln2 = math.log(2.0)
    ok = True
    for n in (1, 2, 3):
        for big_n in range(n, 9):
            for delta in (0.25, 0.5, 1.0):
                q = pl.enumerate_Q(delta, n, big_n)
                if len(q) > pl.cardinality_F(delta, n, big_n).value:
                    ok = False
    # hand enumeration for n = 1: codes with 2^(c-1) ln2 <= delta N
    hand_ok = True
    for big_n in range(1, 9):
        for delta in (0.25, 0.5, 1.0):
            budget = delta * big_n
            count = 1
            c = 1
            while (2 ** (c - 1)) * ln2 <= budget + 1e-12:
                count += 1
                c += 1
            if len(pl.enumerate_Q(delta, 1, big_n)) != count:
                hand_ok = False
    frozen = (len(pl.enumerate_Q(0.5, 1, 1)) == 1
              and len(pl.enumerate_Q(1.0, 1, 1)) == 2
              and len(pl.enumerate_Q(1.0, 1, 8)) == 5)
    _report(5, ok and hand_ok and frozen,
            "|Q| <= F on the full (n<=3, N<=8, delta) grid; n=1 counts exact")


def test_criterion_06_D_gamma():
    ensembles = [pl.make_ensemble("rademacher"), pl.make_ensemble("gaussian"),
                 pl.make_ensemble("uniform"), pl.make_ensemble("sym_pareto", alpha=3.0)]
    n, big_n = 10, 100
    row_ok = True
    freq_lines = []
    det_ok = True
    for e in ensembles:
        for delta in (0.1, 0.5):
            good = 0
            for t in range(500):
                g = pl.sample_matrix(e, big_n, n, t)
                d = pl.compute_D_gamma(g, delta)
                gd = g * d.values()[None, :]
                if np.sqrt((gd * gd).sum(axis=1)).max() > math.sqrt(n / delta) + 1e-9:
                    row_ok = False
                if d.neg_log_det() <= 4.0 * delta * big_n:
                    good += 1
            freq = good / 500.0
            need = 1.0 - math.exp(-delta * big_n) - 0.05
            if freq < need:
                det_ok = False
            freq_lines.append(f"{e.kind}@{delta}:{freq:.3f}")
    _report(6, row_ok and det_ok,
            f"row-norm certificate deterministic; det frequencies {' '.join(freq_lines)}")


def test_criterion_07_net_validation():
    e = pl.make_ensemble("gaussian")
    n, big_n, k = 6, 60, 60
    eps, delta = 0.35, 0.1
    g = pl.sample_matrix(e, big_n, n, 777)
    bundle = pl.build_net(TSpec("sphere", n), eps, delta, k, n, big_n,
                          "realized", matrix=g, c0=2.0)
    radius = 10.0 * eps * math.sqrt((k * n / delta) * math.log(math.e * big_n / k))
    rep = pl.validate_net(g, bundle, k, radius, 1000, 31)
    rep_tiny = pl.validate_net(g, bundle, k, radius / 100.0, 1000, 31)
    ok = rep["pass_fraction"] == 1.0 and rep_tiny["pass_fraction"] < 1.0
    _report(7, ok,
            f"|net|={bundle.points.shape[0]}, radius={radius:.1f}: "
            f"pass={rep['pass_fraction']}, at radius/100 pass="
            f"{rep_tiny['pass_fraction']:.3f} (falsifiable)")


def test_criterion_08_smallest_singular_value():
    cfg = ExperimentConfig(ensemble={"kind": "gaussian"}, n=100, N=400,
                           trials=200, seed=808)
    rep = run_sval(cfg)
    mean = rep.aggregates["sn_over_sqrtN"]["mean"]
    edge = (math.sqrt(400) - math.sqrt(100)) / math.sqrt(400)
    gauss_ok = abs(mean - edge) <= 0.05

    below = {}
    for kind, kw in [("rademacher", {}), ("sym_pareto", {"alpha": 3.0})]:
        cfg = ExperimentConfig(ensemble={"kind": kind, **kw}, n=50, N=1000,
                               trials=200, seed=809)
        r = run_sval(cfg)
        below[kind] = r.notes["trials_below_threshold"]
    tail_ok = all(v == 0 for v in below.values())
    _report(8, gauss_ok and tail_ok,
            f"gaussian mean s_n/sqrt(N)={mean:.4f} vs MP edge {edge}; "
            f"threshold violations {below}")


def test_criterion_09_inclusion_and_quotient():
    cfg = ExperimentConfig(ensemble={"kind": "gaussian"}, n=20, N=400,
                           trials=100, seed=909, beta=0.5, samples_per_trial=200)
    inc = run_inclusion(cfg)
    dual_rate = inc.notes["dual_events"] / cfg.trials
    dual_ok = dual_rate <= 0.05

    p95 = {}
    for seed in (909, 1909):
        qcfg = ExperimentConfig(ensemble={"kind": "gaussian"}, n=20, N=400,
                                trials=100, seed=seed, samples_per_trial=200)
        q = run_quotient(qcfg)
        assert all(math.isfinite(v) for v in q.per_trial["max_ratio"])
        p95[seed] = q.notes["p95_of_max_ratio"]
    stable = abs(p95[909] - p95[1909]) <= 0.10 * max(p95.values())
    _report(9, dual_ok and stable,
            f"dual event rate {dual_rate:.3f} (<=0.05); quotient p95 of max "
            f"ratio {p95[909]:.4f} vs {p95[1909]:.4f} (stable to 10%)")


def test_criterion_10_volume():
    rs = np.random.RandomState(1010)
    mc_ok = True
    for t in range(20):
        g = rs.randn(8, 2) * (0.5 + rs.rand())
        p = pl.Polytope(g)
        exact = pl.volume_exact_2d(p)
        est = pl.volume_mc(p, 6000, 2000 + t)
        sigma_area = 2.0 * est.point_estimate * est.std_error
        if abs(est.point_estimate ** 2 - exact) > 3.0 * sigma_area + 1e-12:
            mc_ok = False
    c2 = {}
    for big_n in (50, 200, 800):
        cfg = ExperimentConfig(ensemble={"kind": "rademacher"}, n=5, N=big_n,
                               trials=2, seed=1010, samples_per_trial=4000)
        rep = run_volume(cfg)
        c2[big_n] = rep.notes["C2_hat"]
    pos_ok = all(v > 0 for v in c2.values())
    _report(10, mc_ok and pos_ok,
            f"planar MC within 3 sigma of shoelace on 20 instances; "
            f"C2_hat across N: {[(k, round(v, 3)) for k, v in c2.items()]}")


def test_criterion_11_mean_width_chain():
    rs = np.random.RandomState(1111)
    chain_ok = True
    for t in range(6):
        g = rs.randn(10, 2) * (0.5 + rs.rand())
        p = pl.Polytope(g)
        star = pl.mean_width_polar(p, 30000, 3000 + t)
        vol = pl.volume_mc(p, 20000, 4000 + t)
        m = pl.mean_width_M(p, 1500, 5000 + t)
        vratio = vol.point_estimate / math.sqrt(pl.ball_volume(2))
        tol_hi = 3.0 * (star.std_error + vol.std_error / math.sqrt(pl.ball_volume(2)))
        if star.point_estimate < vratio - tol_hi:
            chain_ok = False
        tol_lo = 3.0 * (vol.std_error + m.std_error / m.point_estimate ** 2)
        if vratio < 1.0 / m.point_estimate - tol_lo:
            chain_ok = False
    mb = pl.mean_width_M(pl.Polytope(np.eye(2)), 3000, 1111)
    target = 2.0 * math.sqrt(2.0 / math.pi) / math.sqrt(math.pi / 2.0)  # = 4/pi
    b1_ok = abs(mb.point_estimate - target) <= 0.02 * target
    _report(11, chain_ok and b1_ok,
            f"ury chain held on 6 planar instances; M(B1^2)={mb.point_estimate:.4f} "
            f"vs {target:.4f} (2%)")


def test_criterion_12_santalo():
    rs = np.random.RandomState(1212)
    upper_ok = True
    for t in range(20):
        g = rs.randn(9, 2) * (0.5 + rs.rand())
        rep = pl.santalo_check(pl.Polytope(g), 15000, 6000 + t)
        if rep["ratio"] > 1.0 + 3.0 * rep["sigma"]:
            upper_ok = False
    th = np.linspace(0.0, math.pi, 100, endpoint=False)
    disk = pl.Polytope(np.column_stack([np.cos(th), np.sin(th)]))
    rep = pl.santalo_check(disk, 60000, 1212)
    ball_ok = abs(rep["ratio"] - 1.0) <= 0.02
    _report(12, upper_ok and ball_ok,
            f"volume product <= 1 within 3 sigma on 20 planar polytopes; "
            f"ball case ratio {rep['ratio']:.4f} (2% of 1)")


def test_criterion_13_heavy_tail_motivation():
    cfg = ExperimentConfig(ensemble={"kind": "sym_pareto", "alpha": 3.0},
                           n=100, N=1000, trials=100, seed=1313)
    rep = run_opnorm(cfg)
    ratio = rep.notes["p95_ratio"]
    ratio_ok = ratio >= 2.0
    scfg = ExperimentConfig(ensemble={"kind": "sym_pareto", "alpha": 3.0},
                            n=50, N=1000, trials=100, seed=1314)
    srep = run_sval(scfg)
    sval_ok = srep.notes["trials_below_threshold"] == 0
    _report(13, ratio_ok and sval_ok,
            f"pareto/gaussian opnorm p95 ratio {ratio:.2f} (>=2) while s_n "
            f"threshold violations = {srep.notes['trials_below_threshold']}")


def _strip_wall_time(path):
    with open(path, "rb") as fh:
        return b"\n".join(l for l in fh.read().splitlines()
                          if b"wall_time_s" not in l)


def test_criterion_14_cli_determinism():
    verbs = [
        ["sval", "--dist", "rademacher", "--n", "4", "--N", "24", "--trials", "3"],
        ["inclusion", "--dist", "gaussian", "--n", "4", "--N", "24",
         "--trials", "2", "--samples", "20"],
        ["quotient", "--dist", "gaussian", "--n", "3", "--N", "12",
         "--trials", "2", "--samples", "15"],
        ["volume", "--dist", "rademacher", "--n", "2", "--N", "12",
         "--trials", "2", "--samples", "300"],
        ["meanwidth", "--dist", "gaussian", "--n", "3", "--N", "12",
         "--trials", "2", "--samples", "25"],
        ["opnorm", "--dist", "sym_pareto", "--alpha", "3.0", "--n", "3",
         "--N", "12", "--trials", "2"],
        ["lemmas", "--dist", "rademacher", "--n", "4", "--N", "16",
         "--trials", "2", "--samples", "60"],
        ["gen", "--dist", "uniform", "--n", "3", "--N", "9"],
        ["conc", "--dist", "gaussian", "--samples", "5000"],
        ["net", "--dist", "gaussian", "--n", "3", "--N", "18", "--trials", "25",
         "--eps", "0.4", "--delta", "0.2"],
    ]
    ok = True
    diffs = []
    with tempfile.TemporaryDirectory() as d:
        for args in verbs:
            verb = args[0]
            a_dir, b_dir = os.path.join(d, verb, "a"), os.path.join(d, verb, "b")
            full = args + ["--seed", "42"]
            assert cli_main(full + ["--out", a_dir]) == 0
            assert cli_main(full + ["--out", b_dir]) == 0
            pa = os.path.join(a_dir, f"{verb}-42.json")
            pb = os.path.join(b_dir, f"{verb}-42.json")
            same = _strip_wall_time(pa) == _strip_wall_time(pb)
            validate_report(json.load(open(pa)))
            ok = ok and same
            if not same:
                diffs.append(verb)
    _report(14, ok, "byte-identical reruns for all verbs"
            + (f"; diffs in {diffs}" if diffs else "") + "; schema validated")
