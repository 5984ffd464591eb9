"""Acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line (collected again in the terminal summary)
before asserting, so a failing criterion still reports how far off it is.
"""

import math

import mpmath
import numpy as np
import pytest

from adhoc_outage.cli import main
from adhoc_outage.exact_avg import (
    AnnulusAverageInputs,
    averaged_ccdf_closed,
    averaged_ccdf_quadrature,
    gauss_2f1,
)
from adhoc_outage.experiments import (
    FADING_MODELS,
    PRESETS,
    fig_d,
    fig_f,
    fig_g,
    preset_config,
    reference_network,
    table_1,
    table_2,
)
from adhoc_outage.model import ChannelParams, NormalizedPowers, db_to_linear, normalized_powers
from adhoc_outage.oracle import OracleConfig, simulate_outage
from adhoc_outage.outage import ccdf_conditional, ccdf_rayleigh, outage_conditional

TABLE1_THEORY = [1.711e-1, 1.906e-3, 1.290e-1, 3.118e-3, 3.624e-1, 3.229e-3, 2.574e-1, 5.671e-3]
TABLE1_SIM = [1.730e-1, 1.874e-3, 1.303e-1, 3.010e-3, 3.572e-1, 3.130e-3, 2.518e-1, 5.429e-3]
TABLE2_SPOT = {(30, 3.0, 1, 0.0): (0.1528, 0.0608), (60, 4.0, 32, 8.0): (0.0184, 0.0117)}


def _rel(a, b):
    return abs(a - b) / abs(b)


def _fmt_rows(rows):
    return "; ".join(rows)


@pytest.fixture(scope="module")
def table1():
    return table_1(preset_config("table-1", realizations=10_000))


@pytest.fixture(scope="module")
def table2():
    return table_2(preset_config("table-2", realizations=10_000))


@pytest.mark.slow
def test_criterion_1_closed_form_matches_fading_oracle(report):
    cfg = preset_config("fig-a")
    assert (cfg.num_interferers, cfg.r_ex, cfg.tx_distance, cfg.alpha, cfg.beta_db, cfg.p,
            cfg.sigma_s_db) == (28, 0.05, 0.1, 3.5, 0.0, 0.5, 0.0)
    net = reference_network(cfg)
    worst, bad = 0.0, []
    for name, fad in FADING_MODELS.items():
        ch = cfg.replace(**fad).channel()
        omega = normalized_powers(net, ch)
        for k, g_db in enumerate((0, 5, 10, 15, 20, 25)):
            gam = float(db_to_linear(g_db))
            closed = outage_conditional(gam, omega, ch)
            est = simulate_outage(gam, omega, ch, OracleConfig(1_000_000, seed=100 + k)).estimate
            tol = 4 * math.sqrt(est * (1 - est) / 1e6)
            z = abs(closed - est) / tol * 4 if tol > 0 else (0.0 if closed == est else math.inf)
            worst = max(worst, z)
            if abs(closed - est) > tol:
                bad.append(f"{name}@{g_db}dB closed={closed:.5g} oracle={est:.5g}")
    ok = not bad
    report(1, ok, f"18 points, worst deviation {worst:.2f} sigma (limit 4)" + ("; " + _fmt_rows(bad) if bad else ""))
    assert ok


def test_criterion_2_table1_theory(report, table1):
    got = table1.column("eps_theory")
    rel = [_rel(g, e) for g, e in zip(got, TABLE1_THEORY)]
    rows = [f"(M={int(r[0])},a={r[1]:g},G={int(r[2])}) {g:.4g} vs {e:.4g} ({100 * d:+.1f}%)"
            for r, g, e, d in zip(table1.rows, got, TABLE1_THEORY, np.sign(got - TABLE1_THEORY) * rel)]
    ok = max(rel) <= 0.005
    report(2, ok, f"max relative deviation {100 * max(rel):.2f}% (limit 0.5%): " + _fmt_rows(rows))
    assert ok


def test_criterion_3_table1_simulation(report, table1):
    got = table1.column("eps_sim")
    rel = [_rel(g, e) for g, e in zip(got, TABLE1_SIM)]
    rows = [f"(M={int(r[0])},a={r[1]:g},G={int(r[2])}) {g:.4g} vs {e:.4g}"
            for r, g, e in zip(table1.rows, got, TABLE1_SIM)]
    ok = max(rel) <= 0.07
    report(3, ok, f"N=10000, max relative deviation {100 * max(rel):.1f}% (limit 7%): " + _fmt_rows(rows))
    assert ok


def test_criterion_4_table2(report, table2):
    center = table2.column("eps_center")
    perim = table2.column("eps_perimeter")
    directional = bool(np.all(perim < center))
    spot_ok, rows = True, []
    for r, c, p in zip(table2.rows, center, perim):
        key = (int(r[0]), float(r[1]), int(r[2]), float(r[3]))
        if key in TABLE2_SPOT:
            ec, ep = TABLE2_SPOT[key]
            dc, dp = _rel(c, ec), _rel(p, ep)
            spot_ok &= dc <= 0.10 and dp <= 0.10
            rows.append(f"{key}: center {c:.4g} vs {ec} ({100 * dc:.0f}%), perimeter {p:.4g} vs {ep} ({100 * dp:.0f}%)")
    ok = spot_ok and directional
    report(4, ok, f"perimeter < center in {int(np.sum(perim < center))}/16 rows; spot checks "
                  f"{'within' if spot_ok else 'outside'} 10%: " + _fmt_rows(rows))
    assert ok


def test_criterion_5_rayleigh_specialization(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        M = int(rng.integers(0, 51))
        ch = ChannelParams(m0=1, m=np.ones(M), p=rng.uniform(0, 1, M), sinr_threshold=rng.uniform(0.2, 5))
        omega = NormalizedPowers(np.concatenate([[rng.uniform(1, 5000)], rng.uniform(0, 1, M) * 10 ** rng.uniform(-2, 3, M)]))
        z = rng.uniform(0, 1, 3)
        worst = max(worst, np.max(np.abs(ccdf_conditional(z, omega, ch) - ccdf_rayleigh(z, omega, ch))))
    ok = worst <= 1e-12
    report(5, ok, f"1000 instances, max |difference| {worst:.2e} (limit 1e-12)")
    assert ok


def test_criterion_6_closed_vs_quadrature(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(300):
        M = int(rng.integers(1, 11))
        alpha = 2.0 if k % 10 == 0 else rng.uniform(2, 5)
        ch = ChannelParams(m0=int(rng.integers(1, 5)), m=rng.uniform(0.5, 4, M), p=rng.uniform(0, 1, M),
                           alpha=alpha, spreading_gain=float(rng.choice([1, 32])))
        inputs = AnnulusAverageInputs(ch, r_ex=0.05, r_net=1.0, tx_distance=0.1)
        z = rng.uniform(0, 1)
        worst = max(worst, _rel(averaged_ccdf_closed(z, inputs), averaged_ccdf_quadrature(z, inputs)))
    ok = worst <= 1e-9
    report(6, ok, f"300 instances, max relative difference {worst:.2e} (limit 1e-9)")
    assert ok


def _euler_2f1(a, b, c, x):
    # Euler integral in extended precision; tanh-sinh copes with the endpoint powers
    # near t = 1 the nodes crowd together, hence the generous working precision
    with mpmath.workdps(50):
        a, b, c, x = (mpmath.mpf(v) for v in (a, b, c, x))
        knee = min(mpmath.mpf(1) / abs(x), mpmath.mpf("0.5")) if x else mpmath.mpf("0.5")
        value = mpmath.quad(lambda t: t ** (b - 1) * (1 - t) ** (c - b - 1) * (1 - x * t) ** (-a),
                            [0, knee, 1], maxdegree=10)
        return float(value * mpmath.gamma(c) / (mpmath.gamma(b) * mpmath.gamma(c - b)))


def test_criterion_7_hypergeometric(report):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        a = rng.uniform(0.5, 8)
        b = rng.uniform(0.5, 6)
        c = b + rng.uniform(0.2, 4)
        x = -rng.uniform(0, 100)
        worst = max(worst, _rel(gauss_2f1(a, b, c, x), _euler_2f1(a, b, c, x)))
    ident = max(abs(gauss_2f1(1.7, 0.9, 3.1, 0.0) - 1.0), _rel(gauss_2f1(1, 1, 2, -1), math.log(2)))
    ok = worst <= 1e-9 and ident <= 1e-12
    report(7, ok, f"100 random sets max relative error {worst:.2e} (limit 1e-9); identities {ident:.1e} (limit 1e-12)")
    assert ok


@pytest.mark.slow
def test_criterion_8_qualitative_figures(report):
    f_cfg = preset_config("fig-f", realizations=10_000)
    f = fig_f(f_cfg)
    M = f.column("M")
    eps_cols = [c for c in f.columns if c.startswith("eps_")]
    a_ok = all(np.all(np.diff(f.column(c)) >= 0) for c in eps_cols)
    k50 = int(np.flatnonzero(M == 50)[0])
    by_gain = [f.column(c)[k50] for c in ("eps_mixed", "eps_mixed_G8", "eps_mixed_G32", "eps_mixed_G100")]
    b_ok = bool(np.all(np.diff(by_gain) < 0))
    g = fig_g(preset_config("fig-g", realizations=10_000))
    tc1, tc32 = g.column("tc_mixed")[k50], g.column("tc_mixed_G32")[k50]
    c_ok = tc32 > tc1
    widths = fig_d(preset_config("fig-d", realizations=10_000)).notes["interquantile_width"]
    w = [widths[k] for k in ("mixed", "mixed_G8", "mixed_G32", "mixed_G100")]
    d_ok = bool(np.all(np.diff(w) < 0))
    ok = a_ok and b_ok and c_ok and d_ok
    report(8, ok, f"(a) nondecreasing in M: {a_ok}; (b) M=50 eps by G {[f'{v:.3g}' for v in by_gain]}: {b_ok}; "
                  f"(c) capacity G=32 {tc32:.3g} > G=1 {tc1:.3g}: {c_ok}; "
                  f"(d) 10-90% widths {[f'{v:.3g}' for v in w]}: {d_ok}")
    assert ok


def test_criterion_9_determinism(report, tmp_path):
    small = ["--realizations", "200", "--trials", "20000", "--seed", "11"]
    mismatched = []
    for name in sorted(PRESETS):
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / run
            assert main(["--preset", name, *small, "--out", str(out)]) == 0
            outputs.append((out / f"{name}.csv").read_bytes())
        if outputs[0] != outputs[1]:
            mismatched.append(name)
    ok = not mismatched
    report(9, ok, f"{len(PRESETS)} presets rerun with seed 11, byte-identical CSV: "
                  + ("all" if ok else f"mismatch in {mismatched}"))
    assert ok
