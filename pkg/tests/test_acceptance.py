"""Acceptance criteria, each at its stated tolerance.

Every test records a single ``criterion N [PASS|FAIL] ...`` line; the lines
are printed in a section of their own at the end of the pytest run.
Run this file directly to see only those lines.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, MIXED4, MIXED8, UNIT4, UNIT8
from lpflow.ensembles import gen_hermitian
from lpflow.harness import default_config, run_suite
from lpflow.quadrature import QuadratureSpec
from lpflow.schur import estimate_Kp, reevaluate_witness
from lpflow.specflow import (
    eta_potential,
    integral_sf_bounded,
    integral_sf_unbounded,
    linear_path,
    shift_path,
    verify_diff_formula,
)

ALGEBRAS = [UNIT4, MIXED4, UNIT8, MIXED8]
CAMPAIGN_ALGEBRAS = [[{"size": n, "weight": w} for n, w in a.blocks] for a in ALGEBRAS]
P_VALUES = [1.0, 1.5, 2.0, 3.0, 10.0]
INEQUALITY_SUITES = ["prop21", "prop22", "thm03i", "thm03ii", "eq25", "A2", "lemmaA1", "corA1", "bks"]
IDENTITY_SUITES = ["id_corners", "id_dilation", "id_phi", "id_sgn_phi", "id_prop32", "id_conjugation"]
DIM8 = [UNIT8, MIXED8]


def record(n, ok, text):
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {text}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def campaign(suites, trials, **kw):
    cfg = default_config(suites=suites, p_values=P_VALUES, algebras=CAMPAIGN_ALGEBRAS,
                         trials=trials, suite_trials={}, **kw)
    return run_suite(cfg)


def random_path(seed, alg):
    rng = np.random.default_rng(seed)
    D0 = gen_hermitian(alg, 2.0, rng)
    return linear_path(D0, gen_hermitian(alg, 2.0, rng) - D0, 33)


def test_criterion_1_inequality_suites():
    t0 = time.perf_counter()
    b = campaign(INEQUALITY_SUITES, 500)
    elapsed = time.perf_counter() - t0
    rows = b.summary()
    covered = {(r["name"], r["p"], r["algebra"]) for r in rows if r["trials"] >= 500}
    names = {r["name"] for r in rows}
    expected = set(INEQUALITY_SUITES) | {"thm03i_phi"}
    full = names == expected and len(covered) == len(rows)
    pass_rate = min(r["pass_rate"] for r in rows)
    worst = min(r["worst_margin"] for r in rows)
    ok = b.all_pass and full and elapsed < 600
    record(1, ok, f"inequality suites: {len(b.reports)} reports over {len(rows)} (statement, p, algebra) "
                  f"cells of >= 500 trials, pass rate {pass_rate:.6f}, worst slack {worst:.3e}, "
                  f"{elapsed:.1f} s (limit 600 s)")


def test_criterion_2_identities():
    b = campaign(IDENTITY_SUITES, 100)
    worst = max(r.lhs for r in b.reports)
    counts = {}
    for r in b.rows:
        counts[r["report"].name] = counts.get(r["report"].name, 0) + 1
    ok = b.all_pass and worst <= 1e-9 and len(counts) == 9 and min(counts.values()) >= 100
    record(2, ok, f"identity residuals: {len(counts)} identities, >= {min(counts.values())} instances each, "
                  f"max residual {worst:.3e} (limit 1e-9)")


def test_criterion_3_schur_constant():
    est2 = estimate_Kp(2.0, (8,), 200, 7)
    parts = [f"K_2 = {est2.value:.12f} (limit 1 + 1e-8)"]
    ok = est2.value <= 1.0 + 1e-8
    for p in (1.5, 4.0):
        est = estimate_Kp(p, (8,), 200, 7)
        gap = abs(reevaluate_witness(est.max_witness) - est.value)
        ok = ok and np.isfinite(est.value) and est.max_witness and gap <= 1e-8
        parts.append(f"K_{p:g} = {est.value:.6f} witness gap {gap:.1e}")
    record(3, ok, "Schur constant: " + ", ".join(parts))


def test_criterion_4_truncated_shift():
    t0 = time.perf_counter()
    path = shift_path(20)
    res = integral_sf_unbounded(path, 2.0, QuadratureSpec(1e-8))
    elapsed = time.perf_counter() - t0
    err = abs(res.integral_sf - 1.0)
    ok = res.crossing_sf == 1.0 and err <= 1e-4 and elapsed < 10
    record(4, ok, f"truncated shift K=20: crossing {res.crossing_sf:g}, integral {res.integral_sf:.10f}, "
                  f"|integral - 1| = {err:.2e} (limit 1e-4), {elapsed:.2f} s (limit 10 s)")


def test_criterion_5_one_form_exactness():
    worst, ratios = 0.0, []
    for i in range(50):
        path = random_path(5000 + i, DIM8[i % 2])
        res = integral_sf_unbounded(path, 2.0, QuadratureSpec(1e-8))
        exact = eta_potential(path.at(1.0), 2.0) - eta_potential(path.at(0.0), 2.0)
        worst = max(worst, abs(res.numerator - exact))
        ratios.append(verify_diff_formula(path, 1, 0.5, 1e-2) / verify_diff_formula(path, 1, 0.5, 5e-3))
    ok = worst <= 1e-7 and 3.5 <= min(ratios) and max(ratios) <= 4.5
    record(5, ok, f"one-form exactness on 50 paths (dim 8): max residual {worst:.2e} (limit 1e-7), "
                  f"halving ratios in [{min(ratios):.3f}, {max(ratios):.3f}] (required [3.5, 4.5])")


def test_criterion_6_bounded_unbounded_consistency():
    worst = 0.0
    for i in range(20):
        path = random_path(6000 + i, DIM8[i % 2])
        for q in (3.0, 4.0, 5.0):
            b = integral_sf_bounded(path, q, QuadratureSpec(1e-8), derivative="fd")
            worst = max(worst, abs(b.consistency_delta))
    record(6, worst <= 1e-6, f"bounded (finite-difference route) vs unbounded at m = q/2 + 1, q in {{3, 4, 5}} "
                             f"on 20 paths: max |delta| {worst:.2e} (limit 1e-6)")


def test_criterion_7_fredholm():
    b = campaign(["summability", "chern"], 100)
    summ = [r for r in b.reports if r.name == "summability"]
    chern = [r for r in b.reports if r.name == "chern"]
    ns = {r["trial"] % 2 for r in b.rows if r["suite"] == "chern"}
    ws, wc = max(r.lhs for r in summ), max(r.lhs for r in chern)
    ok = ws <= 1e-10 and wc <= 1e-9 and len(chern) >= 100 and ns == {0, 1}
    record(7, ok, f"Fredholm checks: summability norm gap {ws:.2e} over {len(summ)} modules (limit 1e-10), "
                  f"Chern cyclicity {wc:.2e} over {len(chern)} tuples with n in {{0, 1}} (limit 1e-9)")


def test_criterion_8_reproducibility(tmp_path):
    cfg = default_config()
    run_suite(cfg, tmp_path / "a")
    run_suite(cfg, tmp_path / "b")
    a = (tmp_path / "a" / "reports.jsonl").read_bytes()
    same = a == (tmp_path / "b" / "reports.jsonl").read_bytes()
    record(8, same, f"default campaign run twice: reports.jsonl {len(a)} bytes, "
                    f"{'byte-identical' if same else 'DIFFERENT'}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
