"""Acceptance criteria; each test prints one PASS/FAIL line."""

import math
import time
from pathlib import Path

import pytest

from fraclap import harness
from fraclap.domain import Domain
from fraclap.forms import compare_forms, q_dr_fourier, q_dr_gagliardo
from fraclap.pointwise import fourier_pointwise, riesz_pointwise
from fraclap.specfun import bessel_k, extension_constant, gagliardo_constant, gamma_fn
from fraclap.testfunc import poly_bump, sine_mode

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
D = Domain.interval()


@pytest.fixture
def verdict(capsys):
    """Record a criterion outcome as one line, then fail the test if needed."""

    def emit(n, title, problems, elapsed, budget):
        if elapsed > budget:
            problems = problems + [f"runtime {elapsed:.1f}s exceeds {budget:.0f}s"]
        status = "PASS" if not problems else "FAIL"
        detail = f"{elapsed:.2f}s" if not problems else "; ".join(problems[:3])
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {status}  {title} ({detail})")
        assert not problems, problems

    return emit


def _run(path, **kw):
    cfg = harness.load_config(CONFIGS / path)
    for k, v in kw.items():
        setattr(cfg, k, v)
    return harness.run_suite(cfg)


@pytest.fixture(scope="module")
def identities():
    t0 = time.perf_counter()
    rows, status = _run("identities_s2.ini")
    return rows, status, time.perf_counter() - t0


def test_criterion_01_special_functions(verdict):
    t0 = time.perf_counter()
    bad = []
    for tau in (0.01, 0.1, 1.0, 10.0, 30.0):
        ref = math.sqrt(math.pi / (2 * tau)) * math.exp(-tau)
        if abs(bessel_k(0.5, tau).value - ref) > 1e-10 * ref:
            bad.append(f"K_1/2({tau})")
    if abs(extension_constant(0.5) - 1.0) > 1e-12:
        bad.append("C_0.5")
    if abs(gagliardo_constant(1, 0.5) - 1 / (2 * math.pi)) > 1e-12:
        bad.append("c_1,0.5")
    for sigma in (0.25, 0.5, 0.75):
        v = 1e-4**sigma * bessel_k(sigma, 1e-4).value / (gamma_fn(sigma) * 2 ** (sigma - 1))
        if not 0.99 <= v <= 1.01:
            bad.append(f"small-tau law sigma={sigma}: {v}")
    verdict(1, "special functions", bad, time.perf_counter() - t0, 1.0)


def test_criterion_02_route_equivalence(verdict):
    t0 = time.perf_counter()
    bad = []
    for u in (sine_mode(1), sine_mode(2), poly_bump(2), poly_bump(3)):
        for s in (0.25, 0.5, 0.75):
            f, g = q_dr_fourier(u, s), q_dr_gagliardo(u, D, s)
            rel = abs(f.value - g.value) / f.value
            if rel > 1e-5:
                bad.append(f"{u.name} s={s}: rel {rel:.2e}")
    verdict(2, "Fourier and double-integral routes agree to 1e-5", bad, time.perf_counter() - t0, 30.0)


def _form_suite_problems(rows):
    bad = [f"{r.function} s={r.s}: {r.verdict}" for r in rows if r.verdict != "pass"]
    per_s = {}
    for r in rows:
        per_s.setdefault(r.s, set()).add(r.function)
    bad += [f"s={s}: only {len(f)} functions" for s, f in per_s.items() if len(f) < 3]
    grid = {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.25, 1.5, 1.75, 2.25, 2.5, 2.75}
    if set(per_s) != grid:
        bad.append(f"grid mismatch {sorted(grid ^ set(per_s))}")
    return bad


def test_criterion_03_dr_vs_nsp_forms(verdict):
    t0 = time.perf_counter()
    rows, status = _run("forms_t13.ini")
    companions = [r for r in rows if r.predicted == "left_greater_or_equal"]
    rows = [r for r in rows if (r.left_label, r.right_label) == ("DR", "NSp")]
    bad = _form_suite_problems(rows)
    bad += [f"{r.left_label}>={r.right_label} {r.function} s={r.s}" for r in companions if r.verdict != "pass"]
    bad += [f"{r.function} s={r.s}: margin not > 3x error" for r in rows
            if abs(r.margin) <= 3 * (r.left_error + r.right_error)]
    verdict(3, "DR vs NSp form ordering", bad, time.perf_counter() - t0, 120.0)


def test_criterion_04_dsp_vs_dr_forms(verdict):
    t0 = time.perf_counter()
    rows, status = _run("forms_t11.ini")
    bad = _form_suite_problems(rows)
    verdict(4, "DSp vs DR form ordering", bad, time.perf_counter() - t0, 120.0)


def test_criterion_05_heinz_and_regional(verdict):
    t0 = time.perf_counter()
    bad = []
    for u in (sine_mode(1), sine_mode(2), poly_bump(2), poly_bump(3)):
        for s in (0.25, 0.5, 0.75):
            for pair in ("DSp_vs_NSp", "DR_vs_NR"):
                r = compare_forms(u, s, pair)
                if r.margin < -r.combined_error:
                    bad.append(f"{pair} {u.name} s={s}: {r.margin:.3e}")
    verdict(5, "DSp >= NSp and DR >= NR", bad, time.perf_counter() - t0, 30.0)


def _pointwise_problems(rows):
    return [f"{r.function} s={r.s}: {r.verdict}" for r in rows
            if r.verdict != "pass" or r.margin <= 3 * (r.left_error + r.right_error)]


def test_criterion_06_pointwise_dr_vs_nsp(verdict):
    t0 = time.perf_counter()
    rows1, _ = _run("pointwise_t14.ini")
    rows2, _ = _run("pointwise_t14_2d.ini")
    bad = _pointwise_problems(rows1 + rows2)
    if len(rows1) != 2 * 3 * 9 or len(rows2) != 9:
        bad.append(f"row counts {len(rows1)}, {len(rows2)}")
    verdict(6, "pointwise DR > NSp on convex domains (1D and 2D)", bad, time.perf_counter() - t0, 180.0)


def test_criterion_07_pointwise_dsp_vs_dr(verdict):
    t0 = time.perf_counter()
    rows, _ = _run("pointwise_t12.ini")
    bad = _pointwise_problems(rows)
    if len(rows) != 54:
        bad.append(f"{len(rows)} rows")
    verdict(7, "pointwise DSp > DR", bad, time.perf_counter() - t0, 60.0)


def test_criterion_08_counterexample(verdict):
    t0 = time.perf_counter()
    rows, _ = _run("counterexample_r31.ini")
    bad = []
    for r in rows:
        if abs(r.right_value) > 1e-8 or r.right_error > 1e-8:
            bad.append(f"NSp at {r.function}: {r.right_value:.2e} +- {r.right_error:.1e}")
        if not r.left_value < -3 * r.left_error:
            bad.append(f"DR at {r.function}: {r.left_value:.2e}")
    if len(rows) != 9:
        bad.append(f"{len(rows)} rows")
    verdict(8, "sign reversal on a disconnected domain", bad, time.perf_counter() - t0, 30.0)


def test_criterion_09_form_energy_identities(verdict, identities):
    rows, _, elapsed = identities
    bad = []
    ids = [r for r in rows if r.right_label in ("scaled_E_NSp", "scaled_E_DR") and r.s > 0]
    for r in ids:
        if abs(r.left_value - r.right_value) > 1e-3 * r.left_value:
            bad.append(f"{r.left_label} {r.function} s={r.s}")
    need = {("Q_NSp", f, s) for f in ("sin(1)", "psi(1)", "bump(2)") for s in (0.25, 0.5, 0.75)}
    need |= {("Q_DR", f, s) for f in ("sin(1)", "bump(2)") for s in (0.25, 0.5, 0.75)}
    have = {(r.left_label, r.function, r.s) for r in ids}
    bad += [f"missing {m}" for m in sorted(need - have)]
    closed = [r for r in rows if r.right_label == "closed_form"]
    if len(closed) != 1 or abs(closed[0].left_value - math.pi) > 1e-8:
        bad.append("closed form Q_1/2[psi_1] != pi")
    verdict(9, "form/energy identities", bad, elapsed, 120.0)


def test_criterion_10_energy_chain(verdict, identities):
    rows, _, elapsed = identities
    chain = [r for r in rows if "scaled_E_NSp(w_DR)" in (r.left_label, r.right_label)]
    bad = [f"{r.function} s={r.s}: {r.left_label} vs {r.right_label}" for r in chain if r.verdict != "pass"]
    if len(chain) != 2 * 2 * 3:
        bad.append(f"{len(chain)} chain rows")
    verdict(10, "energy restriction chain", bad, elapsed, 120.0)


def test_criterion_11_dual_identities(verdict, identities):
    rows, _, elapsed = identities
    t0 = time.perf_counter()
    dual = [r for r in rows if r.right_label == "dual_energy"]
    bad = [f"dual {r.function} s={r.s}" for r in dual
           if abs(r.left_value - r.right_value) > 1e-3 * abs(r.left_value)]
    if len(dual) < 6:
        bad.append(f"{len(dual)} dual rows")
    for u in (sine_mode(1), sine_mode(2), poly_bump(2)):
        for sigma in (0.1, 0.25, 0.4):
            for x in (0.3, 0.5, 1.7):
                r, f = riesz_pointwise(u, sigma, x), fourier_pointwise(u, -sigma, x)
                if abs(r.value - f.value) > 1e-4 * abs(f.value) + 1e-14:
                    bad.append(f"riesz {u.name} sigma={sigma} x={x}")
    verdict(11, "dual identities and Riesz potential", bad, elapsed + time.perf_counter() - t0, 60.0)


def test_criterion_12_determinism(verdict):
    t0 = time.perf_counter()
    bad = []
    for path in ("forms_t13.ini", "counterexample_r31.ini", "pointwise_t14_2d.ini"):
        cfg = harness.load_config(CONFIGS / path)
        a = harness.render_report(harness.run_suite(cfg, n_workers=1)[0], cfg.fmt)
        b = harness.render_report(harness.run_suite(cfg, n_workers=4)[0], cfg.fmt)
        if a.encode() != b.encode():
            bad.append(path)
    verdict(12, "byte-identical reports across runs", bad, time.perf_counter() - t0, 120.0)
