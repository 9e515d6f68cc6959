"""Scenario configuration, comparison suites and report emission.

Config files are INI-style (``configparser``)::

    [run]
    suite = forms-T13
    format = csv                 ; csv | json
    output = report.csv          ; optional, stdout otherwise

    [domain]
    intervals = (0,1)            ; or (0,1) (2,3); or rectangle = (0,1) x (0,1)

    [functions]
    list = sin(1), sin(2), bump(2), bump(3) - mean

    [grid]
    s = 0.25, 0.5, 0.75
    points = 0.1, 0.5            ; pointwise suites; 'auto' = interior grid
    n_points = 9

    [numerics]
    n_modes = 4096
    allowed_inconclusive = 0.0
    tolerance = 1e-3             ; identities

Function descriptors: ``sin(j)``, ``cos(j)``, ``psi(j)`` (unit-norm Neumann
mode), ``bump(p)``, ``odd_bump(p)``, ``product_bump(p)`` (2D), optionally
``@(a,b)`` to place it on another interval, and a trailing ``- mean`` to
subtract the mean.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from numpy.polynomial import Polynomial

from fraclap import forms, pointwise
from fraclap.domain import DIRICHLET, NEUMANN, Domain, build_basis
from fraclap.testfunc import (
    PolyPiece,
    TestFunction,
    check_mean_zero,
    constant,
    cosine_mode,
    poly_bump,
    product_bump,
    sine_mode,
)

__all__ = [
    "SUITES",
    "CSV_COLUMNS",
    "ConfigError",
    "ScenarioConfig",
    "ReportRow",
    "parse_config",
    "load_config",
    "parse_function",
    "run_suite",
    "exit_status",
    "emit_report",
    "render_report",
    "read_report",
    "workers",
]

SUITES = (
    "forms-T11",
    "forms-T13",
    "pointwise-T12",
    "pointwise-T14",
    "counterexample-R31",
    "identities-S2",
    "specfun-selftest",
)

CSV_COLUMNS = (
    "suite", "s", "function", "left_label", "left_value", "left_error",
    "right_label", "right_value", "right_error", "margin", "predicted", "verdict",
)

_FLOAT_FIELDS = ("s", "left_value", "left_error", "right_value", "right_error", "margin")


class ConfigError(ValueError):
    """Invalid scenario configuration, with location information."""


# -- rows -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    suite: str
    s: float
    function: str
    left_label: str
    left_value: float
    left_error: float
    right_label: str
    right_value: float
    right_error: float
    margin: float
    predicted: str
    verdict: str


def _fmt(v: float) -> str:
    return "%.17g" % v


def render_report(rows, fmt: str = "csv") -> str:
    if not rows:
        raise ValueError("empty report")
    if fmt == "json":
        return json.dumps([asdict(r) for r in rows], indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = asdict(r)
        w.writerow([_fmt(d[c]) if c in _FLOAT_FIELDS else d[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_report(rows, fmt: str = "csv", path=None) -> str:
    """Write the report to ``path`` (or return it for stdout)."""
    text = render_report(rows, fmt)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def read_report(text: str, fmt: str = "csv") -> list[ReportRow]:
    if fmt == "json":
        return [ReportRow(**d) for d in json.loads(text)]
    rows = []
    for d in csv.DictReader(io.StringIO(text)):
        rows.append(ReportRow(**{k: (float(v) if k in _FLOAT_FIELDS else v) for k, v in d.items()}))
    return rows


def exit_status(rows, allowed_inconclusive: float = 0.0) -> int:
    """0: clean; 1: any fail; 2: only inconclusive rows exceed the allowance."""
    if any(r.verdict == "fail" for r in rows):
        return 1
    n_inc = sum(r.verdict == "inconclusive" for r in rows)
    if rows and n_inc / len(rows) > allowed_inconclusive:
        return 2
    return 0


# -- config ---------------------------------------------------------------------------


@dataclass
class ScenarioConfig:
    suite: str
    domain: Domain
    functions: list = field(default_factory=list)
    s_grid: list = field(default_factory=list)
    points: list | None = None
    n_points: int = 9
    n_modes: int | None = None
    allowed_inconclusive: float = 0.0
    tolerance: float = 1e-3
    fmt: str = "csv"
    output: str | None = None


_DEFAULTS = {
    "forms-T11": dict(domain="(0,1)", s="-0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.25, 1.5, 1.75, 2.25, 2.5, 2.75",
                      functions="sin(1), sin(2), bump(2), bump(3), bump(4), bump(5), odd_bump(2), bump(3) - mean"),
    "forms-T13": dict(domain="(0,1)", s="-0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.25, 1.5, 1.75, 2.25, 2.5, 2.75",
                      functions="sin(1), sin(2), bump(2), bump(3), bump(4), bump(5), odd_bump(2), bump(3) - mean"),
    "pointwise-T12": dict(domain="(0,1)", s="0.25, 0.5, 0.75", functions="sin(1), bump(2)"),
    "pointwise-T14": dict(domain="(0,1)", s="0.25, 0.5, 0.75", functions="sin(1), bump(2)"),
    "counterexample-R31": dict(domain="(0,1) (2,3)", s="0.25, 0.5, 0.75", functions="bump(2)",
                               points="2.25, 2.5, 2.75"),
    "identities-S2": dict(domain="(0,1)", s="0.25, 0.5, 0.75", functions="sin(1), psi(1), bump(2)"),
    "specfun-selftest": dict(domain="(0,1)", s="0.25, 0.5, 0.75", functions=""),
}

_PAIR = re.compile(r"\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)")
_DESC = re.compile(
    r"^(?P<base>sin|cos|psi|bump|odd_bump|product_bump)\((?P<arg>\d+)\)"
    r"(?:@\(\s*(?P<a>[-+0-9.eE]+)\s*,\s*(?P<b>[-+0-9.eE]+)\s*\))?"
    r"(?P<mean>\s*-\s*mean)?$"
)


def _key_lines(text: str) -> dict:
    """Map ``(section, key)`` to its line number for diagnostics."""
    out, sec = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        t = line.strip()
        if t.startswith("[") and t.endswith("]"):
            sec = t[1:-1].strip()
        elif "=" in t and sec and not t.startswith((";", "#")):
            out[(sec, t.split("=", 1)[0].strip().lower())] = i
    return out


def parse_domain(text: str) -> Domain:
    text = text.strip()
    if "x" in text:
        parts = text.split("x")
        if len(parts) != 2:
            raise ValueError("rectangle must read '(a,b) x (c,d)'")
        r = [_PAIR.fullmatch(p.strip()) for p in parts]
        if not all(r):
            raise ValueError(f"bad rectangle {text!r}")
        return Domain.rectangle(*[(float(m.group(1)), float(m.group(2))) for m in r])
    ivs = [(float(a), float(b)) for a, b in _PAIR.findall(text)]
    if not ivs or _PAIR.sub("", text).strip():
        raise ValueError(f"bad interval list {text!r}")
    return Domain(tuple(ivs))


def parse_function(desc: str, domain: Domain):
    """Build a test function from a descriptor; see the module docstring."""
    m = _DESC.match(desc.strip())
    if not m:
        raise ValueError(f"unknown function descriptor {desc!r}")
    base, k = m.group("base"), int(m.group("arg"))
    if base == "product_bump":
        if domain.dim != 2:
            raise ValueError("product_bump needs a rectangle domain")
        (a1, b1), (a2, b2) = domain.components[0]
        u = product_bump(k, a1, b1, a2, b2)
        u.name = desc.strip()
        return u
    if domain.dim != 1:
        raise ValueError(f"{base} is one-dimensional")
    if m.group("a") is not None:
        a, b = float(m.group("a")), float(m.group("b"))
    else:
        a, b = domain.components[0]
    if base == "sin":
        u = sine_mode(k, a, b)
    elif base == "cos":
        u = cosine_mode(k, a, b)
    elif base == "psi":
        u = cosine_mode(k, a, b, amplitude=math.sqrt(2.0 / (b - a)))
    elif base == "bump":
        u = poly_bump(k, a, b)
    else:
        pb = poly_bump(k, a, b)
        u = TestFunction([PolyPiece(a, b, pb.pieces[0].poly * Polynomial([0.0, 1.0]))])
    if m.group("mean"):
        u = u - constant(u.integral() / (b - a), a, b)
    return u.renamed(re.sub(r"\s+", "", desc))


def _floats(text: str) -> list[float]:
    return [float(t) for t in re.split(r"[,\s]+", text.strip()) if t]


def parse_config(text: str, suite: str | None = None) -> ScenarioConfig:
    """Parse and validate a scenario; ``suite`` overrides ``[run] suite``."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from exc
    lines = _key_lines(text)

    def get(sec, key, default=None):
        return cp.get(sec, key, fallback=default) if cp.has_section(sec) else default

    def fail(sec, key, msg):
        ln = lines.get((sec, key))
        where = f"line {ln}, " if ln else ""
        raise ConfigError(f"{where}[{sec}] {key}: {msg}")

    suite = suite or get("run", "suite")
    if suite not in SUITES:
        fail("run", "suite", f"unknown suite {suite!r}; choose one of {', '.join(SUITES)}")
    dflt = _DEFAULTS[suite]
    rect = get("domain", "rectangle")
    try:
        domain = parse_domain(rect if rect else get("domain", "intervals", dflt["domain"]))
    except ValueError as exc:
        fail("domain", "rectangle" if rect else "intervals", str(exc))
    try:
        s_grid = _floats(get("grid", "s", dflt["s"]))
    except ValueError as exc:
        fail("grid", "s", str(exc))
    if any(s == 0.0 or s != s for s in s_grid):
        fail("grid", "s", "orders must be nonzero numbers")
    funcs = []
    ftext = get("functions", "list", dflt["functions"])
    for d in [t for t in re.split(r",(?![^()]*\))", ftext) if t.strip()]:
        try:
            funcs.append(parse_function(d, domain))
        except ValueError as exc:
            fail("functions", "list", str(exc))
    points = None
    ptext = get("grid", "points", dflt.get("points", "auto"))
    if ptext.strip() != "auto":
        try:
            if domain.dim == 2:
                points = [(float(a), float(b)) for a, b in _PAIR.findall(ptext)]
            else:
                points = _floats(ptext)
        except ValueError as exc:
            fail("grid", "points", str(exc))
    try:
        n_points = int(get("grid", "n_points", "9"))
        n_modes = get("numerics", "n_modes")
        n_modes = int(n_modes) if n_modes else None
        allowed = float(get("numerics", "allowed_inconclusive", "0"))
        tol = float(get("numerics", "tolerance", "1e-3"))
    except ValueError as exc:
        raise ConfigError(f"[grid]/[numerics]: {exc}") from exc
    fmt = get("run", "format", "csv")
    if fmt not in ("csv", "json"):
        fail("run", "format", f"expected csv or json, got {fmt!r}")
    cfg = ScenarioConfig(suite, domain, funcs, s_grid, points, n_points, n_modes, allowed, tol, fmt,
                         get("run", "output"))
    _validate(cfg, fail)
    return cfg


def _validate(cfg: ScenarioConfig, fail):
    if cfg.suite.startswith("pointwise"):
        if any(not 0.0 < s < 1.0 for s in cfg.s_grid):
            fail("grid", "s", "pointwise suites need 0 < s < 1")
        if any(not u.nonnegative for u in cfg.functions):
            fail("functions", "list", "pointwise comparisons need nonnegative functions")
        if cfg.suite == "pointwise-T14" and not cfg.domain.is_convex:
            fail("domain", "intervals", "pointwise-T14 requires a convex domain")
    if cfg.suite == "counterexample-R31":
        if cfg.domain.dim != 1 or len(cfg.domain.components) < 2:
            fail("domain", "intervals", "counterexample-R31 requires a disconnected domain")
        if any(not u.nonnegative for u in cfg.functions):
            fail("functions", "list", "counterexample needs nonnegative functions")
    if cfg.suite == "identities-S2" and any(not 0.0 < s < 1.0 for s in cfg.s_grid):
        fail("grid", "s", "identities are stated for 0 < s < 1")
    for u in cfg.functions:
        if not cfg.domain.contains_function(u):
            fail("functions", "list", f"{u.name} is not supported in {cfg.domain}")


def load_config(path, suite: str | None = None) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, suite)


def default_config(suite: str) -> ScenarioConfig:
    return parse_config(f"[run]\nsuite = {suite}\n")


# -- execution ------------------------------------------------------------------------


def workers() -> int:
    """Pool width from ``FRACLAP_WORKERS`` (default: CPU count, at most 8)."""
    env = os.environ.get("FRACLAP_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"FRACLAP_WORKERS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def _row(suite, s, name, lab_l, lv, le, lab_r, rv, re_, predicted, verdict):
    return ReportRow(suite, float(s), name, lab_l, float(lv), float(le), lab_r, float(rv), float(re_),
                     float(lv) - float(rv), predicted, verdict)


def _admissible(u, s, pair):
    if s > 0 and s >= u.smoothness:
        return False
    if s < 0 and not check_mean_zero(u, forms.MEAN_ZERO_TOL):
        # NSp needs zero mean at every negative order, DR once |xi|^(2s) stops being integrable
        if "NSp" in pair or s <= -0.5:
            return False
    return True


def _form_job(cfg, pair, u, s):
    n = cfg.n_modes or forms.DEFAULT_N
    try:
        rec = forms.compare_forms(u, s, pair, cfg.domain, n)
    except forms.TailUnbounded:
        return None
    pred = rec.predicted or "none"
    return _row(cfg.suite, s, u.name, rec.left_label, rec.left.value, rec.left.error,
                rec.right_label, rec.right.value, rec.right.error, pred, rec.verdict)


def _companion_rows(cfg, u, s):
    """Non-strict companions of the form ordering: DSp >= NSp and DR >= NR."""
    n = cfg.n_modes or forms.DEFAULT_N
    out = []
    for pair in ("DSp_vs_NSp", "DR_vs_NR"):
        try:
            rec = forms.compare_forms(u, s, pair, cfg.domain, n)
        except forms.TailUnbounded:
            continue
        out.append(_geq_row(cfg.suite, s, u.name, rec.left_label, rec.left.value, rec.left.error,
                            rec.right_label, rec.right.value, rec.right.error))
    return out


def _pointwise_job(cfg, pair, u, s, x):
    rec = pointwise.compare_pointwise(u, s, [x], pair, cfg.domain, cfg.n_modes)[0]
    xs = ",".join("%.6g" % t for t in np.atleast_1d(x))
    return _row(cfg.suite, s, f"{u.name}@x={xs}", rec.left.operator, rec.left.value, rec.left.error,
                rec.right.operator, rec.right.value, rec.right.error, rec.predicted or "none", rec.verdict)


def _counter_job(cfg, u, s, x):
    rep = pointwise.counterexample_disconnected(u, s, [x], cfg.domain, cfg.n_modes or 200)
    d, n = rep.dr[0], rep.nsp[0]
    # DR < NSp on the untouched component
    margin = d.value - n.value
    conclusive = abs(margin) > forms.CONCLUSIVE_FACTOR * (d.error + n.error)
    ok = rep.reversed_sign and margin < 0
    verdict = "pass" if ok else ("fail" if conclusive else "inconclusive")
    return _row(cfg.suite, s, f"{u.name}@x={x:.6g}", "DR", d.value, d.error, "NSp", n.value, n.error,
                "right_greater", verdict)


def _equal_row(suite, s, name, ll, lv, le, rl, rv, re_, tol):
    ok = abs(lv - rv) <= tol * abs(lv) + le + re_
    return _row(suite, s, name, ll, lv, le, rl, rv, re_, "equal", "pass" if ok else "fail")


def _geq_row(suite, s, name, ll, lv, le, rl, rv, re_):
    ok = lv - rv >= -(le + re_)
    return _row(suite, s, name, ll, lv, le, rl, rv, re_, "left_greater_or_equal", "pass" if ok else "fail")


def _identity_jobs(cfg):
    from fraclap import extension as ext
    from fraclap.specfun import extension_constant

    suite, tol = cfg.suite, cfg.tolerance
    n = cfg.n_modes or forms.DEFAULT_N
    D = cfg.domain
    jobs = []

    def nsp_identity(u, s):
        r = ext.verify_form_energy_identity(u, s, "NSp", D, n, tol)
        return [_equal_row(suite, s, u.name, "Q_NSp", r.form, r.form_error, "scaled_E_NSp",
                           r.scaled_energy, r.energy_error, tol)]

    def dr_identity(u, s):
        r = ext.verify_form_energy_identity(u, s, "DR", D, n, tol)
        c = ext.energy_chain(u, s, D, n)
        return [
            _equal_row(suite, s, u.name, "Q_DR", r.form, r.form_error, "scaled_E_DR",
                       r.scaled_energy, r.energy_error, tol),
            _geq_row(suite, s, u.name, "scaled_E_NSp(w_DR)", c.restricted, c.error, "Q_NSp", c.q_nsp, 0.0),
            _geq_row(suite, s, u.name, "Q_DR", c.q_dr, c.error, "scaled_E_NSp(w_DR)", c.restricted, 0.0),
        ]

    def dual_identity(u, s):
        basis = build_basis(D, NEUMANN, n)
        f = ext.dual_nsp_extension(u, s, basis)
        Et = ext.dual_energy(f)
        q = forms.q_nsp(u, -s, basis)
        scale = 2.0 * s / extension_constant(s)
        return [_equal_row(suite, -s, u.name, "Q_NSp", q.value, q.error, "dual_energy",
                           -scale * Et.value, scale * Et.error, tol)]

    for s in cfg.s_grid:
        for u in cfg.functions:
            jobs.append((nsp_identity, u, s))
            if u.first_jump_order() >= 1:
                jobs.append((dr_identity, u, s))
            if check_mean_zero(u, forms.MEAN_ZERO_TOL):
                jobs.append((dual_identity, u, s))
        jobs.append((dual_identity, parse_function("sin(2)", D), s))

    def closed_form():
        a, b = D.components[0]
        psi = cosine_mode(1, a, b, amplitude=math.sqrt(2.0 / (b - a))).renamed("psi(1)")
        q = forms.q_nsp(psi, 0.5, build_basis(D, NEUMANN, n))
        return [_equal_row(suite, 0.5, "psi(1)", "Q_NSp", q.value, q.error, "closed_form",
                           math.pi / (b - a), 0.0, 1e-8)]

    return [lambda f=f, u=u, s=s: f(u, s) for f, u, s in jobs] + [closed_form]


def _selftest_jobs(cfg):
    from fraclap import specfun
    from fraclap.quadrature import validation_library

    suite = cfg.suite
    jobs = []
    for tau in (0.01, 0.1, 1.0, 10.0, 30.0):
        def k_half(tau=tau):
            k = specfun.bessel_k(0.5, tau)
            ref = math.sqrt(math.pi / (2 * tau)) * math.exp(-tau)
            return [_equal_row(suite, 0.5, f"K_1/2({tau:g})", "bessel_k", k.value, k.abs_error,
                               "closed_form", ref, 0.0, 1e-10)]
        jobs.append(k_half)
    jobs.append(lambda: [_equal_row(suite, 0.5, "C_sigma", "extension_constant", specfun.extension_constant(0.5),
                                    0.0, "closed_form", 1.0, 0.0, 1e-12)])
    jobs.append(lambda: [_equal_row(suite, 0.5, "c_1s", "gagliardo_constant", specfun.gagliardo_constant(1, 0.5),
                                    0.0, "closed_form", 1.0 / (2 * math.pi), 0.0, 1e-12)])
    for s in cfg.s_grid:
        if not 0.0 < s < 1.0:
            continue

        def small_tau(s=s):
            tau = 1e-4
            v = tau**s * specfun.bessel_k(s, tau).value / (specfun.gamma_fn(s) * 2 ** (s - 1))
            ok = 0.99 <= v <= 1.01
            return [_row(suite, s, "small_tau_law", "scaled_K", v, 0.0, "limit", 1.0, 0.0, "equal",
                         "pass" if ok else "fail")]

        def unit_mass(s=s):
            from fraclap.extension import cs_extension
            v = cs_extension(constant(1.0, -1e7, 1e7), s, 0.0, 1.0)
            exact = 1.0 - _poisson_tail(s, 1e7)
            return [_equal_row(suite, s, "poisson_unit_mass", "kernel_mass", v, 1e-13, "closed_form",
                               exact, 0.0, 1e-10)]

        jobs.extend([small_tau, unit_mass])
    for name, approx, exact in validation_library():
        jobs.append(lambda name=name, approx=approx, exact=exact: [
            _equal_row(suite, 0.0, name, "quadrature", approx.value, approx.error_estimate,
                       "closed_form", exact, 0.0, 1e-9)])
    return jobs


def _poisson_tail(s: float, R: float) -> float:
    """Kernel mass outside ``|xi| < R`` at ``y = 1``: ``2 p int_R^inf (1 + t^2)^(-(1+2s)/2) dt``."""
    from scipy.special import betainc, beta

    from fraclap.extension import poisson_constant
    # t = tan(phi): 2 p int_{atan R}^{pi/2} cos^(2s-1) = p B(1/2, s) I_{1/(1+R^2)}(s, 1/2)
    z = 1.0 / (1.0 + R * R)
    return poisson_constant(s) * beta(s, 0.5) * betainc(s, 0.5, z)


def _jobs(cfg: ScenarioConfig):
    suite = cfg.suite
    if suite in ("forms-T11", "forms-T13"):
        pair = "DSp_vs_DR" if suite == "forms-T11" else "DR_vs_NSp"
        jobs = [lambda u=u, s=s: [_form_job(cfg, pair, u, s)]
                for s in cfg.s_grid for u in cfg.functions if _admissible(u, s, pair)]
        if suite == "forms-T13" and cfg.domain.dim == 1:
            jobs += [lambda u=u, s=s: _companion_rows(cfg, u, s)
                     for s in cfg.s_grid if 0.0 < s < 1.0 for u in cfg.functions if _admissible(u, s, pair)]
        return jobs
    if suite in ("pointwise-T12", "pointwise-T14"):
        pair = "DSp_vs_DR" if suite == "pointwise-T12" else "DR_vs_NSp"
        pts = cfg.points or pointwise.interior_grid(
            cfg.domain, 3 if cfg.domain.dim == 2 else cfg.n_points)
        return [lambda u=u, s=s, x=x: [_pointwise_job(cfg, pair, u, s, x)]
                for s in cfg.s_grid for u in cfg.functions for x in pts]
    if suite == "counterexample-R31":
        pts = cfg.points or [0.5 * (a + b) for a, b in cfg.domain.components[1:]]
        return [lambda u=u, s=s, x=x: [_counter_job(cfg, u, s, x)]
                for s in cfg.s_grid for u in cfg.functions for x in pts]
    if suite == "identities-S2":
        return _identity_jobs(cfg)
    return _selftest_jobs(cfg)


def run_suite(cfg: ScenarioConfig, n_workers: int | None = None) -> tuple[list[ReportRow], int]:
    """Run every row of the suite; output order follows the config, not completion order."""
    jobs = _jobs(cfg)
    width = n_workers or workers()
    if width == 1:
        results = [j() for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=width) as pool:
            results = list(pool.map(lambda j: j(), jobs))
    rows = [r for res in results for r in res if r is not None]
    if not rows:
        raise ConfigError("the configuration produced no admissible rows")
    return rows, exit_status(rows, cfg.allowed_inconclusive)
