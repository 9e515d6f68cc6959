"""Pointwise values of the fractional Laplacians.

* restricted Dirichlet, 0 < s < 1: symmetrized singular integral
  ``c_{n,s} int_0^inf (2u(x) - u(x+z) - u(x-z)) z^(-1-2s) dz`` (per direction in 2D);
* restricted Dirichlet, s = -sigma < 0: Riesz potential;
* spectral Dirichlet / Neumann: truncated eigenfunction series with a
  summation-by-parts bound on the omitted tail;
* an independent Fourier-multiplier oracle for one-dimensional u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fraclap.domain import DIRICHLET, NEUMANN, Domain, build_basis, power_tail
from fraclap.forms import MEAN_ZERO_TOL, CONCLUSIVE_FACTOR, MeanNotZero, TailUnbounded
from fraclap.quadrature import (
    DivergentIntegral,
    gauss_jacobi01,
    gauss_legendre01,
    oscillatory_power_tail,
)
from fraclap.specfun import gagliardo_constant, riesz_constant
from fraclap.testfunc import ProductFunction, TestFunction, check_mean_zero

__all__ = [
    "PointwiseRecord",
    "PointwiseComparison",
    "CounterexampleReport",
    "dr_pointwise",
    "spectral_pointwise",
    "riesz_pointwise",
    "fourier_pointwise",
    "compare_pointwise",
    "counterexample_disconnected",
    "interior_grid",
    "DEFAULT_POINTWISE_N",
]

DEFAULT_POINTWISE_N = 1 << 18
_N_NODES = 24


@dataclass(frozen=True)
class PointwiseRecord:
    x: object
    value: float
    error: float
    operator: str
    order: float


def _pieces_edges(edges, max_len):
    """Refine sorted panel edges so no panel exceeds ``max_len``."""
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        m = max(1, int(math.ceil((b - a) / max_len)))
        out.extend(a + (b - a) * np.arange(1, m + 1) / m)
    return np.asarray(out)


def _radial_integral(g, breaks, s, n, max_len, near=None):
    """``int_0^R g(r) r^(-1-2s) dr`` with ``g = O(r^2)``; ``breaks`` are the kinks of g, last one R.

    ``near`` optionally returns ``(g(r)/r^2, mask)`` for small ``r`` without cancellation.
    """
    breaks = np.unique(np.asarray(breaks, dtype=float))
    breaks = breaks[breaks > 0]
    r1 = breaks[0]
    t, w = gauss_jacobi01(n, 1.0 - 2.0 * s)
    r = r1 * t
    q = g(r) / r**2
    if near is not None:
        qn, m = near(r)
        q = np.where(m, qn, q)
    tot = r1 ** (2.0 - 2.0 * s) * float(np.dot(w, q))
    if breaks.size > 1:
        edges = _pieces_edges(breaks, max_len)
        tg, wg = gauss_legendre01(n)
        a, b = edges[:-1], edges[1:]
        rr = (a[:, None] + (b - a)[:, None] * tg).ravel()
        ww = ((b - a)[:, None] * wg).ravel()
        tot += float(np.dot(ww, g(rr) * rr ** (-1.0 - 2.0 * s)))
    return tot


def _even_taylor(u: TestFunction, x: float, r1: float):
    """``(2u(x) - u(x+z) - u(x-z)) / z^2`` from the Taylor series at ``x``, valid for small ``z``."""
    omega = u.max_frequency
    z_max = min(0.5 * r1, 2.0 / omega) if omega > 0 else 0.5 * r1
    coef = []
    for k in range(1, 31):
        a = -2.0 * float(u.derivative(x, 2 * k)) / math.factorial(2 * k)
        coef.append(a)
        if k > 2 and abs(a) * z_max ** (2 * k) < 1e-18 * (abs(coef[0]) * z_max**2 + 1e-300):
            break
    poly = np.polynomial.Polynomial(coef)

    def near(z):
        return poly(z * z), z <= z_max

    return near


def _dr_1d(u: TestFunction, s: float, x: float, n: int) -> float:
    ux = float(u(x))
    d = np.abs(u.breakpoints - x)
    d = d[d > 0]
    R = float(d.max())
    max_len = min(0.25 * R, math.pi / max(u.max_frequency, 1e-300))

    def g(z):
        return 2.0 * ux - u(x + z) - u(x - z)

    near = _even_taylor(u, x, float(d.min())) if ux != 0.0 else None
    body = _radial_integral(g, np.concatenate([d, [R]]), s, n, max_len, near)
    return body + 2.0 * ux * R ** (-2.0 * s) / (2.0 * s)


def _line_breaks(bp1, bp2, x, e):
    """Positive r at which x +/- r e crosses a breakpoint line."""
    out = []
    for bp, xc, ec in ((bp1, x[0], e[0]), (bp2, x[1], e[1])):
        if abs(ec) > 1e-14:
            r = (bp - xc) / ec
            out.append(np.abs(r))
    r = np.concatenate(out)
    return r[r > 1e-14]


def _corner_angles(bp1, bp2, x):
    ang = []
    for a in bp1:
        for b in bp2:
            ang.append(math.atan2(b - x[1], a - x[0]) % math.pi)
    ang.extend([0.0, 0.5 * math.pi, math.pi])
    return np.unique(np.array(ang))


def _dr_2d(u: ProductFunction, s: float, x, n: int) -> float:
    x = np.asarray(x, dtype=float)
    ux = float(u(x[0], x[1]))
    bp1, bp2 = u.breakpoints
    angles = _corner_angles(bp1, bp2, x)
    tg, wg = gauss_legendre01(n)
    total = 0.0
    for a, b in zip(angles[:-1], angles[1:]):
        if b - a < 1e-15:
            continue
        for th, wth in zip(a + (b - a) * tg, (b - a) * wg):
            e = np.array([math.cos(th), math.sin(th)])
            brk = _line_breaks(bp1, bp2, x, e)
            R = float(brk.max())

            def g(r):
                return 2.0 * ux - u(x[0] + r * e[0], x[1] + r * e[1]) - u(x[0] - r * e[0], x[1] - r * e[1])

            val = _radial_integral(g, brk, s, n, 0.25 * R) + 2.0 * ux * R ** (-2.0 * s) / (2.0 * s)
            total += wth * val
    return total


def dr_pointwise(u, s: float, x, n_nodes: int = _N_NODES) -> PointwiseRecord:
    """Restricted Dirichlet fractional Laplacian of order ``s`` in (0, 1) at ``x``."""
    if not 0.0 < s < 1.0:
        raise ValueError("dr_pointwise needs s in (0, 1); use riesz_pointwise for negative orders")
    if isinstance(u, ProductFunction):
        c = 2.0 * gagliardo_constant(2, s)
        lo, hi = _dr_2d(u, s, x, n_nodes), _dr_2d(u, s, x, n_nodes + 8)
        x_out = tuple(float(v) for v in x)
    else:
        if np.any(np.isclose(u.breakpoints, x, rtol=0, atol=1e-12)):
            raise ValueError(f"x={x} is a breakpoint of {u.name}")
        c = 2.0 * gagliardo_constant(1, s)
        lo, hi = _dr_1d(u, s, float(x), n_nodes), _dr_1d(u, s, float(x), n_nodes + 12)
        x_out = float(x)
    err = c * (abs(hi - lo) + 1e-12 * abs(hi))
    return PointwiseRecord(x_out, c * hi, err, "DR", s)


# -- Riesz potential ---------------------------------------------------------------


def _riesz_1d(u: TestFunction, sigma: float, x: float, n: int) -> float:
    alpha = 2.0 * sigma - 1.0
    bp = u.breakpoints
    tot = 0.0
    left = bp[bp < x]
    right = bp[bp > x]
    tg, wg = gauss_legendre01(n)
    tj, wj = gauss_jacobi01(n, alpha)
    max_len = min(0.25, math.pi / max(u.max_frequency, 1e-300))
    for side, pts in ((-1.0, left[::-1]), (1.0, right)):
        if pts.size == 0:
            continue
        dists = np.abs(pts - x)
        d1 = dists[0]
        y = x + side * d1 * tj
        tot += d1 ** (1.0 + alpha) * float(np.dot(wj, u(y)))
        if dists.size > 1:
            edges = _pieces_edges(dists, max_len)
            a, b = edges[:-1], edges[1:]
            rr = (a[:, None] + (b - a)[:, None] * tg).ravel()
            ww = ((b - a)[:, None] * wg).ravel()
            tot += float(np.dot(ww, u(x + side * rr) * rr**alpha))
    return tot


def _riesz_2d(u: ProductFunction, sigma: float, x, n: int) -> float:
    x = np.asarray(x, dtype=float)
    bp1, bp2 = u.breakpoints
    ang = _corner_angles(bp1, bp2, x)
    ang = np.unique(np.concatenate([ang, ang + math.pi]))
    tg, wg = gauss_legendre01(n)
    tj, wj = gauss_jacobi01(n, 2.0 * sigma - 1.0)
    total = 0.0
    for a, b in zip(ang[:-1], ang[1:]):
        if b - a < 1e-15:
            continue
        for th, wth in zip(a + (b - a) * tg, (b - a) * wg):
            e = np.array([math.cos(th), math.sin(th)])
            brk = []
            for bp, xc, ec in ((bp1, x[0], e[0]), (bp2, x[1], e[1])):
                if abs(ec) > 1e-14:
                    r = (bp - xc) / ec
                    brk.extend(r[r > 1e-14])
            brk = np.unique(brk)
            if brk.size == 0:
                continue
            r1 = brk[0]
            rr = r1 * tj
            val = r1 ** (2.0 * sigma) * float(np.dot(wj, u(x[0] + rr * e[0], x[1] + rr * e[1])))
            if brk.size > 1:
                edges = _pieces_edges(brk, 0.25)
                lo, hi = edges[:-1], edges[1:]
                r = (lo[:, None] + (hi - lo)[:, None] * tg).ravel()
                w = ((hi - lo)[:, None] * wg).ravel()
                val += float(np.dot(w, u(x[0] + r * e[0], x[1] + r * e[1]) * r ** (2.0 * sigma - 1.0)))
            total += wth * val
    return total


def riesz_pointwise(u, sigma: float, x, n_nodes: int = _N_NODES) -> PointwiseRecord:
    """Negative-order restricted Dirichlet operator ``(-Delta)^(-sigma)`` at ``x`` as a Riesz potential."""
    n = 2 if isinstance(u, ProductFunction) else 1
    if not 0.0 < 2.0 * sigma < n:
        raise DivergentIntegral(f"Riesz potential needs 0 < 2 sigma < n (n={n}, sigma={sigma})")
    kappa = riesz_constant(n, sigma)
    if n == 2:
        lo, hi = _riesz_2d(u, sigma, x, n_nodes), _riesz_2d(u, sigma, x, n_nodes + 8)
        x_out = tuple(float(v) for v in x)
    else:
        lo, hi = _riesz_1d(u, sigma, float(x), n_nodes), _riesz_1d(u, sigma, float(x), n_nodes + 12)
        x_out = float(x)
    err = kappa * (abs(hi - lo) + 1e-12 * abs(hi))
    return PointwiseRecord(x_out, kappa * hi, err, "DR", -sigma)


# -- Fourier multiplier oracle --------------------------------------------------------


def fourier_pointwise(u: TestFunction, s: float, x: float, n_nodes: int = 20) -> PointwiseRecord:
    """``(2 pi)^(-1/2) int |xi|^(2s) Fu(xi) exp(i xi x) d xi`` by panel quadrature plus an exact tail.

    Independent of the real-space kernels; used to validate them.
    """
    bp = u.breakpoints
    extent = max(bp.max() - bp.min(), float(np.max(np.abs(bp - x))))
    h = math.pi / (2.0 * extent)
    X = max(600.0 / extent, 40.0 * u.max_frequency)
    n_panels = int(math.ceil(X / h))
    X = n_panels * h
    mean_zero = check_mean_zero(u, MEAN_ZERO_TOL)
    if s <= -0.5 and not mean_zero:
        raise DivergentIntegral("multiplier not integrable at 0 for non-mean-zero u")
    if s >= u.smoothness - 0.5 and u.first_jump_order() == 0:
        raise DivergentIntegral("u has a jump; pointwise multiplier integral diverges")

    def body(n):
        alpha = 2.0 * s + (1.0 if (mean_zero and s <= -0.5) else 0.0)
        t, w = gauss_jacobi01(n, alpha)
        xi = h * t
        F = (u.fourier(xi) * np.exp(1j * xi * x)).real
        if alpha != 2.0 * s:
            F = F / xi
        tot = h ** (1.0 + alpha) * float(np.dot(w, F))
        tg, wg = gauss_legendre01(n)
        a = h * np.arange(1, n_panels)
        xi = (a[:, None] + h * tg[None, :]).ravel()
        vals = xi ** (2.0 * s) * (u.fourier(xi) * np.exp(1j * xi * x)).real
        tot += h * float(np.dot(np.tile(wg, n_panels - 1), vals))
        return 2.0 * tot / math.sqrt(2.0 * math.pi)

    lo, hi = body(n_nodes), body(n_nodes + 10)
    exact_poly = all(p.frequency == 0.0 for p in u.pieces)
    n_terms = (max(p.poly.degree() for p in u.pieces) + 1) if exact_poly else 18
    exp = u.endpoint_expansion(n_terms)
    tail, last = 0.0, 0.0
    for e, J in exp.items():
        for k in np.nonzero(J)[0]:
            val = (J[k] * (1j) ** (-(k + 1)) * oscillatory_power_tail(2.0 * s - k - 1.0, x - e, X)).real / math.pi
            tail += val
            if k == n_terms - 1:
                last += abs(val)
    value = hi + tail
    err = abs(hi - lo) + (0.0 if exact_poly else last) + 1e-11 * abs(tail) + 1e-13 * abs(value)
    return PointwiseRecord(float(x), value, err, "DR_fourier", s)


# -- spectral series ----------------------------------------------------------------


def _abel_tail(b: np.ndarray, theta: float, norm: float, n_check: int = 64) -> float | None:
    """Summation-by-parts bound for ``sum_{j>N} b_j trig(j theta)``.

    Splits ``j`` by parity; each nonzero subsequence must be monotone with
    constant sign over the last ``n_check`` terms.  Returns None when that
    cannot be verified.
    """
    st = abs(math.sin(theta))
    if st < 1e-12 or b.size < 2 * n_check:
        return None
    bound = 0.0
    for par in (0, 1):
        sub = b[b.size - 2 * n_check + par::2]
        a = np.abs(sub)
        if not np.any(a):
            continue
        if not (np.all(np.sign(sub) == np.sign(sub[-1])) and np.all(np.diff(a) <= 0.0)):
            return None
        bound += a[-1] / st
    return norm * bound


_RESOLVED = 1e-14


def _spectral_1d(u: TestFunction, s: float, kind: str, x: float, basis) -> tuple[float, float]:
    ci = basis.domain.component_of(x)
    part = basis.parts[ci]
    ur = u.restrict(part.a, part.b)
    if ur is None:
        return 0.0, 0.0
    c = part.coefficients(ur)
    lam, j = part.eigenvalues, part.indices
    if kind == NEUMANN:
        if s < 0 and not check_mean_zero(ur, MEAN_ZERO_TOL):
            raise MeanNotZero(f"{u.name} has nonzero mean on ({part.a}, {part.b})")
        c, lam, j = c[1:], lam[1:], j[1:]
    cmax = float(np.max(np.abs(c)))
    if cmax == 0.0:
        return 0.0, 0.0
    # coefficients at rounding level carry no information; truncate after the last resolved one
    resolved = np.nonzero(np.abs(c) > _RESOLVED * cmax)[0]
    n_eff = int(resolved[-1]) + 1
    exhausted = n_eff < c.size
    c = np.where(np.abs(c[:n_eff]) > _RESOLVED * cmax, c[:n_eff], 0.0)
    lam, j = lam[:n_eff], j[:n_eff]
    b = lam**s * c
    phi = part.eigenfunctions(np.array([x]), j)[0]
    value = math.fsum(b * phi)
    theta = math.pi * (x - part.a) / part.length
    norm = math.sqrt(2.0 / part.length)
    rounding = 4.0 * np.finfo(float).eps * cmax * math.sqrt(float(np.sum((lam**s * phi) ** 2)))
    if exhausted and n_eff < 128:
        # finitely many modes
        return value, rounding + _RESOLVED * cmax * norm * float(np.sum(lam**s))
    tail = _abel_tail(b, theta, norm)
    if tail is None:
        m = ur.first_jump_order() + 1
        tail = norm * power_tail(b, j, m - 2.0 * s)
        if not math.isfinite(tail):
            raise TailUnbounded(f"series for {u.name} at s={s} is not absolutely summable")
    return value, tail + rounding + 1e-15 * abs(value)


def _spectral_2d(u: ProductFunction, s: float, kind: str, x, basis) -> tuple[float, float]:
    px, py = basis.parts
    if kind == NEUMANN and s < 0 and not check_mean_zero(u, MEAN_ZERO_TOL):
        raise MeanNotZero(f"{u.name} is not mean-zero")
    C = np.zeros((px.indices.size, py.indices.size))
    for w, f, g in u.terms:
        C += w * np.outer(px.coefficients(f), py.coefficients(g))
    lam = px.eigenvalues[:, None] + py.eigenvalues[None, :]
    phi = np.outer(px.eigenfunctions([x[0]])[0], py.eigenfunctions([x[1]])[0])
    pos = lam > 0
    terms = np.zeros_like(C)
    terms[pos] = lam[pos] ** s * C[pos] * phi[pos]
    value = math.fsum(terms.ravel())
    m = min(min(f.first_jump_order(), g.first_jump_order()) for _, f, g in u.terms) + 1
    decay = m - 2.0 * s
    if decay <= 1.0:
        raise TailUnbounded("2D series not absolutely summable")
    bound = np.abs(lam ** np.where(pos, s, 0.0) * C) * (2.0 / math.sqrt(px.length * py.length))
    shell = float(np.sum(bound[-1, :]) + np.sum(bound[:, -1]))
    N = px.indices[-1]
    tail = shell * N / (decay - 1.0)
    return value, tail + 1e-13 * abs(value)


def spectral_pointwise(u, s: float, kind: str, x, basis=None) -> PointwiseRecord:
    """Spectral Dirichlet/Neumann fractional Laplacian at ``x`` from the eigenfunction series."""
    if s == 0.0:
        raise ValueError("order 0 is the identity")
    if basis is None:
        dom = (Domain.rectangle(*u.support_box) if isinstance(u, ProductFunction)
               else Domain(tuple(u.support)))
        basis = build_basis(dom, kind, DEFAULT_POINTWISE_N if dom.dim == 1 else 512)
    if basis.kind != kind:
        raise ValueError("basis kind mismatch")
    if isinstance(u, ProductFunction):
        v, e = _spectral_2d(u, s, kind, x, basis)
        x_out = tuple(float(t) for t in x)
    else:
        v, e = _spectral_1d(u, s, kind, float(x), basis)
        x_out = float(x)
    label = "DSp" if kind == DIRICHLET else "NSp"
    return PointwiseRecord(x_out, v, e, label, s)


# -- comparisons -----------------------------------------------------------------


@dataclass(frozen=True)
class PointwiseComparison:
    x: object
    left: PointwiseRecord
    right: PointwiseRecord
    predicted: str | None

    @property
    def margin(self):
        return self.left.value - self.right.value

    @property
    def combined_error(self):
        return self.left.error + self.right.error

    @property
    def conclusive(self):
        return abs(self.margin) > CONCLUSIVE_FACTOR * self.combined_error

    @property
    def verdict(self):
        if not self.conclusive:
            return "inconclusive"
        if self.predicted is None:
            return "pass"
        observed = "left_greater" if self.margin > 0 else "right_greater"
        return "pass" if observed == self.predicted else "fail"


def interior_grid(domain: Domain, n_points: int = 9):
    """Uniform grid avoiding a boundary layer of width 0.05 diam(Omega); 1D: per component."""
    layer = 0.05 * domain.diameter
    if domain.dim == 2:
        (a1, b1), (a2, b2) = domain.components[0]
        g1 = np.linspace(a1 + max(layer, (b1 - a1) / (n_points + 1)), b1 - max(layer, (b1 - a1) / (n_points + 1)), n_points)
        g2 = np.linspace(a2 + max(layer, (b2 - a2) / (n_points + 1)), b2 - max(layer, (b2 - a2) / (n_points + 1)), n_points)
        return [(float(p), float(q)) for p in g1 for q in g2]
    pts = []
    for a, b in domain.components:
        L = b - a
        g = a + L * np.arange(1, n_points + 1) / (n_points + 1)
        pts.extend(float(p) for p in g if min(p - a, b - p) >= layer - 1e-12)
    return pts


def _operator(name, u, s, x, domain, n_modes):
    if name == "DR":
        return dr_pointwise(u, s, x)
    kind = NEUMANN if name == "NSp" else DIRICHLET
    N = n_modes or (DEFAULT_POINTWISE_N if domain.dim == 1 else 512)
    return spectral_pointwise(u, s, kind, x, build_basis(domain, kind, N))


def compare_pointwise(u, s: float, points, pair: str, domain: Domain, n_modes: int | None = None):
    """Evaluate both operators of ``pair`` at each point.

    ``DR_vs_NSp`` predicts ``DR > NSp`` only on convex domains; ``DSp_vs_DR``
    predicts ``DSp > DR``.  Both predictions require ``u >= 0``.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("pointwise comparisons are stated for s in (0, 1)")
    if not u.nonnegative:
        raise ValueError(f"{u.name} is not nonnegative")
    left, right = pair.split("_vs_")
    if pair == "DR_vs_NSp":
        predicted = "left_greater" if domain.is_convex else None
    elif pair == "DSp_vs_DR":
        predicted = "left_greater"
    else:
        raise ValueError(f"unknown pair {pair!r}")
    out = []
    for x in points:
        lv = _operator(left, u, s, x, domain, n_modes)
        rv = _operator(right, u, s, x, domain, n_modes)
        out.append(PointwiseComparison(lv.x, lv, rv, predicted))
    return out


@dataclass(frozen=True)
class CounterexampleReport:
    s: float
    points: tuple
    nsp: tuple
    dr: tuple
    nsp_vanishes: bool
    dr_negative: bool

    @property
    def reversed_sign(self) -> bool:
        return self.nsp_vanishes and self.dr_negative


def counterexample_disconnected(u: TestFunction, s: float, points, domain: Domain,
                                n_modes: int = 200, nsp_tol: float = 1e-8) -> CounterexampleReport:
    """Sign reversal on a component of a disconnected domain not touched by ``supp u``."""
    if domain.dim != 1 or len(domain.components) < 2:
        raise ValueError("the counterexample needs a union of disjoint intervals")
    if not u.nonnegative:
        raise ValueError("u must be nonnegative")
    home = {domain.component_of(0.5 * (p.a + p.b)) for p in u.pieces}
    if len(home) != 1:
        raise ValueError("u must be supported in one component")
    for x in points:
        if domain.component_of(x) in home:
            raise ValueError(f"evaluation point {x} lies in the support component")
    basis = build_basis(domain, NEUMANN, n_modes)
    nsp = tuple(spectral_pointwise(u, s, NEUMANN, x, basis) for x in points)
    dr = tuple(dr_pointwise(u, s, x) for x in points)
    nsp_ok = all(abs(r.value) <= max(r.error, 0.0) + nsp_tol and r.error <= nsp_tol for r in nsp)
    dr_ok = all(r.value < -CONCLUSIVE_FACTOR * r.error for r in dr)
    return CounterexampleReport(float(s), tuple(points), nsp, dr, nsp_ok, dr_ok)
