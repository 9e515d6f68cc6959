"""Weighted harmonic extensions and their energies (one space dimension).

* ``cs_field``: half-space extension of the zero extension of ``u``, a
  Poisson-type integral with kernel ``p y^(2s) (r^2 + y^2)^(-(1+2s)/2)``.
  The substitution ``xi = x + y sinh(v)`` turns the kernel into
  ``p cosh(v)^(-2s) dv``, which is smooth on unit scale for every ``y``.
* ``st_field``: half-cylinder extension ``sum c_j Q_s(y sqrt(mu_j)) psi_j``.
* ``dual_nsp_extension``: the negative-order counterpart with flux ``-u``.

Normalization: ``(-Delta)^s u = -(C_s / 2s) lim y^(1-2s) d_y w`` and
``Q_s[u] = (C_s / 2s) E(w)``, both checked numerically in the test suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from fraclap.domain import NEUMANN, Domain, build_basis, power_tail, split_resolved
from fraclap.forms import MEAN_ZERO_TOL, MeanNotZero, q_dr_fourier, q_nsp
from fraclap.pointwise import spectral_pointwise
from fraclap.quadrature import QuadratureSpec, gauss_legendre01, integrate_adaptive
from fraclap.specfun import (
    EvalResult,
    _check_sigma,
    extension_constant,
    q_kernel_array,
    q_kernel_derivative_array,
)
from fraclap.testfunc import TestFunction, check_mean_zero

__all__ = [
    "ExtensionField",
    "EnergyValue",
    "IdentityReport",
    "ChainReport",
    "TruncationWarning",
    "ExtrapolationError",
    "poisson_constant",
    "profile_energy",
    "cs_field",
    "cs_extension",
    "st_field",
    "st_extension",
    "dual_nsp_extension",
    "energy",
    "dual_energy",
    "neumann_trace",
    "verify_form_energy_identity",
    "energy_chain",
    "boundary_normal_derivative",
]

HALF_SPACE = "half_space"
HALF_CYLINDER = "half_cylinder"


class TruncationWarning(UserWarning):
    """The modal series is not converged at the requested height."""


class ExtrapolationError(ArithmeticError):
    """Successive extrapolation levels disagree."""


def poisson_constant(sigma: float, n: int = 1) -> float:
    """Unit-mass normalization of the half-space kernel."""
    _check_sigma(sigma)
    return math.gamma((n + 2 * sigma) / 2) / (math.pi ** (n / 2) * math.gamma(sigma))


@lru_cache(maxsize=64)
def profile_energy(sigma: float) -> tuple[float, float]:
    """``I_s = int_0^inf t^(1-2s) (Q_s^2 + Q_s'^2) dt`` and an error estimate.

    Equals ``2s / C_s``; computed by quadrature so the modal energies are an
    independent check of that constant.
    """
    _check_sigma(sigma)

    def f(t):
        q = q_kernel_array(sigma, t)
        dq = q_kernel_derivative_array(sigma, t)
        return t ** (1.0 - 2.0 * sigma) * (q * q + dq * dq)

    spec = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-14, max_subdivisions=4000)
    head = integrate_adaptive(f, (0.0, 1.0), spec, singular_ends=(True, False))
    body = integrate_adaptive(f, (1.0, 60.0), spec)
    return head.value + body.value, head.error_estimate + body.error_estimate + 1e-25


# -- fields ---------------------------------------------------------------------------


@dataclass
class ExtensionField:
    """An extension ``w(x, y)`` together with its gradient."""

    kind: str
    sigma: float
    u: TestFunction
    evaluate: Callable
    gradient: Callable
    basis: object = None
    coefficients: np.ndarray | None = None
    domain: Domain | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, x, y):
        return self.evaluate(x, y)


def _log_cosh(v):
    a = np.abs(v)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


_V_PANEL = 1.0
_V_NODES = 10


def _cs_values(u: TestFunction, sigma: float, x, y: float, n_nodes: int = _V_NODES):
    """``w, d_x w, d_y w`` of the half-space extension at points ``x`` and height ``y > 0``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nx = x.size
    p = poisson_constant(sigma)
    tg, wg = gauss_legendre01(n_nodes)
    w = np.zeros(nx)
    wx = np.zeros(nx)
    wy = np.zeros(nx)
    for piece in u.pieces:
        va = np.arcsinh((piece.a - x) / y)
        vb = np.arcsinh((piece.b - x) / y)
        L = vb - va
        M = np.maximum(1, np.ceil(L / _V_PANEL).astype(int))
        idx = np.repeat(np.arange(nx), M)
        start = np.repeat(np.cumsum(M) - M, M)
        k = np.arange(idx.size) - start
        width = L[idx] / M[idx]
        lo = va[idx] + width * k
        v = lo[:, None] + width[:, None] * tg[None, :]
        wts = width[:, None] * wg[None, :]
        xi = x[idx][:, None] + y * np.sinh(v)
        kern = np.exp(-2.0 * sigma * _log_cosh(v)) * wts
        P = piece.deriv(xi, 0)
        dP = piece.deriv(xi, 1)
        w += np.bincount(idx, weights=np.sum(P * kern, axis=1), minlength=nx)
        wx += np.bincount(idx, weights=np.sum(dP * kern, axis=1), minlength=nx)
        wy += np.bincount(idx, weights=np.sum(dP * np.sinh(v) * kern, axis=1), minlength=nx)
        Pa, Pb = piece.deriv_at_end(False, 0), piece.deriv_at_end(True, 0)
        ca = np.exp(-2.0 * sigma * _log_cosh(va))
        cb = np.exp(-2.0 * sigma * _log_cosh(vb))
        # moving-endpoint terms; K(r, y) = (1/y) cosh(v)^(-1-2s) at r = y sinh(v)
        wx += (Pa * ca / np.cosh(va) - Pb * cb / np.cosh(vb)) / y
        wy -= (Pb * cb * np.tanh(vb) - Pa * ca * np.tanh(va)) / y
    return p * w, p * wx, p * wy


def cs_field(u: TestFunction, sigma: float) -> ExtensionField:
    """Half-space (restricted Dirichlet) extension of ``u``."""
    _check_sigma(sigma)

    def evaluate(x, y):
        if y <= 0:
            raise ValueError("the half-space field is evaluated at y > 0")
        return _cs_values(u, sigma, x, y)[0]

    def gradient(x, y):
        if y <= 0:
            raise ValueError("the half-space field is evaluated at y > 0")
        _, gx, gy = _cs_values(u, sigma, x, y)
        return gx, gy

    return ExtensionField("half_space_DR", sigma, u, evaluate, gradient)


def cs_extension(u: TestFunction, sigma: float, x, y: float):
    """Value of the half-space extension at ``(x, y)``; scalar in, scalar out."""
    v = cs_field(u, sigma).evaluate(x, y)
    return float(v[0]) if np.ndim(x) == 0 else v


def _modal_field(kind, sigma, u, basis, amps):
    part = basis.parts[0]
    mu = part.eigenvalues
    root = np.sqrt(mu)
    j = part.indices
    L = part.length

    def modes(x):
        return part.eigenfunctions(np.atleast_1d(np.asarray(x, dtype=float)))

    def dmodes(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        arg = np.outer(x - part.a, j * math.pi / L)
        inside = ((x >= part.a) & (x <= part.b))[:, None]
        return -math.sqrt(2.0 / L) * np.sin(arg) * (j * math.pi / L) * inside

    def profile(y):
        q = q_kernel_array(sigma, y * root)
        if y > 0 and abs(amps[-1]) > 0 and abs(q[-1] * amps[-1]) > 1e-12 * np.max(np.abs(amps)):
            warnings.warn(f"modal series not converged at y={y:g}; increase N", TruncationWarning, stacklevel=3)
        return q

    def evaluate(x, y):
        return modes(x) @ (amps * profile(y))

    def gradient(x, y):
        if y <= 0:
            raise ValueError("gradient is evaluated at y > 0")
        q = profile(y)
        dq = np.zeros_like(root)
        pos = root > 0
        dq[pos] = q_kernel_derivative_array(sigma, y * root[pos]) * root[pos]
        return dmodes(x) @ (amps * q), modes(x) @ (amps * dq)

    return ExtensionField(kind, sigma, u, evaluate, gradient, basis, amps, basis.domain)


def _interval_basis(u, basis, domain, N):
    if basis is None:
        if domain is None:
            if len(u.support) != 1:
                raise ValueError("pass a domain or basis for a function with disconnected support")
            domain = Domain.interval(*u.support[0])
        basis = build_basis(domain, NEUMANN, N)
    if basis.kind != NEUMANN or basis.domain.dim != 1 or len(basis.parts) != 1:
        raise ValueError("half-cylinder extensions need a Neumann basis of one interval")
    return basis


def st_field(u: TestFunction, sigma: float, basis=None, domain: Domain | None = None, N: int = 4096) -> ExtensionField:
    """Half-cylinder (spectral Neumann) extension of ``u``."""
    _check_sigma(sigma)
    basis = _interval_basis(u, basis, domain, N)
    c = basis.parts[0].coefficients(u)
    return _modal_field("half_cylinder_NSp", sigma, u, basis, c)


def st_extension(u: TestFunction, sigma: float, basis, x, y: float):
    """Value of the half-cylinder extension at ``(x, y)``."""
    if y < 0:
        raise ValueError("y must be nonnegative")
    v = st_field(u, sigma, basis).evaluate(x, y)
    return float(v[0]) if np.ndim(x) == 0 else v


def dual_nsp_extension(u: TestFunction, sigma: float, basis=None, domain: Domain | None = None,
                       N: int = 4096) -> ExtensionField:
    """Negative-order half-cylinder field with flux ``-u`` and ``w -> 0`` as ``y -> inf``.

    Mode amplitudes ``a_j = (C_s / 2s) mu_j^(-s) (u, psi_j)`` for ``j >= 1``.
    """
    _check_sigma(sigma)
    basis = _interval_basis(u, basis, domain, N)
    if not check_mean_zero(u, MEAN_ZERO_TOL):
        raise MeanNotZero(f"{u.name} is not mean-zero")
    part = basis.parts[0]
    c = part.coefficients(u)
    mu = part.eigenvalues
    a = np.zeros_like(c)
    pos = mu > 0
    a[pos] = extension_constant(sigma) / (2.0 * sigma) * mu[pos] ** (-sigma) * c[pos]
    f = _modal_field("dual_NSp", sigma, u, basis, a)
    f.meta["source_coefficients"] = c
    return f


# -- energies -------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyValue:
    value: float
    error: float
    box: tuple
    region: str


_Y_MIN, _Y_MAX = 1e-10, 1e6
_LOGY_PANEL = 2.0


def _x_edges(u: TestFunction, y: float, cuts) -> np.ndarray:
    """Panel edges in ``x`` graded geometrically (from ``y/16``) toward every breakpoint."""
    bp = np.unique(np.concatenate([u.breakpoints, np.asarray(cuts, dtype=float)]))
    lo, hi = bp[0], bp[-1]
    far = 1e4 * max(hi - lo, y)
    pts = [lo - far, hi + far]
    pts.extend(bp)
    for i, e in enumerate(bp):
        left = (e - bp[i - 1]) / 2 if i > 0 else far
        right = (bp[i + 1] - e) / 2 if i + 1 < bp.size else far
        d = y / 16.0
        while d < max(left, right):
            if d < left:
                pts.append(e - d)
            if d < right:
                pts.append(e + d)
            d *= 2.0
    return np.unique(pts)


def _x_integrals(u, sigma, y, cuts, n_nodes=8):
    """``int |grad w|^2 dx`` over the line and over each interval in ``cuts``."""
    flat = sorted({c for ab in cuts for c in ab})
    edges = _x_edges(u, y, flat)
    tg, wg = gauss_legendre01(n_nodes)
    a, b = edges[:-1], edges[1:]
    x = (a[:, None] + (b - a)[:, None] * tg).ravel()
    wt = ((b - a)[:, None] * wg).ravel()
    _, gx, gy = _cs_values(u, sigma, x, y)
    dens = wt * (gx * gx + gy * gy)
    full = math.fsum(dens)
    parts = [math.fsum(dens[(x > lo) & (x < hi)]) for lo, hi in cuts]
    return full, parts


def _cs_energies(u: TestFunction, sigma: float, cuts):
    """Half-plane energy and energies restricted to the strips over ``cuts``."""
    t0, t1 = math.log(_Y_MIN), math.log(_Y_MAX)
    n_pan = int(math.ceil((t1 - t0) / _LOGY_PANEL))
    edges = np.linspace(t0, t1, n_pan + 1)
    results = []
    for n in (6, 4):
        tg, wg = gauss_legendre01(n)
        acc = np.zeros(1 + len(cuts))
        for lo, hi in zip(edges[:-1], edges[1:]):
            for t, wt in zip(lo + (hi - lo) * tg, (hi - lo) * wg):
                y = math.exp(t)
                full, parts = _x_integrals(u, sigma, y, cuts)
                acc += wt * y ** (2.0 - 2.0 * sigma) * np.array([full] + parts)
        results.append(acc)
    fine, coarse = results
    # end corrections: density ~ y^(2s-1) (or ~ const when s > 1/2) below Y_MIN, ~ y^(-2-2s) above Y_MAX
    lo_full, lo_parts = _x_integrals(u, sigma, _Y_MIN, cuts)
    hi_full, hi_parts = _x_integrals(u, sigma, _Y_MAX, cuts)
    lo_vals = np.array([lo_full] + lo_parts)
    hi_vals = np.array([hi_full] + hi_parts)
    low_tail = _Y_MIN ** (2.0 - 2.0 * sigma) * lo_vals / min(2.0 * sigma, 2.0 - 2.0 * sigma)
    high_tail = _Y_MAX ** (2.0 - 2.0 * sigma) * hi_vals / (1.0 + 2.0 * sigma)
    value = fine + low_tail + high_tail
    err = np.abs(fine - coarse) + 0.5 * (low_tail + high_tail) + 1e-10 * np.abs(value)
    return value, err


def _modal_energy(f: ExtensionField):
    I, dI = profile_energy(f.sigma)
    part = f.basis.parts[0]
    mu = part.eigenvalues
    a = f.coefficients
    lam = np.where(mu > 0, mu, 0.0) ** f.sigma
    clean, finite = split_resolved(a)
    if finite:
        S = math.fsum(clean * clean * lam)
        tail = float(np.sum((a - clean) ** 2 * lam))
        return S * I, S * dI + tail * I + 1e-14 * S * I
    terms = a * a * lam
    decay = 2.0 * (f.u.first_jump_order() + 1) - 2.0 * f.sigma
    if f.kind == "dual_NSp":
        decay += 4.0 * f.sigma
    tail = power_tail(terms, part.indices, decay)
    S = math.fsum(terms)
    return S * I, S * dI + tail * I + 1e-14 * S * I


def energy(f: ExtensionField, region: str = HALF_CYLINDER, domain: Domain | None = None) -> EnergyValue:
    """Weighted Dirichlet integral ``int int y^(1-2s) |grad w|^2``.

    Half-space fields support both regions (the half-cylinder over ``domain``
    restricts the integral); modal fields live on the half-cylinder only.
    """
    if f.kind == "half_space_DR":
        if region == HALF_SPACE:
            v, e = _cs_energies(f.u, f.sigma, [])
            return EnergyValue(float(v[0]), float(e[0]), (math.inf, math.inf), region)
        if domain is None or domain.dim != 1:
            raise ValueError("restricted energy needs a one-dimensional domain")
        v, e = _cs_energies(f.u, f.sigma, list(domain.components))
        return EnergyValue(math.fsum(v[1:]), math.fsum(e[1:]), (domain.diameter, math.inf), region)
    if region != HALF_CYLINDER:
        raise ValueError(f"{f.kind} fields live on the half-cylinder")
    v, e = _modal_energy(f)
    return EnergyValue(v, e, (f.basis.domain.diameter, math.inf), region)


def dual_energy(f: ExtensionField) -> EnergyValue:
    """``E(w) - 2 (u, w(., 0))`` for a dual field; equals ``-(C_s/2s) Q_(-s)[u]`` at the minimizer."""
    if f.kind != "dual_NSp":
        raise ValueError("dual energy applies to dual fields")
    E = energy(f)
    c = f.meta["source_coefficients"]
    pair = math.fsum(c * f.coefficients)
    part = f.basis.parts[0]
    decay = 2.0 * (f.u.first_jump_order() + 1) + 2.0 * f.sigma
    tail = power_tail(c * f.coefficients, part.indices, decay)
    return EnergyValue(E.value - 2.0 * pair, E.error + 2.0 * tail + 1e-14 * abs(pair), E.box, E.region)


# -- traces ---------------------------------------------------------------------------


def neumann_trace(f: ExtensionField, x: float, y0: float = 0.02, levels: int = 6,
                  rel_tol: float = 1e-6) -> EvalResult:
    """``-(C_s/2s) lim_{y->0} y^(1-2s) d_y w(x, y)`` by Richardson extrapolation.

    Levels ``y_m = 2^(-m) y0``; the correction exponents are
    ``2-2s, 2, 4-2s, 4, ...``.
    """
    s = f.sigma
    scale = -extension_constant(s) / (2.0 * s)
    ys = y0 * 0.5 ** np.arange(levels)
    with warnings.catch_warnings():
        # small heights outrun the modal truncation; the series tail is added below
        warnings.simplefilter("ignore", TruncationWarning)
        vals = np.array([float(f.gradient(np.array([x]), y)[1][0]) * y ** (1.0 - 2.0 * s) for y in ys])
    exps = sorted({2.0 - 2.0 * s, 2.0, 4.0 - 2.0 * s, 4.0, 6.0 - 2.0 * s, 6.0})
    T = [vals]
    for e in exps[: levels - 1]:
        prev = T[-1]
        r = 2.0**e
        T.append((r * prev[1:] - prev[:-1]) / (r - 1.0))
    best = T[-1][-1]
    err = abs(T[-1][-1] - T[-2][-1]) if len(T) > 1 else abs(vals[-1] - vals[-2])
    if err > max(rel_tol * abs(best), 1e-9) * 1e3:
        raise ExtrapolationError(f"trace extrapolation did not settle at x={x}: {T[-2][-1]} vs {best}")
    tail = 0.0
    if f.kind == "half_cylinder_NSp":
        tail = spectral_pointwise(f.u, s, NEUMANN, x, f.basis).error
    return EvalResult(scale * best, abs(scale) * (err + 1e-12 * abs(best)) + tail)


def boundary_normal_derivative(f: ExtensionField, end: float, y: float, outward: float) -> float:
    """``d_n w`` on the lateral boundary ``{end} x R_+``; ``outward`` is +1 at the right end, -1 at the left."""
    gx, _ = f.gradient(np.array([end]), y)
    return float(outward * gx[0])


# -- identities -----------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    which: str
    sigma: float
    form: float
    form_error: float
    scaled_energy: float
    energy_error: float
    tolerance: float

    @property
    def difference(self):
        return abs(self.form - self.scaled_energy)

    @property
    def holds(self) -> bool:
        return self.difference <= self.tolerance * abs(self.form) + self.form_error + self.energy_error


def verify_form_energy_identity(u: TestFunction, sigma: float, which: str, domain: Domain | None = None,
                                N: int = 4096, tolerance: float = 1e-3) -> IdentityReport:
    """Compare ``Q_s[u]`` with ``(C_s/2s) E(w)`` for the matching extension."""
    scale = extension_constant(sigma) / (2.0 * sigma)
    if which == "NSp":
        basis = build_basis(domain or Domain.interval(*u.support[0]), NEUMANN, N)
        q = q_nsp(u, sigma, basis)
        E = energy(st_field(u, sigma, basis))
    elif which == "DR":
        q = q_dr_fourier(u, sigma)
        E = energy(cs_field(u, sigma), HALF_SPACE)
    else:
        raise ValueError(f"unknown form {which!r}")
    return IdentityReport(which, sigma, q.value, q.error, scale * E.value, scale * E.error, tolerance)


@dataclass(frozen=True)
class ChainReport:
    sigma: float
    q_nsp: float
    restricted: float
    q_dr: float
    error: float

    @property
    def holds(self) -> bool:
        return self.q_nsp - self.error <= self.restricted <= self.q_dr + self.error


def energy_chain(u: TestFunction, sigma: float, domain: Domain, N: int = 4096) -> ChainReport:
    """``Q^NSp[u] <= (C_s/2s) E^NSp(w^DR restricted) <= Q^DR[u]``."""
    scale = extension_constant(sigma) / (2.0 * sigma)
    qn = q_nsp(u, sigma, build_basis(domain, NEUMANN, N))
    qd = q_dr_fourier(u, sigma)
    R = energy(cs_field(u, sigma), HALF_CYLINDER, domain)
    return ChainReport(sigma, qn.value, scale * R.value, qd.value,
                       qn.error + qd.error + scale * R.error)
