"""Quadratic forms of the four fractional Laplacians and their comparison.

Orders ``s > -1`` with ``s`` not a non-negative integer are accepted
wherever the form is defined.  Every value carries an error that combines
quadrature and truncation; strict inequalities are only certified when the
margin exceeds three times the summed errors.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from fraclap.domain import DIRICHLET, NEUMANN, Domain, build_basis, power_tail, split_resolved
from fraclap.quadrature import (
    DivergentIntegral,
    QuadratureSpec,
    double_integral_gagliardo,
    gauss_jacobi01,
    gauss_legendre01,
    oscillatory_power_tail,
    weighted_boundary_integral,
)
from fraclap.specfun import gagliardo_constant
from fraclap.testfunc import ProductFunction, TestFunction, check_mean_zero, laplacian_power

__all__ = [
    "FractionalOrder",
    "FormValue",
    "ComparisonRecord",
    "MeanNotZero",
    "TailUnbounded",
    "q_dsp",
    "q_nsp",
    "q_dr_fourier",
    "q_dr_gagliardo",
    "q_nr",
    "q_higher",
    "compare_forms",
    "predicted_sign",
    "PAIRS",
]

MEAN_ZERO_TOL = 1e-10
CONCLUSIVE_FACTOR = 3.0
DEFAULT_N = 4096


class MeanNotZero(ValueError):
    pass


class TailUnbounded(ArithmeticError):
    pass


@dataclass(frozen=True)
class FractionalOrder:
    """Order ``s = 2k + r`` with ``k = floor((s+1)/2)`` and ``r`` in (-1,0) U (0,1)."""

    s: float

    def __post_init__(self):
        s = float(self.s)
        if not s > -1.0:
            raise ValueError(f"order must exceed -1, got {s}")
        if s >= 0 and s == math.floor(s):
            raise ValueError(f"integer order {s} is excluded")
        object.__setattr__(self, "s", s)

    @property
    def k(self) -> int:
        return int(math.floor((self.s + 1.0) / 2.0))

    @property
    def residual(self) -> float:
        return self.s - 2 * self.k

    def __float__(self):
        return self.s


def _order(s) -> FractionalOrder:
    return s if isinstance(s, FractionalOrder) else FractionalOrder(s)


@dataclass(frozen=True)
class FormValue:
    value: float
    error: float
    method: str
    order: FractionalOrder

    def __post_init__(self):
        if not (math.isfinite(self.error) and self.error >= 0):
            raise ValueError("form error must be finite and non-negative")


@dataclass(frozen=True)
class ComparisonRecord:
    s: float
    left_label: str
    right_label: str
    left: FormValue
    right: FormValue
    predicted: str

    @property
    def margin(self) -> float:
        return self.left.value - self.right.value

    @property
    def combined_error(self) -> float:
        return self.left.error + self.right.error

    @property
    def conclusive(self) -> bool:
        return abs(self.margin) > CONCLUSIVE_FACTOR * self.combined_error

    @property
    def observed(self) -> str:
        return "left_greater" if self.margin > 0 else "right_greater"

    @property
    def verdict(self) -> str:
        if not self.conclusive:
            return "inconclusive"
        return "pass" if self.observed == self.predicted else "fail"


# -- spectral forms -----------------------------------------------------------


def _spectral_1d(u: TestFunction, s: float, basis, skip_zero: bool):
    m = u.first_jump_order() + 1
    total, err = 0.0, 0.0
    for part in basis.parts:
        ur = u.restrict(part.a, part.b)
        if ur is None:
            continue
        c = part.coefficients(ur)
        lam = part.eigenvalues
        j = part.indices
        if skip_zero and part.j0 == 0:
            c, lam, j = c[1:], lam[1:], j[1:]
        pos = lam > 0
        clean, finite = split_resolved(c)
        terms = np.zeros_like(c)
        terms[pos] = lam[pos] ** s * clean[pos] ** 2
        if finite:
            # finitely many modes; charge what was dropped as rounding noise
            tail = math.fsum(lam[pos] ** s * (c[pos] - clean[pos]) ** 2)
        else:
            tail = power_tail(terms, j, 2.0 * m - 2.0 * s)
        if not math.isfinite(tail):
            raise TailUnbounded(f"{u.name}: coefficient decay too slow for s={s}")
        total += math.fsum(terms)
        err += tail
    return total, err + 1e-14 * abs(total)


def _spectral_2d(u: ProductFunction, s: float, basis, skip_zero: bool):
    px, py = basis.parts
    lam = px.eigenvalues[:, None] + py.eigenvalues[None, :]
    C = np.zeros(lam.shape)
    for w, f, g in u.terms:
        C += w * np.outer(px.coefficients(f), py.coefficients(g))
    terms = np.zeros_like(C)
    pos = lam > 0
    terms[pos] = lam[pos] ** s * C[pos] ** 2
    total = math.fsum(terms.ravel())
    # truncation: extrapolate the outermost shell with the slowest decay seen in 1D
    m = min(min(f.first_jump_order(), g.first_jump_order()) for _, f, g in u.terms) + 1
    edge = np.concatenate([terms[-1, :], terms[:, -1]])
    N = px.indices[-1]
    decay = 2.0 * m - 2.0 * s
    if decay <= 1.0:
        raise TailUnbounded("coefficient decay too slow")
    shell = float(np.sum(np.abs(edge)))
    tail = shell * N / (decay - 1.0)
    return total, tail + 1e-14 * abs(total)


def _spectral_form(u, order, basis, kind):
    order = _order(order)
    if basis.kind != kind:
        raise ValueError(f"expected a {kind} basis, got {basis.kind}")
    s = order.s
    skip_zero = kind == NEUMANN
    if kind == NEUMANN and s < 0:
        _require_mean_zero_components(u, basis.domain)
    if isinstance(u, ProductFunction):
        v, e = _spectral_2d(u, s, basis, skip_zero)
    else:
        v, e = _spectral_1d(u, s, basis, skip_zero)
    return FormValue(v, e, "spectral_series", order)


def _require_mean_zero_components(u, domain: Domain):
    if isinstance(u, ProductFunction):
        if not check_mean_zero(u, MEAN_ZERO_TOL):
            raise MeanNotZero(f"{u.name} is not mean-zero")
        return
    for a, b in domain.components:
        ur = u.restrict(a, b)
        if ur is not None and not check_mean_zero(ur, MEAN_ZERO_TOL):
            raise MeanNotZero(f"{u.name} has nonzero mean on ({a}, {b})")


def q_dsp(u, order, basis=None) -> FormValue:
    """Spectral Dirichlet form: sum of lambda_j^s (u, phi_j)^2."""
    if basis is None:
        basis = build_basis(_default_domain(u), DIRICHLET, DEFAULT_N)
    return _spectral_form(u, order, basis, DIRICHLET)


def q_nsp(u, order, basis=None) -> FormValue:
    """Spectral Neumann form: sum over j >= 1 of mu_j^s (u, psi_j)^2 (mean-zero u when s < 0)."""
    if basis is None:
        basis = build_basis(_default_domain(u), NEUMANN, DEFAULT_N)
    return _spectral_form(u, order, basis, NEUMANN)


def _default_domain(u) -> Domain:
    if isinstance(u, ProductFunction):
        return Domain.rectangle(*u.support_box)
    return Domain(tuple(u.support))


# -- restricted Dirichlet: Fourier route ---------------------------------------


def _fourier_tail_1d(u: TestFunction, p_shift: float, X: float, n_terms: int) -> tuple[float, float]:
    """``2 int_X^inf xi^p_shift |Fu|^2`` from the endpoint expansion of ``Fu``."""
    exp = u.endpoint_expansion(n_terms)
    pts = list(exp)
    groups: dict[tuple[int, float], complex] = defaultdict(complex)
    for e in pts:
        for e2 in pts:
            J, J2 = exp[e], exp[e2]
            for k in np.nonzero(J)[0]:
                for k2 in np.nonzero(J2)[0]:
                    coef = J[k] * J2[k2] * (1j) ** (-(k + 1)) * (-1j) ** (-(k2 + 1))
                    groups[(int(k + k2), float(e2 - e))] += coef
    total = 0.0
    last = 0.0
    top = 2 * (n_terms - 1)
    for (kk, d), coef in groups.items():
        if coef == 0:
            continue
        val = (coef * oscillatory_power_tail(p_shift - kk - 2.0, d, X)).real
        total += val
        if kk >= top - 1:
            last += abs(val)
    return total / math.pi, last / math.pi


def _dr_fourier_1d(u: TestFunction, s: float, n_nodes: int = 20):
    supp = u.support
    extent = supp[-1][1] - supp[0][0]
    omega = u.max_frequency
    h = math.pi / (2.0 * extent)
    X = max(400.0 / extent, 40.0 * omega)
    n_panels = int(math.ceil(X / h))
    X = n_panels * h
    mean_zero = check_mean_zero(u, MEAN_ZERO_TOL)
    if s <= -0.5 and not mean_zero:
        raise DivergentIntegral("|xi|^(2s)|Fu|^2 is not integrable at 0 unless u has zero mean")
    exact_poly = all(p.frequency == 0.0 for p in u.pieces)
    deg = max((p.poly.degree() for p in u.pieces if p.frequency == 0.0), default=0)
    n_terms = deg + 1 if exact_poly else 18

    def body(n):
        tot = 0.0
        # origin panel with the Jacobi weight xi^(2s) (or xi^(2s+2) for mean-zero u)
        alpha = 2.0 * s + (2.0 if mean_zero and s <= -0.5 else 0.0)
        t, w = gauss_jacobi01(n, alpha)
        xi = h * t
        F2 = np.abs(u.fourier(xi)) ** 2
        if alpha != 2.0 * s:
            F2 = F2 / xi**2
        tot += h ** (1.0 + alpha) * float(np.dot(w, F2))
        tg, wg = gauss_legendre01(n)
        a = h * np.arange(1, n_panels)
        xi = (a[:, None] + h * tg[None, :]).ravel()
        vals = xi ** (2.0 * s) * np.abs(u.fourier(xi)) ** 2
        tot += h * float(np.dot(np.tile(wg, n_panels - 1), vals))
        return 2.0 * tot

    lo, hi = body(n_nodes), body(n_nodes + 10)
    tail, tail_err = _fourier_tail_1d(u, 2.0 * s, X, n_terms)
    if exact_poly:
        tail_err = 0.0
    value = hi + tail
    err = abs(hi - lo) + tail_err + 1e-11 * abs(tail) + 1e-13 * abs(value)
    return value, err


def q_dr_fourier(u, order) -> FormValue:
    """Restricted Dirichlet form as the integral of |xi|^(2s) |Fu(xi)|^2."""
    order = _order(order)
    if isinstance(u, ProductFunction):
        raise NotImplementedError("the Fourier route is implemented for one-dimensional u")
    if order.s >= u.smoothness:
        raise TailUnbounded(f"{u.name} is not in H^{order.s}")
    v, e = _dr_fourier_1d(u, order.s)
    return FormValue(v, e, "fourier", order)


# -- restricted Dirichlet and regional: real-space routes --------------------------


def _require_unit_interval_order(s):
    if not 0.0 < s < 1.0:
        raise ValueError("double-integral forms need s in (0, 1)")


def q_dr_gagliardo(u: TestFunction, domain: Domain, s, spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-8)) -> FormValue:
    """Restricted Dirichlet form as c_{1,s} [iint_{Omega^2} + 2 int_Omega u^2 rho_s]."""
    order = _order(s)
    _require_unit_interval_order(order.s)
    c = gagliardo_constant(1, order.s)
    inner = double_integral_gagliardo(u, domain, order.s, spec)
    outer = weighted_boundary_integral(u, domain, order.s, spec)
    val = c * (inner.value + 2.0 * outer.value)
    err = c * (inner.error_estimate + 2.0 * outer.error_estimate)
    return FormValue(val, err, "gagliardo", order)


def q_nr(u: TestFunction, domain: Domain, s, spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-8)) -> FormValue:
    """Regional form: c_{1,s} times the Gagliardo double integral over Omega x Omega."""
    order = _order(s)
    _require_unit_interval_order(order.s)
    c = gagliardo_constant(1, order.s)
    r = double_integral_gagliardo(u, domain, order.s, spec)
    return FormValue(c * r.value, c * r.error_estimate, "gagliardo", order)


def q_higher(u, order, which: str, basis_n: int = DEFAULT_N, domain: Domain | None = None) -> FormValue:
    """Form of order s >= 1 via Q_s[u] = Q_{s-2k}[(-Delta)^k u]."""
    order = _order(order)
    k = order.k
    if k < 1:
        raise ValueError("q_higher needs k >= 1; use the direct form for |s| < 1")
    v = laplacian_power(u, k)
    r = FractionalOrder(order.residual)
    dom = domain or _default_domain(u)
    if which == "DR":
        fv = q_dr_fourier(v, r)
    elif which == "NSp":
        fv = q_nsp(v, r, build_basis(dom, NEUMANN, basis_n))
    elif which == "DSp":
        fv = q_dsp(v, r, build_basis(dom, DIRICHLET, basis_n))
    else:
        raise ValueError(f"unknown form {which!r}")
    return FormValue(fv.value, fv.error, f"reduced({k})", order)


# -- comparisons --------------------------------------------------------------

PAIRS = ("DR_vs_NSp", "DSp_vs_DR", "DSp_vs_NSp", "DR_vs_NR")


def predicted_sign(pair: str, s: float) -> str:
    """Predicted sign pattern for the pair at order s."""
    o = _order(s)
    even_band = (o.s - 2 * math.floor(o.s / 2.0)) < 1.0  # s in (2k, 2k+1)
    if pair in ("DR_vs_NSp", "DSp_vs_DR", "DSp_vs_NSp"):
        return "left_greater" if even_band else "right_greater"
    if pair == "DR_vs_NR":
        if not 0.0 < o.s < 1.0:
            raise ValueError("the regional form is only defined for s in (0, 1)")
        return "left_greater"
    raise ValueError(f"unknown pair {pair!r}")


def _form(name, u, s, domain, n):
    if name == "DR":
        return q_dr_fourier(u, s)
    if name == "NSp":
        return q_nsp(u, s, build_basis(domain, NEUMANN, n))
    if name == "DSp":
        return q_dsp(u, s, build_basis(domain, DIRICHLET, n))
    if name == "NR":
        return q_nr(u, domain, s)
    raise ValueError(name)


def compare_forms(u, s, pair: str, domain: Domain | None = None, n_modes: int = DEFAULT_N) -> ComparisonRecord:
    """Evaluate both forms of ``pair`` together with the predicted sign."""
    order = _order(s)
    left, right = pair.split("_vs_")
    dom = domain or _default_domain(u)
    pred = predicted_sign(pair, order.s)
    lv = _form(left, u, order, dom, n_modes)
    rv = _form(right, u, order, dom, n_modes)
    return ComparisonRecord(order.s, left, right, lv, rv, pred)
