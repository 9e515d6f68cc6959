import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import zeta

from fraclap.domain import DIRICHLET, NEUMANN, Domain, build_basis
from fraclap.pointwise import (
    compare_pointwise,
    counterexample_disconnected,
    dr_pointwise,
    fourier_pointwise,
    interior_grid,
    riesz_pointwise,
    spectral_pointwise,
)
from fraclap.quadrature import DivergentIntegral
from fraclap.specfun import gagliardo_constant
from fraclap.testfunc import cosine_mode, poly_bump, product_bump, sine_mode

D = Domain.interval()


def _periodic_extension(u, L, kind):
    def f(y):
        y = y % (2 * L)
        if y <= L:
            return float(u(y))
        return float(u(2 * L - y)) if kind == NEUMANN else -float(u(2 * L - y))

    return f


def hurwitz_oracle(u, s, x, kind, L=1.0):
    """Spectral operator on (0, L) as a periodic singular integral with a Hurwitz-zeta kernel."""
    C = 2 * gagliardo_constant(1, s)
    P = 2 * L
    ue = _periodic_extension(u, L, kind)
    ux = float(u(x))

    def g(z):
        K = P ** (-1 - 2 * s) * (zeta(1 + 2 * s, z / P) + zeta(1 + 2 * s, 1 - z / P))
        return (2 * ux - ue(x + z) - ue(x - z)) * K

    pts = sorted({abs(x - e) % P for e in (0, L, 2 * L)} | {(e - x) % P for e in (0, L, 2 * L)})
    pts = [p for p in pts if 0 < p < P / 2]
    return C * quad(g, 0, P / 2, points=pts or None, limit=400, epsabs=1e-13, epsrel=1e-12)[0]


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2), poly_bump(2, -1.0, 1.0)], ids=lambda u: u.name)
@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_dr_matches_fourier_oracle(u, s):
    a, b = u.support[0]
    for x in (a + 0.1 * (b - a), 0.5 * (a + b), a + 0.83 * (b - a)):
        d = dr_pointwise(u, s, x)
        f = fourier_pointwise(u, s, x)
        assert abs(d.value - f.value) <= 1e-4 * abs(f.value)
        assert abs(d.value - f.value) <= d.error + f.error + 1e-12 * abs(f.value)


def test_dr_outside_support_is_negative():
    r = dr_pointwise(poly_bump(2), 0.5, 1.5)
    assert r.value < -3 * r.error


def test_dr_rejects_breakpoints():
    with pytest.raises(ValueError):
        dr_pointwise(poly_bump(2), 0.5, 1.0)


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2), poly_bump(3)], ids=lambda u: u.name)
@pytest.mark.parametrize("s", [0.25, 0.75])
@pytest.mark.parametrize("kind", [DIRICHLET, NEUMANN])
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_spectral_matches_hurwitz_oracle(u, s, kind):
    B = build_basis(D, kind, 1 << 18)
    for x in (0.1, 0.37):
        r = spectral_pointwise(u, s, kind, x, B)
        h = hurwitz_oracle(u, s, x, kind)
        assert abs(r.value - h) <= 3 * r.error + 1e-8 * abs(h)


def test_spectral_single_mode_examples():
    r = spectral_pointwise(cosine_mode(1, amplitude=math.sqrt(2)), 0.5, NEUMANN, 0.25)
    assert r.value == pytest.approx(math.pi, rel=1e-12)
    r = spectral_pointwise(sine_mode(1), 0.5, DIRICHLET, 0.5)
    assert r.value == pytest.approx(math.pi, rel=1e-12)


def test_spectral_negative_neumann_against_direct_sum():
    # (sin 2 pi x, sqrt2 cos j pi x) = sqrt2 * 4 / (pi (4 - j^2)) for odd j
    x = 0.3
    j = np.arange(1, 2_000_001, 2, dtype=float)
    coef = math.sqrt(2) * 4.0 / (math.pi * (4.0 - j * j))
    ref = float(np.sum((j * math.pi) ** -1.0 * coef * math.sqrt(2) * np.cos(j * math.pi * x)))
    r = spectral_pointwise(sine_mode(2), -0.5, NEUMANN, x)
    assert abs(r.value - ref) <= 1e-8


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2), sine_mode(2)], ids=lambda u: u.name)
@pytest.mark.parametrize("sigma", [0.1, 0.25, 0.4])
def test_riesz_matches_fourier_oracle(u, sigma):
    for x in (0.3, 0.5, 1.7):
        r = riesz_pointwise(u, sigma, x)
        f = fourier_pointwise(u, -sigma, x)
        assert abs(r.value - f.value) <= 1e-4 * abs(f.value) + 1e-14


def test_riesz_positive_and_small_order_limit():
    u = poly_bump(2)
    assert all(riesz_pointwise(u, 0.3, x).value > 0 for x in (-2.0, 0.5, 3.0))
    assert riesz_pointwise(u, 0.01, 0.5).value == pytest.approx(1.0, rel=0.05)
    with pytest.raises(DivergentIntegral):
        riesz_pointwise(u, 0.5, 0.5)


def test_interior_grid():
    np.testing.assert_allclose(interior_grid(D), np.linspace(0.1, 0.9, 9))
    g = interior_grid(Domain.rectangle(), 3)
    assert len(g) == 9 and all(0 < a < 1 and 0 < b < 1 for a, b in g)


@pytest.mark.parametrize("pair", ["DR_vs_NSp", "DSp_vs_DR"])
@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2)], ids=lambda u: u.name)
def test_convex_comparisons(pair, u):
    recs = compare_pointwise(u, 0.5, interior_grid(D), pair, D)
    assert all(r.verdict == "pass" for r in recs)


def test_rectangle_comparison():
    pts = [(a, b) for a in (0.25, 0.75) for b in (0.25, 0.5)]
    recs = compare_pointwise(product_bump(2), 0.5, pts, "DR_vs_NSp", Domain.rectangle())
    assert all(r.verdict == "pass" for r in recs)


def test_rectangle_dr_symmetry():
    u = product_bump(2)
    a = dr_pointwise(u, 0.5, (0.3, 0.6)).value
    b = dr_pointwise(u, 0.5, (0.6, 0.3)).value
    assert a == pytest.approx(b, rel=1e-10)


def test_pointwise_requires_nonnegative():
    with pytest.raises(ValueError):
        compare_pointwise(sine_mode(2), 0.5, [0.3], "DR_vs_NSp", D)


def test_counterexample_on_disconnected_domain():
    U = Domain.union((0, 1), (2, 3))
    rep = counterexample_disconnected(poly_bump(2), 0.5, [2.25, 2.5, 2.75], U)
    assert rep.reversed_sign
    assert all(abs(r.value) <= 1e-8 for r in rep.nsp)
    assert all(r.value < -3 * r.error for r in rep.dr)
