import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from fraclap.domain import NEUMANN, Domain, build_basis
from fraclap.extension import (
    HALF_SPACE,
    ExtrapolationError,
    TruncationWarning,
    boundary_normal_derivative,
    cs_extension,
    cs_field,
    dual_energy,
    dual_nsp_extension,
    energy,
    energy_chain,
    neumann_trace,
    poisson_constant,
    profile_energy,
    st_extension,
    st_field,
    verify_form_energy_identity,
)
from fraclap.forms import MeanNotZero, q_nsp
from fraclap.pointwise import dr_pointwise, spectral_pointwise
from fraclap.specfun import extension_constant
from fraclap.testfunc import constant, cosine_mode, poly_bump, sine_mode

D = Domain.interval()
B = build_basis(D, NEUMANN, 4096)
PSI1 = cosine_mode(1, amplitude=math.sqrt(2))


def poisson_oracle(u, s, x, y):
    p = poisson_constant(s)
    a, b = u.support[0][0], u.support[-1][1]
    f = lambda xi: p * y ** (2 * s) * ((x - xi) ** 2 + y * y) ** (-(1 + 2 * s) / 2) * float(u(xi))
    return quad(f, a, b, points=[x] if a < x < b else None, limit=500, epsabs=1e-14, epsrel=1e-13)[0]


@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_poisson_kernel_unit_mass(sigma):
    p = poisson_constant(sigma)
    mass = 2 * quad(lambda t: p * (1 + t * t) ** (-(1 + 2 * sigma) / 2), 0, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
    assert mass == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_profile_energy_normalization(sigma):
    I, dI = profile_energy(sigma)
    assert I * extension_constant(sigma) / (2 * sigma) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2), poly_bump(3, -1.0, 1.0)], ids=lambda u: u.name)
@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_cs_field_against_quadrature(u, sigma):
    f = cs_field(u, sigma)
    for x, y in [(0.5, 0.1), (0.2, 1e-3), (1.5, 0.3), (-0.7, 2.0)]:
        w = f(np.array([x]), y)[0]
        o = poisson_oracle(u, sigma, x, y)
        assert w == pytest.approx(o, rel=1e-8, abs=1e-14)
        gx, gy = f.gradient(np.array([x]), y)
        h = 1e-4 * y
        ody = (poisson_oracle(u, sigma, x, y + h) - poisson_oracle(u, sigma, x, y - h)) / (2 * h)
        odx = (poisson_oracle(u, sigma, x + h, y) - poisson_oracle(u, sigma, x - h, y)) / (2 * h)
        assert gy[0] == pytest.approx(ody, rel=1e-6, abs=1e-8)
        assert gx[0] == pytest.approx(odx, rel=1e-6, abs=1e-8)


def test_cs_positive_and_decaying():
    u = poly_bump(2)
    assert all(cs_extension(u, 0.5, x, y) > 0 for x in (-3.0, 0.5, 4.0) for y in (1e-3, 1.0, 50.0))
    assert cs_extension(u, 0.5, 0.5, 1e6) < 1e-6


@pytest.mark.parametrize("sigma", [0.5, 0.75])
def test_cs_trace(sigma):
    for x in (0.3, 0.5):
        assert abs(cs_extension(sine_mode(1), sigma, x, 1e-4) - math.sin(math.pi * x)) <= 1e-3


def test_cs_trace_gap_scales_like_y_to_2sigma():
    # at sigma = 1/4 the gap w - u decays like y^(1/2)
    u, x = sine_mode(1), 0.5
    g1 = abs(cs_extension(u, 0.25, x, 1e-4) - 1.0)
    g2 = abs(cs_extension(u, 0.25, x, 1e-8) - 1.0)
    assert g2 / g1 == pytest.approx(1e-2, rel=0.05)
    assert g2 <= 1e-3


def test_st_examples():
    y = 0.7
    w = st_extension(PSI1, 0.5, B, 0.3, y)
    assert w == pytest.approx(math.sqrt(2) * math.cos(0.3 * math.pi) * math.exp(-math.pi * y), abs=1e-13)
    c = constant(1.0)
    assert st_extension(c, 0.5, B, 0.4, 3.0) == pytest.approx(1.0, rel=1e-14)
    assert st_extension(sine_mode(1), 0.25, B, 0.4, 200.0) == pytest.approx(2 / math.pi, rel=1e-10)


def test_st_truncation_warning():
    with pytest.warns(TruncationWarning):
        st_field(sine_mode(1), 0.5, build_basis(D, NEUMANN, 16))(np.array([0.3]), 1e-4)


def test_energy_of_single_mode():
    assert energy(st_field(PSI1, 0.5, B)).value == pytest.approx(math.pi, rel=1e-12)
    assert energy(st_field(constant(1.0), 0.5, B)).value == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        energy(st_field(PSI1, 0.5, B), region=HALF_SPACE)


def test_trace_of_single_mode():
    t = neumann_trace(st_field(PSI1, 0.5, B), 0.3)
    assert t.value == pytest.approx(math.pi * math.sqrt(2) * math.cos(0.3 * math.pi), abs=1e-9)


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2)], ids=lambda u: u.name)
@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_traces_match_pointwise(u, sigma):
    x = 0.3
    t = neumann_trace(cs_field(u, sigma), x)
    d = dr_pointwise(u, sigma, x)
    assert abs(t.value - d.value) <= 1e-3 * abs(d.value)
    tn = neumann_trace(st_field(u, sigma, B), x)
    n = spectral_pointwise(u, sigma, NEUMANN, x)
    assert abs(tn.value - n.value) <= max(1e-3 * abs(n.value), tn.abs_error + n.error)


def test_trace_extrapolation_failure_is_reported():
    with pytest.raises(ExtrapolationError):
        neumann_trace(cs_field(poly_bump(1), 0.5), 0.0)


@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_dual_identity(sigma):
    for u in (sine_mode(2), PSI1):
        f = dual_nsp_extension(u, sigma, B)
        lhs = -(2 * sigma / extension_constant(sigma)) * dual_energy(f).value
        q = q_nsp(u, -sigma, B).value
        assert lhs == pytest.approx(q, rel=1e-3)


def test_dual_single_mode_trace():
    f = dual_nsp_extension(PSI1, 0.5, B)
    assert f(np.array([0.3]), 0.0)[0] == pytest.approx(math.sqrt(2) * math.cos(0.3 * math.pi) / math.pi, abs=1e-13)
    with pytest.raises(MeanNotZero):
        dual_nsp_extension(poly_bump(2), 0.5, B)


@pytest.mark.parametrize("sigma", [0.25, 0.5])
def test_dual_flux(sigma):
    f = dual_nsp_extension(sine_mode(2), sigma, B)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        _, gy = f.gradient(np.array([0.3]), 1e-4)
    flux = -(1e-4) ** (1 - 2 * sigma) * gy[0]
    assert flux == pytest.approx(math.sin(0.6 * math.pi), abs=1e-2)


@pytest.mark.parametrize("which", ["DR", "NSp"])
def test_identity_reports(which):
    for u in (sine_mode(1), poly_bump(2)):
        r = verify_form_energy_identity(u, 0.5, which)
        assert r.holds and r.difference <= 1e-3 * r.form


@pytest.mark.parametrize("sigma", [0.25, 0.75])
def test_energy_chain(sigma):
    c = energy_chain(poly_bump(2), sigma, D)
    assert c.holds and c.q_nsp < c.restricted < c.q_dr


def test_half_space_energy_exceeds_restricted():
    f = cs_field(sine_mode(1), 0.5)
    assert energy(f, HALF_SPACE).value > energy(f, domain=D).value


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2)], ids=lambda u: u.name)
def test_difference_field_positive_and_boundary_sign(u):
    sigma = 0.5
    cs, st = cs_field(u, sigma), st_field(u, sigma, B)
    X = np.linspace(0.1, 0.9, 9)
    for y in (0.01, 0.1, 0.5, 1.0, 3.0):
        assert np.all(st(X, y) - cs(X, y) > 0)
    assert np.max(np.abs(st(X, 0.0) - cs(X, 1e-12))) < 1e-4
    for y in (0.01, 0.1, 1.0):
        assert boundary_normal_derivative(cs, 0.0, y, -1.0) < 0
        assert boundary_normal_derivative(cs, 1.0, y, 1.0) < 0
