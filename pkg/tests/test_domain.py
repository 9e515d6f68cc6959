import math

import numpy as np
import pytest
from scipy.integrate import quad

from fraclap.domain import (
    DIRICHLET,
    NEUMANN,
    Domain,
    UnsupportedDomain,
    build_basis,
    coefficients,
    power_tail,
    split_resolved,
)
from fraclap.testfunc import cosine_mode, poly_bump, product_bump, sine_mode


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain.union((0, 1), (0.5, 2))
    with pytest.raises(ValueError):
        Domain.interval(1, 1)
    with pytest.raises(UnsupportedDomain):
        Domain((((0, 1), (0, 1)), ((2, 3), (0, 1))))


def test_domain_geometry():
    U = Domain.union((2, 3), (0, 1))
    assert U.components == ((0.0, 1.0), (2.0, 3.0))
    assert not U.is_convex and U.measure == 2.0 and U.diameter == 3.0
    assert U.component_of(2.5) == 1
    assert U.dist_to_boundary(2.25) == pytest.approx(0.25)
    R = Domain.rectangle((0, 2), (0, 1))
    assert R.dim == 2 and R.is_convex and R.measure == 2.0
    assert R.dist_to_boundary((0.5, 0.3)) == pytest.approx(0.3)


@pytest.mark.parametrize("kind", [DIRICHLET, NEUMANN])
def test_basis_orthonormal(kind):
    B = build_basis(Domain.interval(0.0, 2.0), kind, 6)
    part = B.parts[0]
    x, w = np.polynomial.legendre.leggauss(64)
    x = 1.0 + x
    E = part.eigenfunctions(x)
    G = E.T @ (w[:, None] * E)
    np.testing.assert_allclose(G, np.eye(G.shape[0]), atol=1e-13)
    np.testing.assert_allclose(part.eigenvalues, (part.indices * math.pi / 2.0) ** 2)


def test_modes_sorted_across_components():
    B = build_basis(Domain.union((0, 1), (2, 4)), DIRICHLET, 3)
    ev = B.eigenvalues
    assert np.all(np.diff(ev) >= 0)
    assert len(B.modes) == 6


@pytest.mark.parametrize("u", [sine_mode(1), poly_bump(2), poly_bump(3, 0.2, 0.7)], ids=lambda u: u.name)
@pytest.mark.parametrize("kind", [DIRICHLET, NEUMANN])
def test_closed_form_coefficients(u, kind):
    B = build_basis(Domain.interval(), kind, 12)
    c = coefficients(u, B).per_component[0]
    a, b = u.support[0]
    for j, cj in zip(B.parts[0].indices, c):
        phi = B.parts[0].eigenfunctions
        ref = quad(lambda x: float(u(x)) * phi(np.array([x]), [j])[0, 0], a, b, limit=200, epsabs=1e-14)[0]
        assert cj == pytest.approx(ref, abs=1e-12)


def test_parseval_with_tail():
    u = poly_bump(2)
    co = coefficients(u, build_basis(Domain.interval(), DIRICHLET, 512))
    c = co.per_component[0]
    missing = u.l2_norm_sq() - float(np.sum(c * c))
    assert 0 <= missing <= co.tail + 1e-14


def test_sine_single_mode():
    c = coefficients(sine_mode(1), build_basis(Domain.interval(), DIRICHLET, 16)).per_component[0]
    assert c[0] == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert np.max(np.abs(c[1:])) < 1e-15


def test_coefficients_reject_outside_support():
    with pytest.raises(ValueError):
        coefficients(poly_bump(2, 0.5, 1.5), build_basis(Domain.interval(), DIRICHLET, 8))


def test_rectangle_coefficients():
    B = build_basis(Domain.rectangle(), DIRICHLET, 32)
    co = coefficients(product_bump(2), B)
    C = co.per_component[0]
    missing = product_bump(2).l2_norm_sq() - float(np.sum(C * C))
    assert 0 <= missing <= co.tail
    assert co.tail < 1e-5


def test_power_tail():
    j = np.arange(1, 101)
    v = j**-3.0
    t = power_tail(v, j, 3.0)
    ref = sum(k**-3.0 for k in range(101, 200000))
    assert t == pytest.approx(ref, rel=1e-4)
    assert power_tail(v, j, 1.0) == math.inf


def test_split_resolved():
    c = np.zeros(1000)
    c[1] = 1.0
    c[5:] = 1e-17
    clean, finite = split_resolved(c)
    assert finite and np.count_nonzero(clean) == 1
    slow = 1.0 / np.arange(1, 1001) ** 2
    assert split_resolved(slow) == (slow, False) or not split_resolved(slow)[1]
    cm = coefficients(cosine_mode(1, amplitude=math.sqrt(2)), build_basis(Domain.interval(), NEUMANN, 256))
    assert split_resolved(cm.per_component[0])[1]
