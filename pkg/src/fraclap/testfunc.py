"""Closed-form test functions, zero-extended outside their support.

A one-dimensional test function is a sum of *pieces*; each piece lives on a
closed interval and is either a polynomial or a sine/cosine of fixed
frequency.  Pieces know their derivatives of every order and their Fourier
integrals in closed form, which is all that the operators need.

Polynomials are stored in the local coordinate ``t = (x - c) / h`` of their
interval.  For bump functions the coefficients are integers, so boundary
values and jumps that vanish analytically vanish exactly in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "PolyPiece",
    "TrigPiece",
    "TestFunction",
    "ProductFunction",
    "sine_mode",
    "cosine_mode",
    "poly_bump",
    "polynomial",
    "constant",
    "product_bump",
    "laplacian_power",
    "check_mean_zero",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)
_SMALL_ETA = 20.0
_MAX_JUMP_ORDER = 24


class InsufficientSmoothness(ValueError):
    """Raised when a Laplacian power would create boundary measures."""


@dataclass(frozen=True)
class PolyPiece:
    """Polynomial in ``t = (x - c)/h`` on ``[a, b]``."""

    a: float
    b: float
    poly: Polynomial

    @property
    def center(self):
        return 0.5 * (self.a + self.b)

    @property
    def half(self):
        return 0.5 * (self.b - self.a)

    @property
    def frequency(self):
        return 0.0

    def deriv(self, x, k=0):
        t = (np.asarray(x, dtype=float) - self.center) / self.half
        p = self.poly.deriv(k) if k else self.poly
        return p(t) / self.half**k

    def deriv_at_end(self, right: bool, k: int) -> float:
        p = self.poly.deriv(k) if k else self.poly
        return float(p(1.0 if right else -1.0)) / self.half**k

    def scaled(self, c):
        return PolyPiece(self.a, self.b, self.poly * c)

    def second_derivative(self):
        return PolyPiece(self.a, self.b, self.poly.deriv(2) / self.half**2)

    def integral(self) -> float:
        q = self.poly.integ()
        return float(q(1.0) - q(-1.0)) * self.half

    def fourier(self, xi):
        """Unnormalized integral of the piece against exp(-i xi x)."""
        xi = np.asarray(xi, dtype=float)
        h, c = self.half, self.center
        eta = xi * h
        out = np.empty(xi.shape, dtype=complex)
        small = np.abs(eta) <= _SMALL_ETA
        if np.any(small):
            vals = self.poly(_GL_NODES)
            ph = np.exp(-1j * np.outer(eta[small], _GL_NODES))
            out[small] = ph @ (_GL_WEIGHTS * vals)
        big = ~small
        if np.any(big):
            e = eta[big]
            acc = np.zeros(e.shape, dtype=complex)
            ie = 1j * e
            em, ep = np.exp(-1j * e), np.exp(1j * e)
            p = self.poly
            for k in range(self.poly.degree() + 1):
                pr, pl = float(p(1.0)), float(p(-1.0))
                acc -= (pr * em - pl * ep) / ie ** (k + 1)
                p = p.deriv()
            out[big] = acc
        return h * np.exp(-1j * xi * c) * out


@dataclass(frozen=True)
class TrigPiece:
    """``A sin(w (x - a)) + B cos(w (x - a))`` on ``[a, b]``."""

    a: float
    b: float
    omega: float
    A: float
    B: float

    @property
    def frequency(self):
        return abs(self.omega)

    def deriv(self, x, k=0):
        u = self.omega * (np.asarray(x, dtype=float) - self.a)
        # d^k/du^k sin(u) = sin(u + k pi/2)
        ph = 0.5 * math.pi * k
        return self.omega**k * (self.A * np.sin(u + ph) + self.B * np.cos(u + ph))

    def deriv_at_end(self, right: bool, k: int) -> float:
        if not right:
            # exact values at the left end: sin(k pi/2), cos(k pi/2)
            s, c = [(0, 1), (1, 0), (0, -1), (-1, 0)][k % 4]
            return self.omega**k * (self.A * s + self.B * c)
        return float(self.deriv(self.b, k))

    def scaled(self, c):
        return TrigPiece(self.a, self.b, self.omega, self.A * c, self.B * c)

    def second_derivative(self):
        w2 = -self.omega**2
        return TrigPiece(self.a, self.b, self.omega, self.A * w2, self.B * w2)

    def integral(self) -> float:
        L, w = self.b - self.a, self.omega
        if w == 0.0:
            return self.B * L
        return self.A * (1.0 - math.cos(w * L)) / w + self.B * math.sin(w * L) / w

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        L = self.b - self.a
        alpha = 0.5 * (self.B - 1j * self.A)
        beta = 0.5 * (self.B + 1j * self.A)

        def seg(kappa):
            # int_0^L exp(i kappa u) du, stable for all kappa
            return L * np.exp(0.5j * kappa * L) * np.sinc(kappa * L / (2 * math.pi))

        return np.exp(-1j * xi * self.a) * (
            alpha * seg(self.omega - xi) + beta * seg(-self.omega - xi)
        )


def _mask(x, a, b):
    """1 inside, 1/2 at an endpoint, 0 outside (midpoint convention at jumps)."""
    inside = ((x > a) & (x < b)).astype(float)
    return inside + 0.5 * ((x == a) | (x == b))


@dataclass
class TestFunction:
    """Zero-extended piecewise closed-form function on the real line."""

    pieces: list
    name: str = "u"
    nonnegative: bool | None = None
    dim: int = field(default=1, init=False)

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("a test function needs at least one piece")
        if self.nonnegative is None:
            self.nonnegative = self._sampled_nonnegative()

    def _sampled_nonnegative(self):
        x = np.concatenate(
            [np.linspace(p.a, p.b, 401) for p in self.pieces]
        )
        v = self(x)
        return bool(np.all(v >= -1e-14 * max(1.0, np.max(np.abs(v)))))

    def __call__(self, x):
        return self.derivative(x, 0)

    def derivative(self, x, k=0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for p in self.pieces:
            m = _mask(x, p.a, p.b)
            if np.any(m):
                out = out + m * np.where(m > 0, p.deriv(x, k), 0.0)
        return out

    # -- structure ---------------------------------------------------------
    @property
    def breakpoints(self) -> np.ndarray:
        return np.unique(np.array([e for p in self.pieces for e in (p.a, p.b)]))

    @property
    def support(self) -> list[tuple[float, float]]:
        iv = sorted((p.a, p.b) for p in self.pieces)
        merged = [list(iv[0])]
        for a, b in iv[1:]:
            if a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return [tuple(m) for m in merged]

    @property
    def max_frequency(self) -> float:
        return max(p.frequency for p in self.pieces)

    def jumps(self, k: int) -> dict[float, float]:
        """Jump u^(k)(e+) - u^(k)(e-) of the zero extension at each breakpoint."""
        out: dict[float, float] = {}
        for p in self.pieces:
            out[p.a] = out.get(p.a, 0.0) + p.deriv_at_end(False, k)
            out[p.b] = out.get(p.b, 0.0) - p.deriv_at_end(True, k)
        return out

    def _deriv_scale(self, k):
        return max(
            float(np.max(np.abs(p.deriv(np.linspace(p.a, p.b, 33), k)))) for p in self.pieces
        )

    def first_jump_order(self) -> int:
        """Lowest derivative order with a nonzero jump somewhere."""
        for k in range(_MAX_JUMP_ORDER):
            scale = self._deriv_scale(k) + 1e-300
            if any(abs(j) > 1e-11 * scale for j in self.jumps(k).values()):
                return k
        return _MAX_JUMP_ORDER

    @property
    def smoothness(self) -> float:
        """Supremum of s with the zero extension in H^s(R)."""
        return self.first_jump_order() + 0.5

    def endpoint_expansion(self, n_terms: int) -> dict[float, np.ndarray]:
        """Jumps of orders 0..n_terms-1 at every breakpoint.

        For large |xi| the Fourier transform equals
        (2 pi)^(-1/2) sum_e exp(-i xi e) sum_k J_k(e) / (i xi)^(k+1).
        """
        out = {e: np.zeros(n_terms) for e in self.breakpoints}
        for k in range(n_terms):
            tol = 1e-11 * self._deriv_scale(k)
            for e, j in self.jumps(k).items():
                if abs(j) > tol:
                    out[e][k] += j
        return out

    # -- integrals -----------------------------------------------------------
    def integral(self) -> float:
        return float(sum(p.integral() for p in self.pieces))

    def _panels(self):
        bp = self.breakpoints
        return list(zip(bp[:-1], bp[1:]))

    def inner(self, g, n_nodes: int = 96) -> float:
        """Integral of u * g over the support by panelwise Gauss-Legendre."""
        xg, wg = np.polynomial.legendre.leggauss(n_nodes)
        total = 0.0
        for a, b in self._panels():
            x = 0.5 * (a + b) + 0.5 * (b - a) * xg
            total += 0.5 * (b - a) * float(np.dot(wg, self(x) * g(x)))
        return total

    def l2_norm_sq(self) -> float:
        return self.inner(self)

    def fourier(self, xi):
        """Fourier transform with the (2 pi)^(-1/2) normalization."""
        xi = np.asarray(xi, dtype=float)
        tot = np.zeros(xi.shape, dtype=complex)
        for p in self.pieces:
            tot = tot + p.fourier(xi)
        return tot / math.sqrt(2 * math.pi)

    def restrict(self, a: float, b: float) -> "TestFunction | None":
        ps = [p for p in self.pieces if p.a >= a and p.b <= b]
        if not ps:
            return None
        return TestFunction(ps, name=self.name, nonnegative=self.nonnegative)

    # -- algebra -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TestFunction):
            return NotImplemented
        nn = True if (self.nonnegative and other.nonnegative) else None
        return TestFunction(self.pieces + other.pieces, f"{self.name}+{other.name}", nn)

    def __mul__(self, c):
        c = float(c)
        nn = None if c < 0 else self.nonnegative
        return TestFunction([p.scaled(c) for p in self.pieces], self.name, nn)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * (-1.0)

    def renamed(self, name):
        return TestFunction(list(self.pieces), name, self.nonnegative)

    @property
    def is_mean_zero(self) -> bool:
        return check_mean_zero(self, 1e-10)


def sine_mode(j: int, a: float = 0.0, b: float = 1.0, amplitude: float = 1.0) -> TestFunction:
    """``amplitude * sin(j pi (x - a)/(b - a))`` on ``[a, b]``."""
    w = j * math.pi / (b - a)
    name = f"sin({j}pi x)" if (a, b) == (0.0, 1.0) and amplitude == 1.0 else f"sine_mode({j})"
    return TestFunction([TrigPiece(a, b, w, amplitude, 0.0)], name=name,
                        nonnegative=(j == 1 and amplitude > 0) or None)


def cosine_mode(j: int, a: float = 0.0, b: float = 1.0, amplitude: float = 1.0) -> TestFunction:
    w = j * math.pi / (b - a)
    return TestFunction([TrigPiece(a, b, w, 0.0, amplitude)], name=f"cosine_mode({j})")


def poly_bump(p: int, a: float = 0.0, b: float = 1.0) -> TestFunction:
    """``((x - a)(b - x) / ((b - a)/2)^2)^p``, i.e. ``(1 - t^2)^p`` in local coordinates."""
    if p < 1 or int(p) != p:
        raise ValueError("poly_bump needs an integer p >= 1")
    poly = Polynomial([1.0, 0.0, -1.0]) ** int(p)
    return TestFunction([PolyPiece(a, b, poly)], name=f"poly_bump({p})", nonnegative=True)


def polynomial(coef_in_x, a: float, b: float, name: str = "poly") -> TestFunction:
    """Polynomial with monomial coefficients in ``x`` restricted to ``[a, b]``."""
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    px = Polynomial(coef_in_x)
    poly = px(Polynomial([c, h]))
    return TestFunction([PolyPiece(a, b, poly)], name=name)


def constant(value: float, a: float = 0.0, b: float = 1.0) -> TestFunction:
    return TestFunction([PolyPiece(a, b, Polynomial([float(value)]))], name=f"const({value:g})")


def laplacian_power(u, k: int):
    """Closed form of ``(-Delta)^k u`` for the zero extension.

    The distributional Laplacian of the zero extension picks up boundary
    measures unless every jump of order < 2k vanishes; that case is refused.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(u, ProductFunction):
        return u.laplacian_power(k)
    if k == 0:
        return u
    if u.first_jump_order() < 2 * k:
        raise InsufficientSmoothness(
            f"{u.name}: zero extension is not C^{2 * k - 1}; (-Delta)^{k} has boundary terms"
        )
    pieces = list(u.pieces)
    for _ in range(k):
        pieces = [p.second_derivative().scaled(-1.0) for p in pieces]
    return TestFunction(pieces, name=f"(-D)^{k}{u.name}", nonnegative=None)


def check_mean_zero(u, tol: float) -> bool:
    """True iff |int u| <= tol * ||u||_L2 * |supp u|^(1/2)."""
    if isinstance(u, ProductFunction):
        m = u.integral()
        norm = math.sqrt(u.l2_norm_sq())
        area = u.support_measure()
        return abs(m) <= tol * norm * math.sqrt(area)
    m = u.integral()
    norm = math.sqrt(u.l2_norm_sq())
    meas = sum(b - a for a, b in u.support)
    return abs(m) <= tol * norm * math.sqrt(meas)


class ProductFunction:
    """Finite sum of separable products ``c * f(x1) * g(x2)`` in two dimensions."""

    dim = 2

    def __init__(self, terms, name="u2", nonnegative=None):
        self.terms = [(float(c), f, g) for c, f, g in terms]
        self.name = name
        self.nonnegative = nonnegative

    def __call__(self, x1, x2):
        x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
        out = np.zeros(x1.shape)
        for c, f, g in self.terms:
            out = out + c * f(x1) * g(x2)
        return out

    @property
    def support_box(self):
        xs = [f.support for _, f, _ in self.terms]
        ys = [g.support for _, _, g in self.terms]
        return (
            (min(s[0][0] for s in xs), max(s[-1][1] for s in xs)),
            (min(s[0][0] for s in ys), max(s[-1][1] for s in ys)),
        )

    def support_measure(self):
        (a1, b1), (a2, b2) = self.support_box
        return (b1 - a1) * (b2 - a2)

    @property
    def breakpoints(self):
        b1 = np.unique(np.concatenate([f.breakpoints for _, f, _ in self.terms]))
        b2 = np.unique(np.concatenate([g.breakpoints for _, _, g in self.terms]))
        return b1, b2

    @property
    def smoothness(self):
        return min(min(f.smoothness, g.smoothness) for _, f, g in self.terms)

    def integral(self):
        return sum(c * f.integral() * g.integral() for c, f, g in self.terms)

    def l2_norm_sq(self):
        tot = 0.0
        for c, f, g in self.terms:
            for d, f2, g2 in self.terms:
                tot += c * d * f.inner(f2) * g.inner(g2)
        return tot

    def fourier(self, xi1, xi2):
        out = 0.0
        for c, f, g in self.terms:
            out = out + c * f.fourier(xi1) * g.fourier(xi2)
        return out

    def laplacian_power(self, k):
        terms = [(c, f, g) for c, f, g in self.terms]
        for _ in range(k):
            new = []
            for c, f, g in terms:
                new.append((c, laplacian_power(f, 1), g))
                new.append((c, f, laplacian_power(g, 1)))
            terms = new
        return ProductFunction(terms, name=f"(-D)^{k}{self.name}")


def product_bump(p: int, a1=0.0, b1=1.0, a2=0.0, b2=1.0) -> ProductFunction:
    """Tensor product of one-dimensional poly bumps on a rectangle."""
    return ProductFunction(
        [(1.0, poly_bump(p, a1, b1), poly_bump(p, a2, b2))],
        name=f"product_bump({p})",
        nonnegative=True,
    )
