"""Domains with explicit Dirichlet and Neumann eigenbases.

Supported domains are finite disjoint unions of intervals and axis-aligned
rectangles.  Interval modes are sines and cosines; rectangle modes are
tensor products; a disconnected domain carries one family of modes per
component, each extended by zero.  In particular a union of ``m`` intervals
has a Neumann kernel of dimension ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import zeta

from fraclap.testfunc import ProductFunction, TestFunction

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "Domain",
    "Mode",
    "IntervalBasis",
    "SpectralBasis",
    "Coefficients",
    "build_basis",
    "coefficients",
    "power_tail",
    "split_resolved",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"


class UnsupportedDomain(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """Union of disjoint intervals (``dim == 1``) or one rectangle (``dim == 2``)."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("empty domain")
        if isinstance(comps[0][0], (tuple, list)):
            if len(comps) != 1:
                raise UnsupportedDomain("only a single rectangle is supported in 2D")
            (a1, b1), (a2, b2) = comps[0]
            if not (a1 < b1 and a2 < b2):
                raise ValueError("degenerate rectangle")
            object.__setattr__(self, "components", (((float(a1), float(b1)), (float(a2), float(b2))),))
            return
        comps = tuple(sorted((float(a), float(b)) for a, b in comps))
        for a, b in comps:
            if not a < b:
                raise ValueError(f"interval ({a}, {b}) is empty")
        for (_, b0), (a1, _) in zip(comps[:-1], comps[1:]):
            if a1 <= b0:
                raise ValueError("intervals must be pairwise disjoint")
        object.__setattr__(self, "components", comps)

    @classmethod
    def interval(cls, a=0.0, b=1.0):
        return cls(((a, b),))

    @classmethod
    def union(cls, *intervals):
        return cls(tuple(intervals))

    @classmethod
    def rectangle(cls, x_range=(0.0, 1.0), y_range=(0.0, 1.0)):
        return cls(((tuple(x_range), tuple(y_range)),))

    @property
    def dim(self) -> int:
        return 2 if isinstance(self.components[0][0], tuple) else 1

    @property
    def measure(self) -> float:
        if self.dim == 2:
            (a1, b1), (a2, b2) = self.components[0]
            return (b1 - a1) * (b2 - a2)
        return sum(b - a for a, b in self.components)

    @property
    def is_convex(self) -> bool:
        return self.dim == 2 or len(self.components) == 1

    @property
    def diameter(self) -> float:
        if self.dim == 2:
            (a1, b1), (a2, b2) = self.components[0]
            return math.hypot(b1 - a1, b2 - a2)
        return self.components[-1][1] - self.components[0][0]

    def component_of(self, x: float) -> int:
        for i, (a, b) in enumerate(self.components):
            if a <= x <= b:
                return i
        raise ValueError(f"{x} is not in the domain")

    def dist_to_boundary(self, x) -> float:
        if self.dim == 2:
            (a1, b1), (a2, b2) = self.components[0]
            return min(x[0] - a1, b1 - x[0], x[1] - a2, b2 - x[1])
        a, b = self.components[self.component_of(x)]
        return min(x - a, b - x)

    def contains_function(self, u) -> bool:
        if isinstance(u, ProductFunction):
            (a1, b1), (a2, b2) = u.support_box
            (c1, d1), (c2, d2) = self.components[0]
            return c1 <= a1 and b1 <= d1 and c2 <= a2 and b2 <= d2
        return all(
            any(a <= p.a and p.b <= b for a, b in self.components) for p in u.pieces
        )

    def __str__(self):
        if self.dim == 2:
            (a1, b1), (a2, b2) = self.components[0]
            return f"({a1:g},{b1:g})x({a2:g},{b2:g})"
        return "U".join(f"({a:g},{b:g})" for a, b in self.components)


@dataclass(frozen=True)
class Mode:
    index: int
    eigenvalue: float
    kind: str
    evaluate: Callable
    component: int = 0


class IntervalBasis:
    """Modes ``j = j0..N`` of one interval, evaluated in vectorized form."""

    def __init__(self, a: float, b: float, kind: str, N: int):
        self.a, self.b, self.kind, self.N = float(a), float(b), kind, int(N)
        self.length = self.b - self.a
        self.j0 = 0 if kind == NEUMANN else 1
        self.indices = np.arange(self.j0, self.N + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        return (self.indices * math.pi / self.length) ** 2

    def eigenfunctions(self, x, indices=None) -> np.ndarray:
        """Matrix ``[len(x), len(indices)]`` of normalized eigenfunction values (zero off the interval)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        j = self.indices if indices is None else np.asarray(indices)
        arg = np.outer(x - self.a, j * math.pi / self.length)
        norm = math.sqrt(2.0 / self.length)
        if self.kind == DIRICHLET:
            v = norm * np.sin(arg)
        else:
            v = norm * np.cos(arg)
            v[:, j == 0] = 1.0 / math.sqrt(self.length)
        inside = (x >= self.a) & (x <= self.b)
        return v * inside[:, None]

    def coefficients(self, u: TestFunction | None) -> np.ndarray:
        """Inner products of ``u`` (restricted to this interval) with each mode, in closed form."""
        if u is None:
            return np.zeros(self.indices.size)
        omega = self.indices * math.pi / self.length
        G = np.zeros(omega.shape, dtype=complex)
        for p in u.pieces:
            G += p.fourier(omega)
        G *= np.exp(1j * omega * self.a)
        norm = math.sqrt(2.0 / self.length)
        if self.kind == DIRICHLET:
            return -norm * G.imag
        c = norm * G.real
        if self.j0 == 0:
            c[0] = u.integral() / math.sqrt(self.length)
        return c


def power_tail(values: np.ndarray, indices: np.ndarray, decay: float, n_fit: int = 10) -> float:
    """Bound on ``sum_{j > N} |v_j|`` assuming ``|v_j| <= C j^(-decay)``.

    ``C`` is the largest ``|v_j| j^decay`` among the last ``n_fit`` terms.
    Returns ``inf`` when the assumed decay is not summable.
    """
    if decay <= 1.0:
        return math.inf
    tail_v = np.abs(values[-n_fit:])
    tail_j = indices[-n_fit:].astype(float)
    C = float(np.max(tail_v * tail_j**decay))
    if C == 0.0:
        return 0.0
    return C * float(zeta(decay, float(indices[-1]) + 1.0))


def split_resolved(c: np.ndarray, rel: float = 1e-14, head: int = 64):
    """Detect a finite modal expansion.

    Returns ``(cleaned, finite)``.  When every coefficient past the first few
    is at rounding level relative to the largest, ``finite`` is True and those
    coefficients are zeroed in ``cleaned``; otherwise ``c`` is returned as is.
    """
    c = np.asarray(c, dtype=float)
    cmax = float(np.max(np.abs(c))) if c.size else 0.0
    if cmax == 0.0:
        return c, True
    keep = np.abs(c) > rel * cmax
    last = int(np.nonzero(keep)[0][-1])
    if last < min(head, c.size // 4):
        return np.where(keep, c, 0.0), True
    return c, False


@dataclass
class Coefficients:
    """Expansion coefficients per component plus a bound on the omitted energy."""

    per_component: list
    tail: float
    basis: "SpectralBasis"

    def as_list(self) -> list[float]:
        """Coefficients in the order of ``basis.modes``."""
        return [float(self.per_component[m.component][m.index - self.basis.j0]) for m in self.basis.modes] \
            if self.basis.domain.dim == 1 else list(np.ravel(self.per_component[0]))


class SpectralBasis:
    """Truncated Dirichlet or Neumann eigenbasis of a supported domain."""

    def __init__(self, domain: Domain, kind: str, N: int):
        if kind not in (DIRICHLET, NEUMANN):
            raise ValueError(f"unknown basis kind {kind!r}")
        if N < 1:
            raise ValueError("truncation N must be >= 1")
        self.domain, self.kind, self.N = domain, kind, int(N)
        if domain.dim == 1:
            self.parts = [IntervalBasis(a, b, kind, N) for a, b in domain.components]
        else:
            (a1, b1), (a2, b2) = domain.components[0]
            self.parts = [IntervalBasis(a1, b1, kind, N), IntervalBasis(a2, b2, kind, N)]
        self.j0 = self.parts[0].j0

    @property
    def modes(self) -> list[Mode]:
        out = []
        if self.domain.dim == 1:
            for ci, part in enumerate(self.parts):
                for j, lam in zip(part.indices, part.eigenvalues):
                    out.append(Mode(int(j), float(lam), self.kind,
                                    _mode_eval_1d(part, int(j)), ci))
        else:
            px, py = self.parts
            for i, li in zip(px.indices, px.eigenvalues):
                for j, lj in zip(py.indices, py.eigenvalues):
                    out.append(Mode(int(i) * (self.N + 1) + int(j), float(li + lj), self.kind,
                                    _mode_eval_2d(px, py, int(i), int(j))))
        out.sort(key=lambda m: (m.eigenvalue, m.component, m.index))
        return out

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([m.eigenvalue for m in self.modes])


def _mode_eval_1d(part, j):
    return lambda x: part.eigenfunctions(x, [j])[:, 0]


def _mode_eval_2d(px, py, i, j):
    return lambda x1, x2: (px.eigenfunctions(np.ravel(x1), [i])[:, 0]
                           * py.eigenfunctions(np.ravel(x2), [j])[:, 0]).reshape(np.shape(x1))


def build_basis(domain: Domain, kind: str, N: int) -> SpectralBasis:
    """First ``N`` modes per interval (plus the constant for Neumann)."""
    return SpectralBasis(domain, kind, N)


def _component_pieces(u: TestFunction, part: IntervalBasis):
    return u.restrict(part.a, part.b)


def coefficients(u, basis: SpectralBasis) -> Coefficients:
    """Inner products of ``u`` with the basis and a bound on ``sum_{j>N} coef_j^2``."""
    if not basis.domain.contains_function(u):
        raise ValueError(f"{u.name} is not supported in {basis.domain}")
    if basis.domain.dim == 1:
        per, tail = [], 0.0
        m = u.first_jump_order() + 1
        for part in basis.parts:
            c = part.coefficients(_component_pieces(u, part))
            per.append(c)
            tail += power_tail(c**2, part.indices, 2.0 * m)
        return Coefficients(per, tail, basis)
    px, py = basis.parts
    C = np.zeros((px.indices.size, py.indices.size))
    tail = 0.0
    for w, f, g in u.terms:
        cf, cg = px.coefficients(f), py.coefficients(g)
        C += w * np.outer(cf, cg)
        tf = power_tail(cf**2, px.indices, 2.0 * (f.first_jump_order() + 1))
        tg = power_tail(cg**2, py.indices, 2.0 * (g.first_jump_order() + 1))
        tail += w**2 * (tf * f.l2_norm_sq() + tg * g.l2_norm_sq())
    return Coefficients([C], tail, basis)
