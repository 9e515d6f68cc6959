r"""Special functions and normalization constants.

The modified Bessel function of the second kind is evaluated from

.. math::
    K_\nu(\tau) = \int_0^\infty e^{-\tau\cosh t}\cosh(\nu t)\,dt

with the trapezoidal rule, which converges geometrically for this analytic,
doubly decaying integrand.  Everything here accepts numpy arrays for the
argument so that modal sums can be evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EvalResult",
    "gamma_fn",
    "bessel_k",
    "bessel_k_array",
    "q_kernel",
    "q_kernel_array",
    "q_kernel_derivative_array",
    "gagliardo_constant",
    "extension_constant",
    "riesz_constant",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalResult:
    """A scalar together with an estimated absolute error."""

    value: float
    abs_error: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite value {self.value!r}")
        if not (math.isfinite(self.abs_error) and self.abs_error >= 0.0):
            raise ValueError(f"invalid error estimate {self.abs_error!r}")

    def __float__(self):
        return float(self.value)


def gamma_fn(x: float) -> float:
    """Gamma function; raises ``ValueError`` at the poles 0, -1, -2, ..."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def _k_scaled(nu: float, tau: np.ndarray, n_nodes: int):
    """Return e^tau K_nu(tau) on the fine and the half-density trapezoid grids."""
    tau = np.asarray(tau, dtype=float)
    anu = abs(nu)
    # integrand below ~1e-30 of its peak past t_max
    t_max = np.arccosh(1.0 + (70.0 + 1.5 * anu * np.log1p(1.0 / tau)) / tau)
    t_max = np.maximum(t_max, 1e-3)
    h = t_max / n_nodes
    k = np.arange(n_nodes + 1)
    t = k[None, :] * h[..., None]
    f = np.exp(-tau[..., None] * (np.cosh(t) - 1.0)) * np.cosh(nu * t)
    w = np.ones(n_nodes + 1)
    w[0] = 0.5
    fine = h * (f @ w)
    coarse_w = np.zeros(n_nodes + 1)
    coarse_w[::2] = 1.0
    coarse_w[0] = 0.5
    coarse = 2.0 * h * (f @ coarse_w)
    return fine, coarse


def bessel_k_array(nu: float, tau, n_nodes: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized K_nu(tau) for tau > 0; returns ``(values, abs_errors)``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(~(tau > 0.0)):
        raise ValueError("bessel_k requires tau > 0")
    fine, coarse = _k_scaled(float(nu), tau, n_nodes)
    scale = np.exp(-tau)
    values = fine * scale
    # trapezoid error squares when h halves; |fine - coarse| bounds the coarse error
    err = np.abs(fine - coarse) * scale + 16 * _EPS * np.abs(values)
    return values, err


def bessel_k(order: float, tau: float) -> EvalResult:
    r"""Modified Bessel function of the second kind :math:`K_\nu(\tau)`.

    Parameters
    ----------
    order : float
        Real order; K is even in the order.
    tau : float
        Positive argument.
    """
    if not tau > 0.0:
        raise ValueError(f"bessel_k requires tau > 0, got {tau!r}")
    v, e = bessel_k_array(order, np.array([tau]))
    return EvalResult(float(v[0]), float(e[0]))


def _check_sigma(sigma: float):
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"order must lie in (0, 1), got {sigma!r}")


def q_kernel_array(sigma: float, tau) -> np.ndarray:
    r"""Vectorized :math:`Q_\sigma(\tau) = 2^{1-\sigma}\tau^\sigma K_\sigma(\tau)/\Gamma(\sigma)`."""
    _check_sigma(sigma)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.ones_like(tau)
    pos = tau > 0.0
    if np.any(pos):
        k, _ = bessel_k_array(sigma, tau[pos])
        out[pos] = 2.0 ** (1.0 - sigma) / math.gamma(sigma) * tau[pos] ** sigma * k
    return out


def q_kernel_derivative_array(sigma: float, tau) -> np.ndarray:
    r"""Derivative :math:`Q_\sigma'(\tau) = -2^{1-\sigma}\tau^\sigma K_{1-\sigma}(\tau)/\Gamma(\sigma)`.

    Uses :math:`(\tau^\nu K_\nu)' = -\tau^\nu K_{\nu-1}` and :math:`K_{\nu-1} = K_{1-\nu}`.
    The value at zero is ``-inf`` for sigma < 1/2, finite otherwise; callers
    only request tau > 0.
    """
    _check_sigma(sigma)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    k, _ = bessel_k_array(1.0 - sigma, tau)
    return -(2.0 ** (1.0 - sigma)) / math.gamma(sigma) * tau**sigma * k


def q_kernel(sigma: float, tau: float) -> EvalResult:
    """Extension profile Q_sigma(tau); exactly 1 at tau = 0."""
    _check_sigma(sigma)
    if tau < 0.0:
        raise ValueError("q_kernel requires tau >= 0")
    if tau == 0.0:
        return EvalResult(1.0, 0.0)
    k = bessel_k(sigma, tau)
    c = 2.0 ** (1.0 - sigma) / math.gamma(sigma) * tau**sigma
    return EvalResult(c * k.value, c * k.abs_error)


def gagliardo_constant(n: int, s: float) -> float:
    """Constant c_{n,s} of the double-integral form of the restricted Dirichlet energy."""
    if n < 1:
        raise ValueError("dimension must be positive")
    _check_sigma(s)
    return 2.0 ** (2 * s - 1) * math.pi ** (-n / 2) * math.gamma((n + 2 * s) / 2) / abs(math.gamma(-s))


def extension_constant(sigma: float) -> float:
    """Constant C_sigma linking the weighted normal derivative to the operator."""
    _check_sigma(sigma)
    return 4.0**sigma * math.gamma(1 + sigma) / math.gamma(1 - sigma)


def riesz_constant(n: int, sigma: float) -> float:
    """Normalization of the kernel |x - y|^(2 sigma - n) with symbol |xi|^(-2 sigma)."""
    if not 0.0 < 2 * sigma < n:
        raise ValueError(f"need 0 < 2*sigma < n, got sigma={sigma!r}, n={n}")
    return math.gamma(n / 2 - sigma) / (4.0**sigma * math.pi ** (n / 2) * math.gamma(sigma))
