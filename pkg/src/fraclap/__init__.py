"""Fractional Laplacians on explicitly solvable domains and their comparison."""

from fraclap.specfun import (
    EvalResult,
    bessel_k,
    extension_constant,
    gagliardo_constant,
    gamma_fn,
    q_kernel,
    riesz_constant,
)
from fraclap.domain import Domain, SpectralBasis, build_basis, coefficients
from fraclap.testfunc import (
    TestFunction,
    check_mean_zero,
    laplacian_power,
    poly_bump,
    product_bump,
    sine_mode,
)

from fraclap.forms import ComparisonRecord, FormValue, compare_forms, q_dr_fourier, q_dsp, q_higher, q_nsp
from fraclap.pointwise import compare_pointwise, dr_pointwise, riesz_pointwise, spectral_pointwise
from fraclap.extension import (
    cs_extension,
    dual_nsp_extension,
    energy,
    energy_chain,
    neumann_trace,
    st_extension,
    verify_form_energy_identity,
)

__version__ = "0.1.0"

__all__ = [
    "EvalResult",
    "bessel_k",
    "extension_constant",
    "gagliardo_constant",
    "gamma_fn",
    "q_kernel",
    "riesz_constant",
    "Domain",
    "SpectralBasis",
    "build_basis",
    "coefficients",
    "TestFunction",
    "check_mean_zero",
    "laplacian_power",
    "poly_bump",
    "product_bump",
    "sine_mode",
    "ComparisonRecord",
    "FormValue",
    "compare_forms",
    "q_dr_fourier",
    "q_dsp",
    "q_higher",
    "q_nsp",
    "compare_pointwise",
    "dr_pointwise",
    "riesz_pointwise",
    "spectral_pointwise",
    "cs_extension",
    "dual_nsp_extension",
    "energy",
    "energy_chain",
    "neumann_trace",
    "st_extension",
    "verify_form_energy_identity",
]
