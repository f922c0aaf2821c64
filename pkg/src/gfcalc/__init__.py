"""General fractional calculus on [0, 1] with Sonine kernel pairs.

Operators, Jacobi convolution series and a diagonal Petrov-Galerkin solver,
all built on closed-form fractional power series.
"""

from .basis import ConvolutionBasis, build, gfd_of_basis, linear_independence_check
from .jacobi import JacobiParams, gauss_jacobi_rule
from .kernels import OrderNKernel, SonineKernelPair, build_pair, classical_pair, kernel_power
from .operators import Kind, OperatorSpec, Side, apply_callable, apply_fps, monomial_gfd
from .series import FracPowerSeries, monomial, polynomial
from .solver import BVPSpec, GalerkinSolution, convergence_study, mse, solve

__version__ = "0.1.0"

__all__ = [
    "BVPSpec",
    "ConvolutionBasis",
    "FracPowerSeries",
    "GalerkinSolution",
    "JacobiParams",
    "Kind",
    "OperatorSpec",
    "OrderNKernel",
    "Side",
    "SonineKernelPair",
    "apply_callable",
    "apply_fps",
    "build",
    "build_pair",
    "classical_pair",
    "convergence_study",
    "gauss_jacobi_rule",
    "gfd_of_basis",
    "kernel_power",
    "linear_independence_check",
    "monomial",
    "monomial_gfd",
    "mse",
    "polynomial",
    "solve",
]
