"""Numerics for stable solutions of the fractional Henon-Lane-Emden equation.

(-Delta)^s u = |x|^a |u|^{p-1} u in R^n, for 0 < s < 2 with s != 1.

Subpackages by topic:

* :mod:`fhle.specfun`       Gamma-function constants (kappa_s, lambda(alpha),
                            Hardy constant, critical exponent).
* :mod:`fhle.exponents`     stability margin, singular-solution amplitude,
                            Joseph-Lundgren-type threshold, classification.
* :mod:`fhle.kernels`       spherical kernels K_alpha and the unnormalized
                            Hardy / multiplier integrals.
* :mod:`fhle.extension`     Poisson-kernel extension to the weighted
                            half-space problem and its Neumann trace.
* :mod:`fhle.monotonicity`  rescaled energies and their derivative formulas.
* :mod:`fhle.estimates`     cutoff mass rho and scaling-law checks.
* :mod:`fhle.cli`           the ``fhle`` command-line tool.
"""

from .errors import FhleError
from .specfun import ProblemParams

__version__ = "0.1.0"

__all__ = ["FhleError", "ProblemParams", "__version__"]
