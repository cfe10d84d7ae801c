"""Lie-theoretic exponents and chain deformation for symmetric spaces.

Subpackages and modules:

* :mod:`symgeo.rootdata`   restricted root systems with exact arithmetic
* :mod:`symgeo.hesspec`    closed-form Hessian spectra and k-trace functionals
* :mod:`symgeo.exponents`  exponent tables and feasibility predicates
* :mod:`symgeo.modelcheck` matrix-model and quadrature verification
* :mod:`symgeo.spherical`  Monte-Carlo spherical functions and the
  Beta-factor normalization
* :mod:`symgeo.ffengine`   deformation of polyhedral chains into skeleta
* :mod:`symgeo.cli`        command-line front end
"""

__version__ = "0.1.0"
