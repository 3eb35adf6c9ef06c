"""Physical constants in SI units (CODATA 2018 exact/recommended values)."""

import math

E_CHARGE = 1.602176634e-19     # elementary charge, C (exact)
M_E = 9.1093837015e-31         # electron mass, kg
PLANCK_H = 6.62607015e-34      # Planck constant, J s (exact)
HBAR = 1.054571817e-34         # reduced Planck constant, J s
K_B = 1.380649e-23             # Boltzmann constant, J/K (exact)
EPS_0 = 8.8541878128e-12       # vacuum permittivity, F/m
C_LIGHT = 299792458.0          # speed of light, m/s (exact)

# Cutoff frequency of the plasmon/low-energy excitation spectrum used by the
# aloof-scattering probability model.  Fixed value, 0.6e12 s^-1.
OMEGA_CUTOFF = 0.6e12

# Full width at half maximum of a unit-sigma Gaussian.
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

# Image-charge acceleration prefactor: a(y) = -IMAGE_ACCEL / y^2 for an
# electron at height y above a grounded conducting plane.
IMAGE_ACCEL = E_CHARGE**2 / (16.0 * math.pi * EPS_0 * M_E)
