"""Physical constants used across the receiver models (SI units)."""

BOLTZMANN = 1.380649e-23  # J/K

# Permittivity of vacuum as used by the junction-capacitance model; the
# bandwidth calibration constants are tied to this value.
VACUUM_PERMITTIVITY = 8.85e-12  # F/m
