"""Physical constants shared across the toolbox."""

C = 299792458.0  # speed of light in vacuum [m/s]
