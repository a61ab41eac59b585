"""qal: a simulation and verification laboratory for the fifth-order
dispersive family on the torus."""

__version__ = "0.1.0"
