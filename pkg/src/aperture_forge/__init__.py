"""aperture_forge: simulation and reconstruction for wideband synthetic apertures."""

__version__ = "0.1.0"
