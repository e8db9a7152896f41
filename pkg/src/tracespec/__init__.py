"""Great-circle trace spectra of multiplier-equation solutions and the
matching spectral-width (bandwidth) bounds, with the Helmholtz equation as
the worked case."""

__version__ = "0.1.0"
