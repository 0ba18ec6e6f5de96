"""Emitter-waveguide photonics: analytic spectra, a three-mode Lindblad model,
photon correlations and the fits that go with them."""

from . import estimation, master_equation, polarization, quantum, waveguide
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
