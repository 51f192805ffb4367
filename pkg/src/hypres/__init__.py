"""Pollicott-Ruelle resonances of compact hyperbolic manifolds from Laplace spectra.

Submodules:

- ``lorentz_core``: so(1, n+1) algebra, the hyperboloid model, boundary maps.
- ``sym_tensor``: symmetric tensors, trace-free decomposition, harmonic polynomials.
- ``frame_transport``: horocyclic transport of boundary tensors.
- ``horocyclic``: frame-bundle derivatives and first-band states.
- ``poisson_operator``: Poisson transform of boundary tensors, half-space checks.
- ``resonance_spectrum``: enumeration, exceptional sets, Weyl and pairing constants.
- ``verify`` and ``cli``: the verification harness and command line.
"""
from . import (frame_transport, horocyclic, kernels, lorentz_core, poisson_operator, quadrature,
               resonance_spectrum, sym_tensor)
from .kernels import BACKEND
from .lorentz_core import DomainError
from .poisson_operator import PoleError
from .resonance_spectrum import SpectrumEntry, Window, enumerate_resonances

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainError",
    "PoleError",
    "SpectrumEntry",
    "Window",
    "enumerate_resonances",
    "frame_transport",
    "horocyclic",
    "kernels",
    "lorentz_core",
    "poisson_operator",
    "quadrature",
    "resonance_spectrum",
    "sym_tensor",
]
