"""Harmonic analysis on symmetric cones.

Spherical functions, Gindikin Gamma factors, boundary-orbit measures, the
spherical Fourier transform and the Plancherel density of the boundary
orbits, for the cones of positive definite real symmetric (``d = 1``) and
complex Hermitian (``d = 2``) matrices.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConeHarmonicsError,
    ConvergenceError,
    DomainError,
    PoleError,
    PreconditionError,
    StructuralError,
)
from .jordan import *  # noqa: F401,F403
from .cone import *  # noqa: F401,F403
from .special import *  # noqa: F401,F403
from .montecarlo import *  # noqa: F401,F403
from .spherical import *  # noqa: F401,F403
from .boundary import *  # noqa: F401,F403
from .plancherel import *  # noqa: F401,F403
from . import verify  # noqa: F401
