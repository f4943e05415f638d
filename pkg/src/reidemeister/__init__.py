"""Generic knot projections, Reidemeister moves and isotopy event tracing."""

from .curve import FourierLoop, IsotopyFamily, project
from .kernels import BACKEND

__all__ = ["FourierLoop", "IsotopyFamily", "project", "BACKEND"]
__version__ = "0.1.0"
