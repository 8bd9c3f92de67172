"""Coverings of finite bound quiver categories over prime fields."""
from .exactfield import BACKEND, DEFAULT_PRIME
from .functorcore import LinearFunctor, check_balanced, check_covering, covering_order, lift
from .quivercat import BoundCategory, TabulatedCategory
from .repmod import Representation

__all__ = [
    "BACKEND", "DEFAULT_PRIME", "BoundCategory", "TabulatedCategory", "LinearFunctor",
    "Representation", "check_covering", "check_balanced", "covering_order", "lift",
]
__version__ = "0.1.0"
