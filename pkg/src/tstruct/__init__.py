"""t-structures on derived categories of commutative noetherian rings, made
concrete on finite prime posets."""

from ._backend import BACKEND
from .errors import InputError, PreconditionError, ResourceError, TStructError

__version__ = "0.1.0"

__all__ = ["BACKEND", "InputError", "PreconditionError", "ResourceError",
           "TStructError", "__version__"]
