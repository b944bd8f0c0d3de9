"""Finite forest algebras, wreath products and temporal logics over forests."""
__version__ = "0.1.0"

from ._backend import BACKEND
from .terms import *  # noqa: F401,F403
from .monoid import *  # noqa: F401,F403
from .algebra import *  # noqa: F401,F403
from .products import *  # noqa: F401,F403
from .logic import *  # noqa: F401,F403
from .classify import *  # noqa: F401,F403
from .decompose import *  # noqa: F401,F403
from .corpus import *  # noqa: F401,F403
from .formats import *  # noqa: F401,F403
