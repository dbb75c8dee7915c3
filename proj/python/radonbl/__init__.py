"""Brascamp-Lieb weights, invariant polynomials and Radon-like operator experiments."""

from ._core import *  # noqa: F401,F403
from ._core import InputError, NumericalError, __version__  # noqa: F401
