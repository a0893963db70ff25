"""Polynomial Taylor maps of ODE flows and Taylor-map networks."""

from ._taylormap import *  # noqa: F401,F403
from ._taylormap import (
    DivergenceError,
    DomainError,
    ParseError,
    ShapeError,
    TaylorMap,
    TrainConfig,
)

__version__ = "0.1.0"
