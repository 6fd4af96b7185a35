"""Quantum discord, channel-guessing games and lossy-channel key rates."""

from . import game, gaussian, info, keyrates, qmat
from .errors import DomainError, StateError
from .gaussian import GaussianState
from .qmat import QState, UnitaryOp

__version__ = "0.1.0"
