"""Projection-valued quantum logic for finite-dimensional quantum systems."""
from .errors import *  # noqa: F401,F403
from .linalg import TolerancePolicy, get_policy, set_policy, using_policy
from .spectral import Observable, QuantumReal
from .proplang import parse, to_text
from .truth import Model, holds, probability, truth_value, well_formed
from .jointdist import JointDistribution, jpd, jpd_exists
from .measurement import MeasuringProcess, Povm, Povm2, povm

__version__ = "0.1.0"
