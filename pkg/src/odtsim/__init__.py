"""Simulation of a roller-array omnidirectional treadmill and its control loop."""

from .geom import UnitQuat, Vec3
from .kinematics import RigConfig

__version__ = "0.1.0"

__all__ = ["RigConfig", "UnitQuat", "Vec3", "__version__"]
