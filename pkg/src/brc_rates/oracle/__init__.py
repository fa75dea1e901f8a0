"""Independent reference computations used to check the closed-form rates."""

from .gaussian import EigenvalueFloorWarning, GaussianJoint, LinearGaussianModel, logdet_mi

__all__ = ["EigenvalueFloorWarning", "GaussianJoint", "LinearGaussianModel", "logdet_mi"]
