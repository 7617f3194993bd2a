"""Statistical structures on coordinate charts: dual connections, curvature, Laplacians and spectra."""

from .structure import StatStructure, TensorField, load, load_file, validate
from .tensor import PointTensor

__all__ = ["StatStructure", "TensorField", "PointTensor", "load", "load_file", "validate"]
__version__ = "0.1.0"
