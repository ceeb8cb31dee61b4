"""T-curvature tensors, derivation operators and pseudosymmetry checks on
(N(k), xi) semi-Riemannian manifolds, with exact second-order metric jets."""

__version__ = "0.1.0"

from .expr import Jet2, eval_jet, parse, to_source  # noqa: E402
from .family import CoeffVector, Preset, build_T, coefficients, ricci_of_T  # noqa: E402
from .geometry import ManifoldSpec, PointFrame, christoffel, frame, riemann  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .tensors import MetricPair, Tensor, contract, lower_index, raise_index, wedge_sigma  # noqa: E402

__all__ = [
    "BACKEND", "CoeffVector", "Jet2", "ManifoldSpec", "MetricPair", "PointFrame", "Preset",
    "Tensor", "build_T", "christoffel", "coefficients", "contract", "eval_jet", "frame",
    "lower_index", "parse", "raise_index", "ricci_of_T", "riemann", "to_source", "wedge_sigma",
]
