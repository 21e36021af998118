"""Finite CAT(0) cube complexes: medians, hyperplane separation and sublinear Morse diagnostics."""

from .complex import (
    ComplexError,
    CubeComplex,
    HalfSpaceSystem,
    UnknownVertexError,
    UnknownWallError,
    dimension,
    distance,
    from_edge_list,
    load,
    loads,
    realize_pocset,
    save,
    validate,
)
from .kappa import ONE, SQRT, LOG2, SublinearFunction, validate_kappa
from .median import ConvexSubset, convex_subset, gate, hull

__version__ = "0.1.0"
