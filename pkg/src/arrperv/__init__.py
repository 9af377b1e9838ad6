"""Exact computations with face algebras of real hyperplane arrangements."""

from .arrangement import Arrangement, FacePoset, Flat, enumerate_faces, flats_and_restriction, make_flat
from .linalg import Matrix, Subspace
from .modules import DoubleRep, RModule, collapse, expand, validate_module

__all__ = [
    "Arrangement",
    "DoubleRep",
    "FacePoset",
    "Flat",
    "Matrix",
    "RModule",
    "Subspace",
    "collapse",
    "enumerate_faces",
    "expand",
    "flats_and_restriction",
    "make_flat",
    "validate_module",
]
