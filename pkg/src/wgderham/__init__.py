"""Weak Galerkin de Rham complexes on a single polyhedral element."""

__version__ = "0.1.0"

from .geometry import BUILTIN_ELEMENTS, PolyElement, from_vertices_faces, resolve_element
from .spaces import Family, SpaceDescriptor, WgCoefficients, dof_layout, space_dim
from .weakops import composite_curl, composite_divergence, composite_gradient
from .verify import exactness_report, verify_case

__all__ = [
    "BUILTIN_ELEMENTS",
    "Family",
    "PolyElement",
    "SpaceDescriptor",
    "WgCoefficients",
    "composite_curl",
    "composite_divergence",
    "composite_gradient",
    "dof_layout",
    "exactness_report",
    "from_vertices_faces",
    "resolve_element",
    "space_dim",
    "verify_case",
]
