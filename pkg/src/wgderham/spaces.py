"""The weak Galerkin spaces of both complexes and their degree-of-freedom layout.

Slot 1 holds ``{v0, v_f, v_e, v_n}``, slot 2 ``{u0, u_f, u_e}`` with
tangential face data in ``(t1, t2)`` and edge data along ``t_e``, slot 3
``{w0, w_f n_f}`` and slot 4 a single volume polynomial.  Coefficient blocks
are laid out as volume, faces (element order), edges, vertices; inside a
block the components are stored one after another.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import PolyElement, element_kind, parallel_classes
from .polybasis import dim_pk


class Family(enum.IntEnum):
    EQUAL = 1
    DESCENDING = 2


class DegreeOutOfRange(ValueError):
    pass


class UnsupportedElement(ValueError):
    pass


class DegreeNotZero(ValueError):
    pass


# (volume, face, edge) component counts per slot
_COMPONENTS = {1: (1, 1, 1), 2: (3, 2, 1), 3: (3, 1, 0), 4: (1, 0, 0)}
# degree offsets below k for (volume, face, edge) in the descending family
_DESCENDING_SHIFT = {1: (0, 1, 2), 2: (1, 2, 3), 3: (2, 3, None), 4: (3, None, None)}


def min_degree(family: Family) -> int:
    return 3 if Family(family) is Family.DESCENDING else 0


@dataclass(frozen=True)
class SpaceDescriptor:
    family: Family
    slot: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.slot not in _COMPONENTS:
            raise ValueError(f"slot must be 1..4, got {self.slot}")
        if self.k < min_degree(self.family):
            raise DegreeOutOfRange(
                f"family {int(self.family)} requires k >= {min_degree(self.family)}, got k={self.k}"
            )

    @property
    def components(self) -> tuple[int, int, int]:
        return _COMPONENTS[self.slot]

    @property
    def has_vertices(self) -> bool:
        return self.slot == 1

    @property
    def degrees(self) -> tuple[int | None, int | None, int | None]:
        """Polynomial degrees on (volume, face, edge); ``None`` where absent."""
        if self.family is Family.EQUAL:
            return tuple(self.k if c else None for c in self.components)
        return tuple(None if s is None else self.k - s for s in _DESCENDING_SHIFT[self.slot])

    def __str__(self) -> str:
        return f"{self.family.name.lower()}[slot {self.slot}, k={self.k}]"


@dataclass(frozen=True)
class DofLayout:
    """Index ranges of every entity block inside a coefficient vector."""

    volume: slice
    faces: tuple[slice, ...]
    edges: tuple[slice, ...]
    vertices: slice
    total: int

    def blocks(self) -> list[tuple[str, int, slice]]:
        out = [("volume", 0, self.volume)]
        out += [("face", i, s) for i, s in enumerate(self.faces)]
        out += [("edge", i, s) for i, s in enumerate(self.edges)]
        if self.vertices.stop > self.vertices.start:
            out.append(("vertex", 0, self.vertices))
        return [b for b in out if b[2].stop > b[2].start]


def entity_sizes(desc: SpaceDescriptor) -> tuple[int, int, int]:
    """Coefficients per volume, per face and per edge."""
    out = []
    for d, comp, deg in zip((3, 2, 1), desc.components, desc.degrees):
        out.append(comp * dim_pk(d, deg) if comp else 0)
    return tuple(out)


def dof_layout(desc: SpaceDescriptor, element: PolyElement) -> DofLayout:
    nv, nf, ne = entity_sizes(desc)
    pos = nv
    faces = []
    for _ in range(element.n_faces):
        faces.append(slice(pos, pos + nf))
        pos += nf
    edges = []
    for _ in range(element.n_edges):
        edges.append(slice(pos, pos + ne))
        pos += ne
    nvert = element.n_vertices if desc.has_vertices else 0
    vertices = slice(pos, pos + nvert)
    return DofLayout(slice(0, nv), tuple(faces), tuple(edges), vertices, pos + nvert)


def space_dim(desc: SpaceDescriptor, element: PolyElement) -> int:
    return dof_layout(desc, element).total


@dataclass(frozen=True, eq=False)
class WgCoefficients:
    """A weak function: one coefficient vector split into entity blocks."""

    descriptor: SpaceDescriptor
    layout: DofLayout
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.layout.total,):
            raise ValueError(f"expected {self.layout.total} coefficients, got {self.values.shape}")

    @classmethod
    def zeros(cls, desc: SpaceDescriptor, element: PolyElement) -> "WgCoefficients":
        layout = dof_layout(desc, element)
        return cls(desc, layout, np.zeros(layout.total))

    def _split(self, s: slice, comps: int) -> np.ndarray:
        return self.values[s].reshape(comps, -1)

    def volume(self) -> np.ndarray:
        """Volume block as ``(components, dim P)``."""
        return self._split(self.layout.volume, self.descriptor.components[0])

    def face(self, face_id: int) -> np.ndarray:
        return self._split(self.layout.faces[face_id], self.descriptor.components[1])

    def edge(self, edge_id: int) -> np.ndarray:
        return self._split(self.layout.edges[edge_id], self.descriptor.components[2])

    def vertex_values(self) -> np.ndarray:
        return self.values[self.layout.vertices]


def alternating_dimension_sum(element: PolyElement, family: Family, k: int, dim_slot0: int) -> int:
    dims = [space_dim(SpaceDescriptor(family, s, k), element) for s in (1, 2, 3, 4)]
    return dim_slot0 - dims[0] + dims[1] - dims[2] + dims[3]


def _constant_pattern(element: PolyElement, kind: str) -> list[dict]:
    """Entity groups that share one constant in the inclusion map."""
    if kind == "tetrahedron":
        return [
            {"volume": True},
            {"faces": list(range(element.n_faces))},
            {"edges": list(range(element.n_edges))},
            {"vertices": True},
        ]
    groups = [{"volume": True}]
    groups += [{"faces": c} for c in parallel_classes(element.face_normals)]
    groups += [{"edges": c} for c in parallel_classes(element.edge_tangents)]
    groups.append({"vertices": True})
    return groups


def inclusion_matrix(element: PolyElement, family: Family = Family.EQUAL, k: int = 0) -> np.ndarray:
    """Columns are the inclusion images of the unit constant vectors.

    Four constants on a tetrahedron (volume, faces, edges, vertices); eight on
    a cube (volume, three parallel-face classes, three parallel-edge classes,
    vertices).
    """
    if k != 0:
        raise DegreeNotZero("the inclusion map is defined for k = 0 only")
    desc = SpaceDescriptor(family, 1, k)
    kind = element_kind(element)
    if kind is None:
        raise UnsupportedElement("the inclusion map is defined for tetrahedra and cubes only")
    layout = dof_layout(desc, element)
    groups = _constant_pattern(element, kind)
    mat = np.zeros((layout.total, len(groups)))
    for j, g in enumerate(groups):
        if g.get("volume"):
            mat[layout.volume.start, j] = 1.0
        for f in g.get("faces", ()):
            mat[layout.faces[f].start, j] = 1.0
        for e in g.get("edges", ()):
            mat[layout.edges[e].start, j] = 1.0
        if g.get("vertices"):
            mat[layout.vertices, j] = 1.0
    return mat


def inclusion_iw(element: PolyElement, constants, family: Family = Family.EQUAL, k: int = 0) -> WgCoefficients:
    """Slot-1 weak function carrying the given constants (k = 0 only)."""
    mat = inclusion_matrix(element, family, k)
    constants = np.asarray(constants, dtype=float)
    if constants.shape != (mat.shape[1],):
        raise ValueError(f"expected {mat.shape[1]} constants, got {constants.shape}")
    desc = SpaceDescriptor(family, 1, k)
    return WgCoefficients(desc, dof_layout(desc, element), mat @ constants)
