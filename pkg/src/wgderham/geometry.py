"""Convex polyhedral elements with oriented faces and edges.

Every face carries an outward unit normal ``n`` and an in-plane orthonormal
pair ``(t1, t2)`` with ``t1 x t2 = n``.  Edges point from the lower to the
higher vertex index.  The boundary loop of each face is counterclockwise when
seen from outside, so walking a face loop gives the induced tangent that is
right-handed with respect to the face normal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

PLANARITY_TOL = 1e-12


class GeometryError(ValueError):
    """Base class for invalid element input."""


class NonPlanarFace(GeometryError):
    pass


class OpenSurface(GeometryError):
    pass


class InwardNormal(GeometryError):
    pass


class EdgeNotOnFace(GeometryError):
    pass


class VertexNotOnEdge(GeometryError):
    pass


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _tangent_frame(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # project the global axis least aligned with n onto the face plane
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n)))] = 1.0
    t1 = axis - np.dot(axis, n) * n
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return t1, t2


def _polygon_area_centroid(pts: np.ndarray, n: np.ndarray) -> tuple[float, np.ndarray]:
    """Area and area centroid of a planar polygon by a fan from vertex 0."""
    area = 0.0
    moment = np.zeros(3)
    for i in range(1, len(pts) - 1):
        a = 0.5 * np.dot(np.cross(pts[i] - pts[0], pts[i + 1] - pts[0]), n)
        area += a
        moment += a * (pts[0] + pts[i] + pts[i + 1]) / 3.0
    return area, moment / area


@dataclass(frozen=True, eq=False)
class PolyElement:
    """A framed convex polyhedron.

    Use :func:`from_vertices_faces` (or the builtin constructors) rather than
    instantiating directly; the constructor functions validate the input and
    derive all frames.
    """

    vertices: np.ndarray
    edges: np.ndarray
    faces: tuple[tuple[int, ...], ...]
    face_normals: np.ndarray
    face_t1: np.ndarray
    face_t2: np.ndarray
    face_centroids: np.ndarray
    face_areas: np.ndarray
    face_edges: tuple[tuple[tuple[int, int], ...], ...]
    edge_tangents: np.ndarray
    edge_lengths: np.ndarray
    edge_midpoints: np.ndarray
    centroid: np.ndarray
    volume: float
    h: float
    name: str = "polyhedron"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def face_frame(self, face_id: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(t1, t2, n)`` for a face."""
        return self.face_t1[face_id], self.face_t2[face_id], self.face_normals[face_id]

    def face_coords(self, face_id: int, points: np.ndarray) -> np.ndarray:
        """In-plane coordinates ``(s1, s2)`` measured from the face centroid."""
        d = np.asarray(points, dtype=float) - self.face_centroids[face_id]
        return np.stack([d @ self.face_t1[face_id], d @ self.face_t2[face_id]], axis=-1)

    def edge_coords(self, edge_id: int, points: np.ndarray) -> np.ndarray:
        """Arc-length coordinate along ``t_e`` measured from the edge midpoint."""
        d = np.asarray(points, dtype=float) - self.edge_midpoints[edge_id]
        return (d @ self.edge_tangents[edge_id])[..., None]

    def edge_faces(self, edge_id: int) -> list[tuple[int, int]]:
        """Faces containing an edge, as ``(face_id, induced sign)`` pairs."""
        return [(f, s) for f, loop in enumerate(self.face_edges) for e, s in loop if e == edge_id]

    def to_dict(self) -> dict:
        return {
            "vertices": [[float(c) for c in v] for v in self.vertices],
            "faces": [list(loop) for loop in self.faces],
        }


def from_vertices_faces(
    vertices: Sequence[Sequence[float]],
    face_loops: Sequence[Sequence[int]],
    name: str = "polyhedron",
) -> PolyElement:
    """Build a framed element from vertex coordinates and face loops.

    Loops must be counterclockwise seen from outside.  Raises
    :class:`NonPlanarFace`, :class:`OpenSurface` or :class:`InwardNormal`.
    """
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) < 4:
        raise GeometryError("vertices must be a list of at least four 3D points")
    loops = tuple(tuple(int(i) for i in loop) for loop in face_loops)
    if len(loops) < 4:
        raise OpenSurface("a closed polyhedron needs at least four faces")
    for loop in loops:
        if len(loop) < 3 or len(set(loop)) != len(loop):
            raise GeometryError(f"invalid face loop {loop}")
        if min(loop) < 0 or max(loop) >= len(verts):
            raise GeometryError(f"face loop {loop} references a missing vertex")

    vmean = verts.mean(axis=0)
    h_est = np.max(np.linalg.norm(verts - vmean, axis=1))

    # directed edge usage: each undirected edge must be walked once each way
    directed: dict[tuple[int, int], int] = {}
    for f, loop in enumerate(loops):
        for a, b in zip(loop, loop[1:] + loop[:1]):
            if (a, b) in directed:
                raise InwardNormal(f"edge {a}->{b} is traversed twice in the same direction")
            directed[(a, b)] = f
    undirected = sorted({(min(a, b), max(a, b)) for a, b in directed})
    for a, b in undirected:
        if (a, b) not in directed or (b, a) not in directed:
            raise OpenSurface(f"edge ({a}, {b}) is not shared by exactly two faces")
    used = {i for loop in loops for i in loop}
    if used != set(range(len(verts))):
        raise GeometryError("every vertex must belong to a face")
    edge_index = {e: i for i, e in enumerate(undirected)}
    edges = np.array(undirected, dtype=int)

    normals, t1s, t2s, fcents, areas, face_edges = [], [], [], [], [], []
    for loop in loops:
        pts = verts[list(loop)]
        # Newell normal: robust for any planar polygon
        nrm = np.zeros(3)
        for p, q in zip(pts, np.roll(pts, -1, axis=0)):
            nrm += np.cross(p, q)
        norm = np.linalg.norm(nrm)
        if norm < 1e-14 * max(h_est, 1.0) ** 2:
            raise GeometryError(f"degenerate face {loop}")
        nrm /= norm
        area, fc = _polygon_area_centroid(pts, nrm)
        dev = np.max(np.abs((pts - fc) @ nrm))
        if dev > PLANARITY_TOL * h_est:
            raise NonPlanarFace(f"face {loop} deviates from its plane by {dev:.3e}")
        # convex polygon: every corner turns the same way as n
        for i in range(len(pts)):
            turn = np.cross(pts[i] - pts[i - 1], pts[(i + 1) % len(pts)] - pts[i]) @ nrm
            if turn <= 0:
                raise InwardNormal(f"face {loop} is not a convex counterclockwise loop")
        t1, t2 = _tangent_frame(nrm)
        signs = []
        for a, b in zip(loop, loop[1:] + loop[:1]):
            signs.append((edge_index[(min(a, b), max(a, b))], 1 if a < b else -1))
        normals.append(nrm)
        t1s.append(t1)
        t2s.append(t2)
        fcents.append(fc)
        areas.append(area)
        face_edges.append(tuple(signs))

    # volume and centroid by a fan of tetrahedra from the vertex mean
    volume = 0.0
    moment = np.zeros(3)
    for loop, fc in zip(loops, fcents):
        pts = verts[list(loop)]
        for i in range(len(pts)):
            a, b = pts[i], pts[(i + 1) % len(pts)]
            v = np.dot(np.cross(a - vmean, b - vmean), fc - vmean) / 6.0
            volume += v
            moment += v * (vmean + a + b + fc) / 4.0
    if volume <= 0:
        raise InwardNormal("face loops are oriented inward")
    centroid = moment / volume

    for f, loop in enumerate(loops):
        if np.dot(normals[f], fcents[f] - centroid) <= 0:
            raise InwardNormal(f"face {loop} has an inward normal")
        others = [i for i in range(len(verts)) if i not in loop]
        if others and np.max((verts[others] - fcents[f]) @ normals[f]) > PLANARITY_TOL * h_est:
            raise InwardNormal(f"element is not convex across face {loop}")

    tang = verts[edges[:, 1]] - verts[edges[:, 0]]
    lengths = np.linalg.norm(tang, axis=1)
    h = float(np.max(np.linalg.norm(verts - centroid, axis=1)))
    return PolyElement(
        vertices=_frozen(verts),
        edges=np.array(edges, copy=True),
        faces=loops,
        face_normals=_frozen(normals),
        face_t1=_frozen(t1s),
        face_t2=_frozen(t2s),
        face_centroids=_frozen(fcents),
        face_areas=_frozen(areas),
        face_edges=tuple(face_edges),
        edge_tangents=_frozen(tang / lengths[:, None]),
        edge_lengths=_frozen(lengths),
        edge_midpoints=_frozen(0.5 * (verts[edges[:, 0]] + verts[edges[:, 1]])),
        centroid=_frozen(centroid),
        volume=float(volume),
        h=h,
        name=name,
    )


def reference_tetrahedron() -> PolyElement:
    verts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    faces = [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)]
    return from_vertices_faces(verts, faces, name="tet")


def unit_cube() -> PolyElement:
    verts = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
             (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    faces = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
             (3, 7, 6, 2), (0, 4, 7, 3), (1, 2, 6, 5)]
    return from_vertices_faces(verts, faces, name="cube")


def triangular_prism() -> PolyElement:
    verts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)]
    faces = [(0, 2, 1), (3, 4, 5), (0, 1, 4, 3), (0, 3, 5, 2), (1, 2, 5, 4)]
    return from_vertices_faces(verts, faces, name="prism")


BUILTIN_ELEMENTS = {
    "tet": reference_tetrahedron,
    "cube": unit_cube,
    "prism": triangular_prism,
}


def induced_sign(element: PolyElement, face_id: int, edge_id: int) -> int:
    """Sign relating the face-induced boundary tangent to ``t_e``."""
    for e, s in element.face_edges[face_id]:
        if e == edge_id:
            return s
    raise EdgeNotOnFace(f"edge {edge_id} is not on face {face_id}")


def induced_boundary_tangent(element: PolyElement, face_id: int, edge_id: int) -> np.ndarray:
    return induced_sign(element, face_id, edge_id) * element.edge_tangents[edge_id]


def endpoint_outward_sign(element: PolyElement, edge_id: int, vertex_id: int) -> int:
    """``t_e . n`` at an edge endpoint: +1 at the head, -1 at the tail."""
    start, end = element.edges[edge_id]
    if vertex_id == end:
        return 1
    if vertex_id == start:
        return -1
    raise VertexNotOnEdge(f"vertex {vertex_id} is not an endpoint of edge {edge_id}")


def parallel_classes(directions: np.ndarray, tol: float = 1e-12) -> list[list[int]]:
    """Group unit vectors that are parallel or antiparallel."""
    classes: list[list[int]] = []
    for i, d in enumerate(directions):
        for cls in classes:
            if abs(abs(np.dot(directions[cls[0]], d)) - 1.0) <= tol:
                cls.append(i)
                break
        else:
            classes.append([i])
    return classes


def element_kind(element: PolyElement) -> str | None:
    """``"tetrahedron"``, ``"cube"`` (any parallelepiped) or ``None``."""
    if element.n_faces == 4 and element.n_vertices == 4:
        return "tetrahedron"
    if element.n_faces == 6 and element.n_edges == 12 and element.n_vertices == 8:
        fc = parallel_classes(element.face_normals)
        ec = parallel_classes(element.edge_tangents)
        if len(fc) == 3 and all(len(c) == 2 for c in fc) and len(ec) == 3 and all(len(c) == 4 for c in ec):
            return "cube"
    return None


def load_element(path: str | Path) -> PolyElement:
    """Read the JSON element format: ``{"vertices": [[x,y,z],...], "faces": [[i,j,k,...],...]}``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
        vertices, faces = data["vertices"], data["faces"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise GeometryError(f"cannot read element file {path}: {exc}") from exc
    return from_vertices_faces(vertices, faces, name=path.stem)


def save_element(element: PolyElement, path: str | Path) -> None:
    Path(path).write_text(json.dumps(element.to_dict(), indent=2) + "\n")


def resolve_element(source: str) -> PolyElement:
    if source in BUILTIN_ELEMENTS:
        return BUILTIN_ELEMENTS[source]()
    return load_element(source)
