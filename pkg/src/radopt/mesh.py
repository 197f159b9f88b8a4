"""Structured triangulations of rectangles with marked boundary edges."""

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import ConfigError, InvalidArgument

INSULATED = 0
RADIATIVE = 1


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming P1 triangulation.

    Attributes
    ----------
    nodes : (n_nodes, 2) float array
    triangles : (n_tri, 3) int array, counter-clockwise
    edges : (n_bnd, 2) int array of boundary edges
    markers : (n_bnd,) int array, RADIATIVE or INSULATED
    """

    nodes: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    markers: np.ndarray

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def boundary_edges(self):
        return list(zip(map(tuple, self.edges.tolist()), self.markers.tolist()))

    @cached_property
    def element_area(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return _frozen(0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]))

    @cached_property
    def edge_length(self):
        p = self.nodes[self.edges]
        return _frozen(np.hypot(*(p[:, 1] - p[:, 0]).T))

    @cached_property
    def edge_midpoints(self):
        return _frozen(self.nodes[self.edges].mean(axis=1))

    @cached_property
    def centroids(self):
        return _frozen(self.nodes[self.triangles].mean(axis=1))

    @cached_property
    def hat_gradients(self):
        """(n_tri, 3, 2) constant gradients of the three vertex hat functions."""
        p = self.nodes[self.triangles]
        twice_area = 2.0 * self.element_area
        g = np.empty((self.n_triangles, 3, 2))
        for a in range(3):
            b, c = (a + 1) % 3, (a + 2) % 3
            # gradient of hat a is the inward normal of the opposite edge
            g[:, a, 0] = (p[:, b, 1] - p[:, c, 1]) / twice_area
            g[:, a, 1] = (p[:, c, 0] - p[:, b, 0]) / twice_area
        return _frozen(g)

    @cached_property
    def lumped_mass(self):
        """Nodal weights realizing the integral of the P1 interpolant."""
        w = np.zeros(self.n_nodes)
        np.add.at(w, self.triangles.ravel(), np.repeat(self.element_area / 3.0, 3))
        return _frozen(w)

    @cached_property
    def radiative_edges(self):
        return _frozen(self.edges[self.markers == RADIATIVE])

    @cached_property
    def radiative_length(self):
        return _frozen(self.edge_length[self.markers == RADIATIVE])

    @cached_property
    def radiative_nodes(self):
        return _frozen(np.unique(self.radiative_edges))

    @property
    def area(self):
        return float(self.element_area.sum())

    @property
    def bbox(self):
        return self.nodes.min(axis=0), self.nodes.max(axis=0)


def build_rect_mesh(nx, ny, width=1.0, height=1.0):
    """Criss-cross triangulation of ``[0, width] x [0, height]``.

    Every cell is split along one diagonal, alternating direction with the
    parity of the cell index so that the mesh of an even square grid keeps
    the full symmetry group of the square.  All boundary edges start out
    RADIATIVE.
    """
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise InvalidArgument(f"subdivision counts must be positive integers, got {nx}, {ny}")
    if not (width > 0 and height > 0):
        raise InvalidArgument(f"rectangle size must be positive, got {width} x {height}")
    nx, ny = int(nx), int(ny)

    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    n00 = j * (nx + 1) + i
    n10 = n00 + 1
    n01 = n00 + nx + 1
    n11 = n01 + 1
    even = (i + j) % 2 == 0
    # even cells: diagonal n00-n11, odd cells: diagonal n10-n01
    t1 = np.where(even[:, None], np.column_stack([n00, n10, n11]), np.column_stack([n00, n10, n01]))
    t2 = np.where(even[:, None], np.column_stack([n00, n11, n01]), np.column_stack([n10, n11, n01]))
    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    triangles[0::2] = t1
    triangles[1::2] = t2

    b = []
    b += [(k, k + 1) for k in range(nx)]  # bottom, left to right
    b += [(k * (nx + 1) + nx, (k + 1) * (nx + 1) + nx) for k in range(ny)]  # right
    top = ny * (nx + 1)
    b += [(top + k + 1, top + k) for k in reversed(range(nx))]  # top
    b += [((k + 1) * (nx + 1), k * (nx + 1)) for k in reversed(range(ny))]  # left
    edges = np.array(b, dtype=np.int64)
    markers = np.full(len(edges), RADIATIVE, dtype=np.int8)
    return Mesh(_frozen(nodes), _frozen(triangles), _frozen(edges), _frozen(markers))


def side_predicate(*sides, tol=1e-12):
    """Predicate selecting whole sides of the mesh bounding box.

    ``sides`` are any of ``"left"``, ``"right"``, ``"bottom"``, ``"top"``
    or ``"all"``.  The returned callable works on midpoints and needs the
    mesh bounding box, so it takes ``(midpoints, lo, hi)``.
    """
    valid = {"left", "right", "bottom", "top", "all"}
    bad = set(sides) - valid
    if bad:
        raise ConfigError(f"unknown boundary side(s): {sorted(bad)}")

    def pred(mid, lo, hi):
        sel = np.zeros(len(mid), dtype=bool)
        for s in sides:
            if s == "all":
                sel[:] = True
            elif s == "left":
                sel |= np.abs(mid[:, 0] - lo[0]) < tol
            elif s == "right":
                sel |= np.abs(mid[:, 0] - hi[0]) < tol
            elif s == "bottom":
                sel |= np.abs(mid[:, 1] - lo[1]) < tol
            elif s == "top":
                sel |= np.abs(mid[:, 1] - hi[1]) < tol
        return sel

    return pred


def mark_boundary(mesh, predicate):
    """Return a copy of ``mesh`` with the selected edges RADIATIVE, the rest INSULATED.

    ``predicate`` is either a side name / list of side names, or a callable.
    A one-argument callable gets the (n_bnd, 2) array of edge midpoints;
    callables made by :func:`side_predicate` also get the bounding box.
    """
    if isinstance(predicate, str):
        predicate = side_predicate(*[s.strip() for s in predicate.split(",") if s.strip()])
    elif isinstance(predicate, (list, tuple)):
        predicate = side_predicate(*predicate)
    mid = mesh.edge_midpoints
    try:
        sel = predicate(mid, *mesh.bbox)
    except TypeError:
        sel = predicate(mid)
    sel = np.asarray(sel, dtype=bool)
    if sel.shape != (len(mesh.edges),):
        raise InvalidArgument("predicate must return one boolean per boundary edge")
    if not sel.any():
        raise ConfigError("no radiative boundary edge selected; the pure-Neumann problem is ill-posed")
    markers = np.where(sel, RADIATIVE, INSULATED).astype(np.int8)
    return replace(mesh, markers=_frozen(markers))


def element_indicator(mesh, region):
    """Boolean per triangle: centroid lies in ``region`` (callable on (n, 2) points)."""
    return np.asarray(region(mesh.centroids), dtype=bool)
