"""P1 finite-element operators and a Jacobi-preconditioned CG solver.

Matrices are ``scipy.sparse.csr_matrix`` objects sharing one sparsity
pattern per mesh (the edge graph of the triangulation), so stiffness and
boundary-mass contributions can be summed entry by entry.  Element fields
are ``(n_tri,)`` arrays, nodal fields ``(n_nodes,)`` arrays.
"""

import weakref

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument, InvalidOperator, NoConvergence

# two-point Gauss rule on the reference edge [0, 1]
GAUSS_XI = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
GAUSS_W = np.array([0.5, 0.5])
_SHAPE = np.column_stack([1.0 - GAUSS_XI, GAUSS_XI])  # (q, local node)

_patterns = weakref.WeakKeyDictionary()


class _Pattern:
    """CSR pattern of the node graph plus scatter maps for local matrices."""

    def __init__(self, mesh):
        n = mesh.n_nodes
        t = mesh.triangles
        rows = np.repeat(t, 3, axis=1).ravel()
        cols = np.tile(t, (1, 3)).ravel()
        keys = rows * n + cols
        uniq, self.elem_inv = np.unique(keys, return_inverse=True)
        self.n = n
        self.nnz = len(uniq)
        self.indices = (uniq % n).astype(np.int32)
        r = uniq // n
        self.indptr = np.searchsorted(r, np.arange(n + 1)).astype(np.int32)
        self.uniq = uniq
        self.diag = np.searchsorted(uniq, np.arange(n) * n + np.arange(n))
        e = mesh.radiative_edges
        if len(e):
            brow = np.repeat(e, 2, axis=1).ravel()
            bcol = np.tile(e, (1, 2)).ravel()
            self.bnd_inv = np.searchsorted(uniq, brow * n + bcol)
        else:
            self.bnd_inv = np.zeros(0, dtype=np.int64)
        g = mesh.hat_gradients
        # unit-coefficient local stiffness, (n_tri, 3, 3)
        self.unit_local = np.einsum("tad,tbd->tab", g, g) * mesh.element_area[:, None, None]

    def matrix(self, data):
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def scatter_elements(self, local):
        return np.bincount(self.elem_inv, weights=local.ravel(), minlength=self.nnz)

    def scatter_boundary(self, local):
        return np.bincount(self.bnd_inv, weights=local.ravel(), minlength=self.nnz)


def pattern(mesh):
    p = _patterns.get(mesh)
    if p is None:
        p = _Pattern(mesh)
        _patterns[mesh] = p
    return p


def _element_array(mesh, values, name):
    v = np.asarray(values, dtype=float)
    if v.ndim == 0:
        v = np.full(mesh.n_triangles, float(v))
    if v.shape != (mesh.n_triangles,):
        raise InvalidArgument(f"{name} must have one value per triangle")
    return v


def stiffness_data(mesh, coef):
    """CSR data of the stiffness matrix for an arbitrary (signed) element coefficient."""
    coef = _element_array(mesh, coef, "coefficient")
    p = pattern(mesh)
    return p.scatter_elements(coef[:, None, None] * p.unit_local)


def assemble_stiffness(mesh, kappa):
    """Stiffness matrix of ``a(u, v) = sum_T kappa_T int_T grad u . grad v``."""
    kappa = _element_array(mesh, kappa, "kappa")
    if not np.all(kappa > 0):
        raise InvalidArgument("stiffness coefficient must be positive")
    return pattern(mesh).matrix(stiffness_data(mesh, kappa))


def boundary_values(mesh, u):
    """Values of the nodal field ``u`` at the Gauss points of radiative edges, (n_rad, 2)."""
    u = np.asarray(u, dtype=float)
    e = mesh.radiative_edges
    return u[e] @ _SHAPE.T


def _gauss_weight(mesh, weight):
    w = np.asarray(weight, dtype=float)
    n_rad = len(mesh.radiative_edges)
    if w.ndim == 0:
        return np.full((n_rad, 2), float(w))
    if w.shape == (mesh.n_nodes,):
        return boundary_values(mesh, w)
    if w.shape == (n_rad, 2):
        return w
    raise InvalidArgument("boundary weight must be nodal or given at radiative Gauss points")


def boundary_mass_data(mesh, weight):
    w = _gauss_weight(mesh, weight)
    if np.any(w < 0):
        raise InvalidArgument("boundary weight must be nonnegative")
    L = mesh.radiative_length
    # local[e, a, b] = sum_q L/2 w_q N_a(q) N_b(q)
    nn = np.einsum("qa,qb->qab", _SHAPE, _SHAPE)
    local = np.einsum("eq,qab->eab", w * (L[:, None] * GAUSS_W), nn)
    return pattern(mesh).scatter_boundary(local)


def assemble_boundary_mass(mesh, weight):
    """Matrix of ``int_{Gamma_R} w u phi`` (two-point Gauss per edge).

    ``weight`` may be a scalar, a nodal field (interpolated linearly along
    each edge) or an array of values at the radiative Gauss points.
    """
    return pattern(mesh).matrix(boundary_mass_data(mesh, weight))


def assemble_boundary_load(mesh, g):
    """Vector of ``int_{Gamma_R} g phi_i``; ``g`` as for :func:`assemble_boundary_mass`."""
    g = _gauss_weight(mesh, g)
    L = mesh.radiative_length
    local = (g * (L[:, None] * GAUSS_W)) @ _SHAPE
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.radiative_edges.ravel(), local.ravel())
    return out


def boundary_integral(mesh, g):
    """``int_{Gamma_R} g`` with ``g`` at the radiative Gauss points (or nodal)."""
    g = _gauss_weight(mesh, g)
    return float(np.sum(g @ GAUSS_W * mesh.radiative_length))


def assemble_load(mesh, f):
    """Exact P1 load vector for a piecewise-constant source."""
    f = _element_array(mesh, f, "source")
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.triangles.ravel(), np.repeat(f * mesh.element_area / 3.0, 3))
    return out


def assemble_weighted_load(mesh, s, g):
    """``int s g_h phi_i`` for element-constant ``s`` and nodal ``g`` (exact)."""
    s = _element_array(mesh, s, "element weight")
    g = np.asarray(g, dtype=float)
    gt = g[mesh.triangles]
    local = (gt + gt.sum(axis=1, keepdims=True)) * (s * mesh.element_area / 12.0)[:, None]
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.triangles.ravel(), local.ravel())
    return out


def gradients(mesh, u):
    """Per-triangle gradient of the P1 field ``u``, (n_tri, 2).

    Built from vertex differences so that nearly constant fields keep
    their small gradients accurately.
    """
    u = np.asarray(u, dtype=float)
    ut = u[mesh.triangles]
    g = mesh.hat_gradients
    return (ut[:, 1] - ut[:, 0])[:, None] * g[:, 1] + (ut[:, 2] - ut[:, 0])[:, None] * g[:, 2]


def apply_stiffness(mesh, kappa, u):
    """Matrix-free ``K(kappa) @ u`` built from :func:`gradients`.

    Agrees with the assembled matrix in exact arithmetic but avoids the
    cancellation of the matrix-vector product on nearly constant fields;
    used for defect computations.
    """
    kappa = _element_array(mesh, kappa, "kappa")
    flux = gradients(mesh, u) * (kappa * mesh.element_area)[:, None]
    local = np.einsum("tad,td->ta", mesh.hat_gradients, flux)
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.triangles.ravel(), local.ravel())
    return out


def element_mean(mesh, u):
    return np.asarray(u, dtype=float)[mesh.triangles].mean(axis=1)


def solve_spd(A, b, tol=1e-10, x0=None, maxiter=None, atol=0.0):
    """Jacobi-preconditioned conjugate gradients.

    Stops when ``||A x - b||_2 <= max(tol * ||b||_2, atol, floor)`` where
    ``floor = 100 eps || |A| |x| ||_2`` is the residual attainable in double
    precision.  Raises
    :class:`InvalidOperator` on a nonpositive diagonal or nonpositive
    curvature and :class:`NoConvergence` (carrying the last iterate) when
    the iteration cap, ``10 * n`` by default, is reached.
    """
    b = np.asarray(b, dtype=float)
    n = len(b)
    if maxiter is None:
        maxiter = 10 * n
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n)
    A = sp.csr_matrix(A) if not sp.issparse(A) else A
    d = A.diagonal()
    if np.any(d <= 0):
        raise InvalidOperator("matrix has a nonpositive diagonal entry")
    dinv = 1.0 / d
    absA = abs(A)
    floor_coef = 4.0 * np.finfo(float).eps
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    target = max(tol * bnorm, atol)
    rnorm = np.linalg.norm(r)
    if rnorm <= target:
        return x
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for _ in range(maxiter):
        Ap = A @ p
        curv = p @ Ap
        if curv <= 0:
            raise InvalidOperator("nonpositive curvature encountered in CG; matrix is not positive definite")
        a = rz / curv
        x += a * p
        r -= a * Ap
        rnorm = np.linalg.norm(r)
        if rnorm <= target or rnorm <= floor_coef * np.linalg.norm(absA @ np.abs(x)):
            # guard against drift of the recursive residual
            rtrue = np.linalg.norm(b - A @ x)
            if rtrue <= max(target, floor_coef * np.linalg.norm(absA @ np.abs(x))):
                return x
            r = b - A @ x
            z = dinv * r
            p = z.copy()
            rz = r @ z
            continue
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NoConvergence(
        f"CG reached {maxiter} iterations, relative residual {rnorm / bnorm:.3e}",
        result=x,
        residual=rnorm / bnorm,
    )
