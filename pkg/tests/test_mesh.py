import numpy as np
import pytest
from hypothesis import given, strategies as st

from radopt.errors import ConfigError, InvalidArgument
from radopt.mesh import INSULATED, RADIATIVE, build_rect_mesh, mark_boundary


def test_single_cell():
    m = build_rect_mesh(1, 1, 1, 1)
    assert m.n_nodes == 4 and m.n_triangles == 2
    assert m.area == pytest.approx(1.0, abs=1e-15)


def test_counts_64():
    m = build_rect_mesh(64, 64, 1, 1)
    assert m.n_triangles == 8192 and m.n_nodes == 4225
    assert abs(m.area - 1.0) <= 1e-12


def test_uniform_area_16():
    m = build_rect_mesh(16, 16, 1, 1)
    assert np.all(m.element_area == 1 / 512)


def test_all_edges_radiative_by_default():
    m = build_rect_mesh(3, 2)
    assert len(m.edges) == 10
    assert np.all(m.markers == RADIATIVE)


@pytest.mark.parametrize("args", [(0, 1, 1, 1), (1, -2, 1, 1), (2, 2, 0, 1), (2, 2, 1, -1), (1.5, 2, 1, 1)])
def test_invalid_arguments(args):
    with pytest.raises(InvalidArgument):
        build_rect_mesh(*args)


def test_mark_all_is_identity():
    m = build_rect_mesh(4, 4)
    mm = mark_boundary(m, "all")
    assert np.array_equal(mm.markers, m.markers)


def test_mark_top_counts():
    m = mark_boundary(build_rect_mesh(4, 4), "top")
    assert np.sum(m.markers == RADIATIVE) == 4
    assert np.sum(m.markers == INSULATED) == 12
    assert m.radiative_length.sum() == pytest.approx(1.0)


def test_mark_callable_and_list():
    m = build_rect_mesh(4, 4)
    a = mark_boundary(m, lambda mid: mid[:, 0] < 1e-12)
    b = mark_boundary(m, ["left"])
    assert np.array_equal(a.markers, b.markers)


def test_mark_empty_is_config_error():
    with pytest.raises(ConfigError):
        mark_boundary(build_rect_mesh(4, 4), lambda mid: np.zeros(len(mid), dtype=bool))


def test_deterministic():
    a, b = build_rect_mesh(7, 5, 2.0, 1.5), build_rect_mesh(7, 5, 2.0, 1.5)
    for name in ("nodes", "triangles", "edges", "markers"):
        assert getattr(a, name).tobytes() == getattr(b, name).tobytes()


def test_arrays_read_only():
    m = build_rect_mesh(2, 2)
    with pytest.raises(ValueError):
        m.nodes[0, 0] = 5.0


def test_square_symmetry_group():
    # the criss-cross mesh of an even grid maps onto itself under x -> 1-x and x <-> y
    m = build_rect_mesh(6, 6)
    key = lambda tri: sorted(map(tuple, np.round(tri, 12).tolist()))
    cents = {tuple(key(m.nodes[t])) for t in m.triangles}
    for f in (lambda p: np.column_stack([1 - p[:, 0], p[:, 1]]), lambda p: p[:, ::-1]):
        img = {tuple(key(f(m.nodes[t]))) for t in m.triangles}
        assert img == cents


@given(st.integers(1, 12), st.integers(1, 12), st.floats(0.1, 10), st.floats(0.1, 10))
def test_measures_and_conformity(nx, ny, w, h):
    m = build_rect_mesh(nx, ny, w, h)
    assert np.all(m.element_area > 0)
    assert abs(m.area - w * h) <= 1e-12 * w * h
    assert abs(m.edge_length.sum() - 2 * (w + h)) <= 1e-12 * (w + h)
    assert m.triangles.min() >= 0 and m.triangles.max() < m.n_nodes
    # interior edges shared by two triangles, boundary edges by one
    t = m.triangles
    e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    assert set(counts.tolist()) <= {1, 2}
    assert np.sum(counts == 1) == len(m.edges)
    bnd = {tuple(sorted(x)) for x in m.edges.tolist()}
    uniq, c = np.unique(e, axis=0, return_counts=True)
    assert bnd == {tuple(x) for x in uniq[c == 1].tolist()}
