"""Tests for boundary sampling and reference solutions.

Oracles: exact surface areas, spherical-harmonic orthogonality under the
sphere cubature, analytic sphere area for the rescaled icosphere, nearest-
neighbor statistics for equispacing quality, and a 4th-order finite-
difference Laplacian for the fundamental solution.
"""

import math
import time

import numpy as np
import pytest

from epwave import geometry as geo
from epwave.specfun import spherical_harmonic


# ---------------------------------------------------------------------------
# Sphere boundary
# ---------------------------------------------------------------------------


def test_sphere_weights_sum_to_area():
    bs = geo.sphere_boundary(777)
    assert bs.weights.sum() == pytest.approx(4.0 * math.pi, rel=1e-14)
    assert np.allclose(np.linalg.norm(bs.nodes, axis=1), 1.0, atol=1e-14)


def test_sphere_harmonic_orthogonality():
    bs = geo.sphere_boundary(2000)
    theta = np.arccos(np.clip(bs.nodes[:, 2], -1, 1))
    phi = np.arctan2(bs.nodes[:, 1], bs.nodes[:, 0])
    vals = np.array([spherical_harmonic(3, 2, t, p) for t, p in zip(theta, phi)])
    assert abs(np.sum(bs.weights * vals)) < 1e-3


def test_sphere_construction_fast():
    start = time.perf_counter()
    geo.sphere_boundary(12544)
    assert time.perf_counter() - start < 1.0


# ---------------------------------------------------------------------------
# Cube boundary
# ---------------------------------------------------------------------------


def test_cube_weights_sum_to_area():
    bs = geo.cube_boundary(600)
    assert bs.weights.sum() == pytest.approx(8.0, rel=1e-14)


def test_cube_nodes_on_faces():
    bs = geo.cube_boundary(997)
    assert np.allclose(np.max(np.abs(bs.nodes), axis=1), 1.0 / math.sqrt(3.0),
                       atol=1e-14)


def test_cube_equispacing_quality():
    bs = geo.cube_boundary(600)
    d2 = np.sum((bs.nodes[:, None, :] - bs.nodes[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    nn = np.sqrt(d2.min(axis=1))
    assert nn.std() / nn.mean() < 0.5


def test_cube_minimum_count():
    with pytest.raises(ValueError):
        geo.cube_boundary(5)


# ---------------------------------------------------------------------------
# Meshes
# ---------------------------------------------------------------------------


def test_octahedron_ingest_round_trip(tmp_path):
    verts, faces = geo.make_octahedron()
    path = tmp_path / "oct.off"
    geo.save_off(path, verts, faces)
    dom = geo.mesh_ingest(path)
    assert dom.kind == "mesh"
    assert dom.scale == pytest.approx(1.0)  # vertices already on the sphere
    assert np.max(np.linalg.norm(dom.vertices, axis=1)) == pytest.approx(1.0)


def test_obj_ingest(tmp_path):
    verts, faces = geo.make_octahedron()
    path = tmp_path / "oct.obj"
    with open(path, "w") as fh:
        for v in verts:
            fh.write(f"v {v[0]} {v[1]} {v[2]}\n")
        for f in faces:
            fh.write(f"f {f[0]+1} {f[1]+1} {f[2]+1}\n")
    dom = geo.mesh_ingest(path)
    assert dom.faces.shape == (8, 3)


def test_open_mesh_rejected(tmp_path):
    verts, faces = geo.make_octahedron()
    path = tmp_path / "open.off"
    geo.save_off(path, verts, faces[:-1])  # delete one face
    with pytest.raises(geo.MeshError):
        geo.mesh_ingest(path)


def test_quad_mesh_rejected(tmp_path):
    path = tmp_path / "quad.off"
    path.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(geo.MeshError):
        geo.mesh_ingest(path)


def test_icosphere_area_near_sphere():
    verts, faces = geo.make_icosphere(2)  # 320 faces
    assert faces.shape[0] == 320
    dom = geo.mesh_from_arrays(verts, faces)
    area = geo.triangle_areas(dom.vertices, dom.faces).sum()
    assert abs(area - 4.0 * math.pi) / (4.0 * math.pi) < 0.02


def test_torus_closed_with_euler_zero():
    verts, faces = geo.make_torus()
    dom = geo.mesh_from_arrays(verts, faces)
    assert geo.euler_characteristic(dom.vertices, dom.faces) == 0
    assert geo.euler_characteristic(*geo.make_octahedron()) == 2


def test_rescale_idempotent():
    verts, faces = geo.make_icosphere(1)
    dom1 = geo.mesh_from_arrays(3.7 * verts, faces)
    dom2 = geo.mesh_from_arrays(dom1.vertices, dom1.faces)
    assert np.allclose(dom1.vertices, dom2.vertices)


# ---------------------------------------------------------------------------
# Mesh boundary sampling
# ---------------------------------------------------------------------------


def _flat_square():
    # two right triangles tiling the unit square, closed up by the mirrored
    # pair underneath so the validator accepts it
    verts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                      [0.5, 0.5, -0.2]], dtype=float)
    faces = np.array([[0, 1, 2], [0, 2, 3], [1, 0, 4], [2, 1, 4],
                      [3, 2, 4], [0, 3, 4]])
    return verts, faces


def test_mesh_counts_proportional_to_area():
    # two triangles, one 9x the other: S = 10 -> counts 9 and 1
    areas = np.array([9.0, 1.0])
    counts = geo._apportion(areas, 10)
    assert list(counts) == [9, 1]
    assert list(geo._apportion(np.array([1.0, 1.0]), 8)) == [4, 4]


def test_mesh_boundary_weights_and_density():
    verts, faces = geo.make_icosphere(2)
    dom = geo.mesh_from_arrays(verts, faces)
    bs = geo.mesh_boundary(dom, 5000)
    total_area = geo.triangle_areas(dom.vertices, dom.faces).sum()
    assert len(bs) == 5000
    assert bs.weights.sum() == pytest.approx(total_area, rel=1e-12)
    # per-face density (points per unit area) roughly uniform
    counts = geo._apportion(geo.triangle_areas(dom.vertices, dom.faces), 5000)
    areas = geo.triangle_areas(dom.vertices, dom.faces)
    density = counts / areas
    assert density.std() / density.mean() < 0.3


def test_triangle_pattern_counts():
    for order in (1, 2, 3, 5):
        assert geo._triangle_pattern(order).shape[0] == order * order


# ---------------------------------------------------------------------------
# Fundamental solution
# ---------------------------------------------------------------------------


def test_fundamental_unit_distance():
    src = geo.SourcePoint(location=np.array([0.0, 0.0, 2.0]), offset=1.0)
    val = geo.fundamental_solution(np.array([0.0, 0.0, 1.0]), src, 5.0)
    expected = complex(math.cos(5.0), math.sin(5.0)) / (4.0 * math.pi)
    assert val == pytest.approx(expected, rel=1e-14)


def test_fundamental_modulus():
    src = geo.SourcePoint(location=np.array([1.5, -0.3, 0.2]), offset=0.5)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-0.5, 0.5, (40, 3))
    vals = geo.fundamental_solution(pts, src, 5.0)
    dist = np.linalg.norm(pts - src.location, axis=1)
    assert np.allclose(np.abs(vals), 1.0 / (4.0 * math.pi * dist), rtol=1e-13)


def test_fundamental_helmholtz_fd():
    kappa = 5.0
    src = geo.cube_source(kappa)
    rng = np.random.default_rng(3)
    h = 1e-3
    for _ in range(5):
        x = rng.uniform(-0.4, 0.4, 3)
        lap = 0.0
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = 1.0
            f = lambda p: geo.fundamental_solution(p, src, kappa)
            lap += (-f(x + 2 * h * e) + 16 * f(x + h * e) - 30 * f(x)
                    + 16 * f(x - h * e) - f(x - 2 * h * e)) / (12 * h * h)
        u = geo.fundamental_solution(x, src, kappa)
        assert abs(lap + kappa ** 2 * u) / (kappa ** 2 * abs(u)) < 1e-5


def test_fundamental_smooth_on_boundary():
    kappa = 6.0
    src = geo.ball_source(kappa, 1.0 / 3.0)
    bs = geo.sphere_boundary(10_000)
    vals = geo.fundamental_solution(bs.nodes, src, kappa)
    assert np.all(np.isfinite(vals.view(float)))


def test_fundamental_singularity_guard():
    src = geo.SourcePoint(location=np.array([0.0, 0.0, 2.0]), offset=1.0)
    with pytest.raises(ValueError):
        geo.fundamental_solution(np.array([0.0, 0.0, 2.0]), src, 5.0)


def test_source_presets():
    assert geo.SOURCE_OFFSET_PRESETS["standard"] == pytest.approx(2.0 / 3.0)
    kappa = 5.0
    src = geo.cube_source(kappa)
    lam = 2.0 * math.pi / kappa
    assert src.location[0] - 1.0 / math.sqrt(3.0) == pytest.approx(2.0 * lam / 3.0)


def test_boundary_csv_export(tmp_path):
    bs = geo.sphere_boundary(5)
    path = tmp_path / "bnd.csv"
    geo.write_boundary_csv(path, bs)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,z,w"
    assert len(lines) == 6
    parts = [float(v) for v in lines[1].split(",")]
    assert parts[3] == pytest.approx(4.0 * math.pi / 5.0)
