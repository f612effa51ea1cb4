"""Boundary node generation and reference solutions.

Domains are the unit ball, the cube inscribed in the unit sphere (side
2/sqrt(3), surface area 8), and closed triangulated surfaces ingested from
OFF or OBJ files (triangles only).  Meshes are validated (every edge shared
by exactly two consistently oriented faces) and uniformly rescaled so the
unit sphere circumscribes them.

Boundary samplings carry positive cubature weights summing to the surface
area: Fibonacci nodes with 4 pi / S on the sphere, per-face tensor grids
with area / S on the cube, and per-triangle barycentric refinements with
area-proportional counts on meshes.

The reconstruction target for non-modal experiments is the Helmholtz
fundamental solution x -> e^{i k |x - s|} / (4 pi |x - s|) with the source s
outside the domain; the offsets used by the experiments (2 lambda/3,
lambda/3, lambda) are exposed as presets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .sampling import sphere_fibonacci
from .solver import BoundarySampling
from .waves import check_kappa


class MeshError(ValueError):
    """Raised for unparsable, non-triangular, or non-closed surface meshes."""


SOURCE_OFFSET_PRESETS = {
    "near": 1.0 / 3.0,     # dist(s, domain) = lambda/3
    "standard": 2.0 / 3.0,  # 2 lambda/3
    "far": 1.0,             # ~lambda
}


# ---------------------------------------------------------------------------
# Sphere and cube boundaries
# ---------------------------------------------------------------------------


def sphere_boundary(count: int) -> BoundarySampling:
    """Fibonacci nodes on the unit sphere with equal weights 4 pi / S."""
    ang = sphere_fibonacci(count)
    s1 = np.sin(ang[:, 0])
    nodes = np.stack([s1 * np.cos(ang[:, 1]), s1 * np.sin(ang[:, 1]),
                      np.cos(ang[:, 0])], axis=1)
    return BoundarySampling(nodes=nodes, weights=np.full(count, 4.0 * math.pi / count))


def _face_grid(count: int) -> np.ndarray:
    """`count` near-equispaced points on the unit square, half-cell offset."""
    cols = max(1, math.ceil(math.sqrt(count)))
    rows = math.ceil(count / cols)
    u = (np.arange(cols) + 0.5) / cols
    v = (np.arange(rows) + 0.5) / rows
    grid = np.stack(np.meshgrid(u, v, indexing="ij"), axis=-1).reshape(-1, 2)
    return grid[:count]


def cube_boundary(count: int) -> BoundarySampling:
    """Near-equispaced nodes on the cube inscribed in the unit sphere.

    Side 2/sqrt(3); equal weights area / S with area = 8.
    """
    if count < 6:
        raise ValueError("cube boundary needs at least one node per face")
    half = 1.0 / math.sqrt(3.0)
    per_face = [count // 6 + (1 if f < count % 6 else 0) for f in range(6)]
    nodes = []
    for face, n_f in enumerate(per_face):
        grid = (2.0 * _face_grid(n_f) - 1.0) * half
        axis, sign = divmod(face, 2)
        pts = np.empty((n_f, 3))
        pts[:, axis] = half if sign == 0 else -half
        pts[:, (axis + 1) % 3] = grid[:, 0]
        pts[:, (axis + 2) % 3] = grid[:, 1]
        nodes.append(pts)
    nodes = np.concatenate(nodes, axis=0)
    return BoundarySampling(nodes=nodes, weights=np.full(count, 8.0 / count))


# ---------------------------------------------------------------------------
# Triangle meshes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    """A reconstruction domain: the ball, the inscribed cube, or a mesh."""

    kind: str                      # "ball" | "cube" | "mesh"
    vertices: np.ndarray | None = None
    faces: np.ndarray | None = None
    scale: float = 1.0             # factor applied at ingestion

    def __post_init__(self) -> None:
        if self.kind not in ("ball", "cube", "mesh"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "mesh" and (self.vertices is None or self.faces is None):
            raise ValueError("mesh domain requires vertices and faces")


def triangle_areas(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    a = vertices[faces[:, 1]] - vertices[faces[:, 0]]
    b = vertices[faces[:, 2]] - vertices[faces[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(a, b), axis=1)


def _validate_closed(vertices: np.ndarray, faces: np.ndarray) -> None:
    directed = {}
    for f, (i, j, k) in enumerate(faces):
        for a, b in ((i, j), (j, k), (k, i)):
            if a == b:
                raise MeshError(f"face {f} is degenerate")
            if (a, b) in directed:
                raise MeshError("inconsistent orientation: duplicated directed edge")
            directed[(a, b)] = f
    boundary = [e for e in directed if (e[1], e[0]) not in directed]
    if boundary:
        raise MeshError(f"surface is not closed: {len(boundary)} boundary edges")


def euler_characteristic(vertices: np.ndarray, faces: np.ndarray) -> int:
    edges = {tuple(sorted(e)) for f in faces for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))}
    return vertices.shape[0] - len(edges) + faces.shape[0]


def _parse_off(text: str, path) -> tuple[np.ndarray, np.ndarray]:
    tokens = []
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            tokens.extend(body.split())
    if not tokens or tokens[0] != "OFF":
        raise MeshError(f"{path}: missing OFF header")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4  # skip edge count
        verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
        pos += 3 * nv
        faces = []
        for _ in range(nf):
            cnt = int(tokens[pos])
            if cnt != 3:
                raise MeshError(f"{path}: only triangle faces are supported")
            faces.append([int(t) for t in tokens[pos + 1:pos + 4]])
            pos += 1 + cnt
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: malformed OFF file") from exc
    return verts, np.asarray(faces, dtype=int)


def _parse_obj(text: str, path) -> tuple[np.ndarray, np.ndarray]:
    verts, faces = [], []
    for line_no, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if parts[0] == "v":
            if len(parts) < 4:
                raise MeshError(f"{path}:{line_no}: malformed vertex")
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            if len(parts) != 4:
                raise MeshError(f"{path}:{line_no}: only triangle faces are supported")
            try:
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
            except ValueError as exc:
                raise MeshError(f"{path}:{line_no}: malformed face") from exc
    if not verts or not faces:
        raise MeshError(f"{path}: no usable vertices/faces")
    return np.asarray(verts, dtype=float), np.asarray(faces, dtype=int)


def mesh_from_arrays(vertices: np.ndarray, faces: np.ndarray) -> Domain:
    """Validate and rescale a triangle mesh so the unit sphere circumscribes it."""
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=int)
    if np.any(faces < 0) or np.any(faces >= vertices.shape[0]):
        raise MeshError("face index out of range")
    _validate_closed(vertices, faces)
    radius = float(np.max(np.linalg.norm(vertices, axis=1)))
    if radius <= 0.0:
        raise MeshError("degenerate mesh: zero circumradius")
    return Domain(kind="mesh", vertices=vertices / radius, faces=faces,
                  scale=1.0 / radius)


def mesh_ingest(path: str | Path) -> Domain:
    """Load an OFF or OBJ triangle mesh as a validated, rescaled domain."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".obj":
        verts, faces = _parse_obj(text, path)
    else:
        verts, faces = _parse_off(text, path)
    return mesh_from_arrays(verts, faces)


def save_off(path: str | Path, vertices: np.ndarray, faces: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(vertices)} {len(faces)} 0\n")
        for v in vertices:
            fh.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in faces:
            fh.write(f"3 {int(f[0])} {int(f[1])} {int(f[2])}\n")


# synthetic closed meshes used by the tests and shipped as drop-in substitutes
# for the paper-style external geometries


def make_octahedron() -> tuple[np.ndarray, np.ndarray]:
    verts = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0],
                      [0, 0, 1], [0, 0, -1]], dtype=float)
    faces = np.array([[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
                      [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]])
    return verts, faces


def make_icosphere(subdivisions: int = 2) -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ])
    verts = list(verts)
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            mid = verts[i] + verts[j]
            verts.append(mid / np.linalg.norm(mid))
            cache[key] = len(verts) - 1
        return cache[key]

    for _ in range(subdivisions):
        new_faces = []
        for i, j, k in faces:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            new_faces += [[i, a, c], [j, b, a], [k, c, b], [a, b, c]]
        faces = np.asarray(new_faces)
    return np.asarray(verts), faces


def make_torus(n_major: int = 24, n_minor: int = 12, major: float = 0.7,
               minor: float = 0.25) -> tuple[np.ndarray, np.ndarray]:
    verts = []
    for i in range(n_major):
        u = 2.0 * math.pi * i / n_major
        for j in range(n_minor):
            v = 2.0 * math.pi * j / n_minor
            r = major + minor * math.cos(v)
            verts.append([r * math.cos(u), r * math.sin(u), minor * math.sin(v)])
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [[a, b, c], [a, c, d]]
    return np.asarray(verts, dtype=float), np.asarray(faces)


# ---------------------------------------------------------------------------
# Mesh boundary sampling
# ---------------------------------------------------------------------------


def _apportion(areas: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder apportionment of `total` points over the faces."""
    quota = areas / areas.sum() * total
    counts = np.floor(quota).astype(int)
    short = total - counts.sum()
    if short > 0:
        order = np.argsort(quota - counts)[::-1]
        counts[order[:short]] += 1
    return counts


def _triangle_pattern(order: int) -> np.ndarray:
    """Centroids of the order^2 congruent subtriangles, barycentric (u, v)."""
    pts = []
    for i in range(order):
        for j in range(order - i):
            pts.append(((3 * i + 1) / (3.0 * order), (3 * j + 1) / (3.0 * order)))
            if j < order - i - 1:
                pts.append(((3 * i + 2) / (3.0 * order), (3 * j + 2) / (3.0 * order)))
    return np.asarray(pts)


def _thin_farthest(pts: np.ndarray, keep: int) -> np.ndarray:
    """Deterministic farthest-point thinning to exactly `keep` points."""
    if keep >= pts.shape[0]:
        return pts
    center = pts.mean(axis=0)
    first = int(np.argmin(np.linalg.norm(pts - center, axis=1)))
    chosen = [first]
    dist = np.linalg.norm(pts - pts[first], axis=1)
    for _ in range(keep - 1):
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(pts - pts[nxt], axis=1))
    return pts[np.sort(np.asarray(chosen))]


def mesh_boundary(dom: Domain, count: int) -> BoundarySampling:
    """Roughly uniform-density nodes on a mesh surface.

    Per-triangle counts are proportional to area (largest remainder); each
    triangle receives the centroids of a barycentric refinement of the
    smallest order with order^2 >= count, thinned deterministically to the
    exact count.  Per-point weight is the triangle's area share.
    """
    if dom.kind != "mesh":
        raise ValueError("mesh_boundary requires a mesh domain")
    areas = triangle_areas(dom.vertices, dom.faces)
    counts = _apportion(areas, count)
    nodes, weights = [], []
    for face, n_f in zip(dom.faces, counts):
        if n_f == 0:
            continue
        order = max(1, math.ceil(math.sqrt(n_f)))
        bary = _thin_farthest(_triangle_pattern(order), int(n_f))
        v0, v1, v2 = dom.vertices[face]
        pts = v0 + np.outer(bary[:, 0], v1 - v0) + np.outer(bary[:, 1], v2 - v0)
        nodes.append(pts)
        area = triangle_areas(dom.vertices, face[None, :])[0]
        weights.append(np.full(len(pts), area / n_f))
    return BoundarySampling(nodes=np.concatenate(nodes),
                            weights=np.concatenate(weights))


def domain_boundary(dom: Domain, count: int) -> BoundarySampling:
    """Boundary sampling for any domain kind."""
    if dom.kind == "ball":
        return sphere_boundary(count)
    if dom.kind == "cube":
        return cube_boundary(count)
    return mesh_boundary(dom, count)


def write_boundary_csv(path, bs: BoundarySampling) -> None:
    """Export nodes and weights as "x,y,z,w" rows."""
    with open(path, "w") as fh:
        fh.write("x,y,z,w\n")
        for (x, y, z), w in zip(bs.nodes, bs.weights):
            fh.write(f"{float(x)!r},{float(y)!r},{float(z)!r},{float(w)!r}\n")


# ---------------------------------------------------------------------------
# Reference solutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SourcePoint:
    """Source location of a fundamental solution, outside the domain."""

    location: np.ndarray
    offset: float  # distance to the domain in wavelength units

    def __post_init__(self) -> None:
        if self.offset <= 0.0:
            raise ValueError("source must lie strictly outside the domain")


def fundamental_solution(x, src: SourcePoint, kappa: float):
    """x -> e^{i k |x - s|} / (4 pi |x - s|)."""
    check_kappa(kappa)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    r = np.linalg.norm(pts - src.location[None, :], axis=1)
    if np.any(r == 0.0):
        raise ValueError("fundamental solution is singular at the source point")
    vals = np.exp(1j * kappa * r) / (4.0 * math.pi * r)
    return complex(vals[0]) if single else vals


def cube_source(kappa: float, offset_wavelengths: float = 2.0 / 3.0) -> SourcePoint:
    """Source on the +x axis at the given wavelength offset from the cube."""
    lam = 2.0 * math.pi / kappa
    loc = np.array([1.0 / math.sqrt(3.0) + offset_wavelengths * lam, 0.0, 0.0])
    return SourcePoint(location=loc, offset=offset_wavelengths)


def ball_source(kappa: float, offset_wavelengths: float = 2.0 / 3.0) -> SourcePoint:
    """Source on the +z axis at the given wavelength offset from the ball."""
    lam = 2.0 * math.pi / kappa
    loc = np.array([0.0, 0.0, 1.0 + offset_wavelengths * lam])
    return SourcePoint(location=loc, offset=offset_wavelengths)


def mesh_source(dom: Domain, kappa: float,
                offset_wavelengths: float = 1.0) -> SourcePoint:
    """Source along +x, offset from the mesh's bounding sphere."""
    lam = 2.0 * math.pi / kappa
    loc = np.array([1.0 + offset_wavelengths * lam, 0.0, 0.0])
    return SourcePoint(location=loc, offset=offset_wavelengths)
