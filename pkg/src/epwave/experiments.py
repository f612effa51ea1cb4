"""Experiment harness behind the CLI.

Four experiments reproduce the numerical study at desk scale:

* spherical-modes: approximate every spherical wave b_l^0 for l = 0..5k with
  one fixed sampling matrix per approximation set, recording residual and
  coefficient norm per degree (the PPW instability / EPW stability sweep).
* random-expansion: reconstruct a target with damped random modal
  coefficients over a sweep of set sizes P proportional to N = (L+1)^2.
* fundamental: reconstruct the Helmholtz fundamental solution on the ball,
  the inscribed cube, or an ingested mesh over a P sweep, comparing PPW and
  EPW sets; for ball and cube the pointwise error is also reported on
  coordinate-plane slices.
* svd-spectrum: dump singular values of the sampling matrices over a P sweep
  and report the epsilon-rank per curve.

Every run writes one deterministic CSV per table ((seed, spec) fixes the
bytes) plus a manifest.json with the spec, the per-solve fit reports (which
include wall times), and the output file list.  Experiments run sequentially;
lower layers may use internal (BLAS) parallelism.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import geometry, sampling, solver
from .sampling import ApproximationSet, SamplerConfig, TruncationParams
from .waves import log_beta_table, spherical_wave_matrix


@dataclass
class ExperimentSpec:
    """One experiment invocation; omitted fields follow the tuning rules."""

    name: str
    kappa: float = 6.0
    p: int | None = None
    p_sweep: tuple[int, ...] | None = None
    L: int | None = None
    epsilon: float = 1e-14
    seed: int = 0
    domain: str = "ball"          # "ball" | "cube" | "mesh:<path>"
    set_kind: str = "both"        # "epw" | "ppw" | "both"
    out: str = "out"
    quick: bool = False
    sphere_points: str = "fibonacci"
    strategy: str = "quasi-random"
    norm: str = "christoffel"     # modal dump normalization ("christoffel"|"bnorm")

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(strategy=self.strategy,
                             sphere_points=self.sphere_points, seed=self.seed)

    def effective_kappa(self) -> float:
        return 4.0 if self.quick else self.kappa

    def kinds(self) -> tuple[str, ...]:
        if self.set_kind == "both":
            return ("ppw", "epw")
        return (self.set_kind,)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)
                for v in row) + "\n")


def _write_manifest(out: Path, spec: ExperimentSpec, outputs: list[str],
                    reports: list[dict], extra: dict | None = None) -> Path:
    manifest = {
        "experiment": spec.name,
        "spec": asdict(spec),
        "outputs": outputs,
        "fits": reports,
    }
    if extra:
        manifest.update(extra)
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _build_set(kind: str, count: int, kappa: float, L: int,
               cfg: SamplerConfig) -> ApproximationSet:
    if kind == "ppw":
        return sampling.build_ppw_set(count, kappa, cfg)
    return sampling.build_epw_set(TruncationParams(L=L, kappa=kappa), count, cfg)


def _bl0_boundary_traces(lmax: int, kappa: float,
                         nodes: np.ndarray) -> np.ndarray:
    """b_l^0 on |x| = 1 for all l <= lmax: beta_l j_l(k) Y_l^0(x); (lmax+1, S)."""
    from .specfun import ferrers_norm_table, spherical_jn_log, _tri

    jsign, jlog = spherical_jn_log(lmax, kappa)
    radial = jsign * np.exp(jlog + log_beta_table(lmax, kappa))
    norm = ferrers_norm_table(lmax, nodes[:, 2])
    rows = np.stack([norm[_tri(ell) + 0] for ell in range(lmax + 1)])
    return rows * radial[:, None]


# ---------------------------------------------------------------------------
# spherical-modes
# ---------------------------------------------------------------------------


def run_spherical_modes(spec: ExperimentSpec) -> dict:
    """Degree sweep l = 0..5k of b_l^0 reconstructions, one matrix per set."""
    kappa = spec.effective_kappa()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    lmax_target = int(5 * kappa)
    cfg = spec.sampler_config()

    rows, reports, outputs = [], [], []
    tables: dict[str, list[dict]] = {}
    for kind in spec.kinds():
        L = spec.L if spec.L is not None else int(4 * kappa)
        if spec.p is not None:
            count = spec.p
        elif kind == "ppw":
            count = 4 * (int(4 * kappa) + 1) ** 2
        else:
            count = 16 * L * L
        _, S, eps_default = sampling.tuning_rules(count, kappa)
        epsilon = spec.epsilon if spec.epsilon is not None else eps_default

        bs = geometry.sphere_boundary(S)
        aset = _build_set(kind, count, kappa, L, cfg)
        a = solver.weighted_basis_matrix(aset, bs)
        sol = solver.RegularizedSolver(a, overwrite=True)
        del a
        sw = np.sqrt(bs.weights)
        traces = _bl0_boundary_traces(lmax_target, kappa, bs.nodes)
        table = []
        for ell in range(lmax_target + 1):
            fit = sol.solve(sw * traces[ell].astype(complex), epsilon)
            rows.append([kind, ell, count, S, L if kind == "epw" else "",
                         epsilon, fit.residual, fit.coeff_norm, fit.eps_rank])
            rep = solver.fit_report(fit, P=count, S=S,
                                    L=L if kind == "epw" else None)
            rep["kind"], rep["ell"] = kind, ell
            reports.append(rep)
            table.append(rep)
        tables[kind] = table

    csv_path = out / "spherical_modes.csv"
    _write_csv(csv_path, ["set", "ell", "P", "S", "L", "epsilon",
                          "residual", "coeff_norm", "eps_rank"], rows)
    outputs.append(csv_path.name)
    _write_manifest(out, spec, outputs, reports, {"kappa_effective": kappa})
    return {"csv": csv_path, "tables": tables, "kappa": kappa}


# ---------------------------------------------------------------------------
# random-expansion
# ---------------------------------------------------------------------------


def random_expansion_coeffs(L: int, kappa: float, seed: int) -> np.ndarray:
    """Damped random modal coefficients: complex standard normal times
    [max(1, l - kappa)]^{-1}, flat (l, m) order, from a counter-based
    generator."""
    gen = np.random.Generator(np.random.Philox(seed))
    n = (L + 1) ** 2
    coeffs = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    for ell in range(L + 1):
        damp = 1.0 / max(1.0, ell - kappa)
        coeffs[ell * ell:(ell + 1) ** 2] *= damp
    return coeffs


def run_random_expansion(spec: ExperimentSpec) -> dict:
    """P/N sweep of the reconstruction of a damped random modal target."""
    kappa = spec.effective_kappa()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    L = spec.L if spec.L is not None else int(2 * kappa)
    n_dim = (L + 1) ** 2
    cfg = spec.sampler_config()
    coeffs = random_expansion_coeffs(L, kappa, spec.seed)
    u_norm = float(np.linalg.norm(coeffs))

    if spec.p_sweep:
        counts = list(spec.p_sweep)
    elif spec.p:
        counts = [spec.p]
    else:
        ratios = (1, 2, 4, 10) if spec.quick else (1, 2, 4, 6, 8, 10)
        counts = [r * n_dim for r in ratios]

    kinds = spec.kinds() if spec.set_kind != "both" else ("epw",)
    rows, reports = [], []
    results = []
    for count in counts:
        _, S, _ = sampling.tuning_rules(count, kappa)
        bs = geometry.sphere_boundary(S)
        g = coeffs @ spherical_wave_matrix(L, kappa, bs.nodes)
        for kind in kinds:
            aset = _build_set(kind, count, kappa, L, cfg)
            mat = solver.assemble(aset, bs, g)
            fit = solver.RegularizedSolver(mat.entries, overwrite=True).solve(
                mat.rhs, spec.epsilon)
            rows.append([kind, count, count / n_dim, S, L, spec.epsilon,
                         fit.residual, fit.coeff_norm / u_norm, fit.eps_rank])
            rep = solver.fit_report(fit, P=count, S=S, L=L)
            rep["kind"] = kind
            rep["coeff_norm_rel"] = fit.coeff_norm / u_norm
            reports.append(rep)
            results.append(rep)

    csv_path = out / "random_expansion.csv"
    _write_csv(csv_path, ["set", "P", "P_over_N", "S", "L", "epsilon",
                          "residual", "coeff_norm_rel", "eps_rank"], rows)
    _write_manifest(out, spec, [csv_path.name], reports,
                    {"kappa_effective": kappa, "N": n_dim, "u_norm": u_norm})
    return {"csv": csv_path, "results": results, "N": n_dim, "kappa": kappa}


# ---------------------------------------------------------------------------
# fundamental solution on a domain
# ---------------------------------------------------------------------------


def _resolve_domain(spec: ExperimentSpec) -> geometry.Domain:
    if spec.domain == "ball":
        return geometry.Domain(kind="ball")
    if spec.domain == "cube":
        return geometry.Domain(kind="cube")
    if spec.domain.startswith("mesh:"):
        return geometry.mesh_ingest(spec.domain[5:])
    raise ValueError(f"unknown domain {spec.domain!r}")


def _domain_source(dom: geometry.Domain, kappa: float,
                   offset: float) -> geometry.SourcePoint:
    if dom.kind == "ball":
        return geometry.ball_source(kappa, offset)
    if dom.kind == "cube":
        return geometry.cube_source(kappa, offset)
    return geometry.mesh_source(dom, kappa, offset)


def _slice_points(dom: geometry.Domain, per_axis: int = 41) -> np.ndarray:
    """Grid points on the coordinate planes inside the ball or cube."""
    half = 1.0 if dom.kind == "ball" else 1.0 / math.sqrt(3.0)
    ticks = np.linspace(-half, half, per_axis)
    uu, vv = np.meshgrid(ticks, ticks, indexing="ij")
    flat = np.stack([uu.ravel(), vv.ravel()], axis=1)
    pts = []
    for plane in range(3):
        grid = np.zeros((flat.shape[0], 3))
        grid[:, (plane + 1) % 3] = flat[:, 0]
        grid[:, (plane + 2) % 3] = flat[:, 1]
        pts.append(grid)
    pts = np.concatenate(pts)
    if dom.kind == "ball":
        pts = pts[np.linalg.norm(pts, axis=1) <= 1.0]
    return pts


def run_fundamental(spec: ExperimentSpec, offset: float = 2.0 / 3.0) -> dict:
    """P sweep of fundamental-solution reconstructions, PPW vs EPW."""
    kappa = spec.effective_kappa()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    dom = _resolve_domain(spec)
    src = _domain_source(dom, kappa, offset)
    cfg = spec.sampler_config()

    top = spec.p if spec.p else 2704
    if spec.p_sweep:
        counts = list(spec.p_sweep)
    else:
        fractions = (1 / 8, 1 / 2, 1) if spec.quick else (1 / 16, 1 / 8, 1 / 4, 1 / 2, 1)
        counts = sorted({max(16, round(top * f)) for f in fractions})

    slice_pts = _slice_points(dom) if dom.kind in ("ball", "cube") else None
    slice_ref = (geometry.fundamental_solution(slice_pts, src, kappa)
                 if slice_pts is not None else None)

    rows, reports = [], []
    results = []
    for count in counts:
        L, S, _ = sampling.tuning_rules(count, kappa)
        if spec.L is not None:
            L = spec.L
        bs = geometry.domain_boundary(dom, S)
        g = geometry.fundamental_solution(bs.nodes, src, kappa)
        for kind in spec.kinds():
            aset = _build_set(kind, count, kappa, L, cfg)
            mat = solver.assemble(aset, bs, g)
            fit = solver.RegularizedSolver(mat.entries, overwrite=True).solve(
                mat.rhs, spec.epsilon)
            row = [kind, count, S, L if kind == "epw" else "", spec.epsilon,
                   fit.residual, fit.coeff_norm, fit.eps_rank]
            rep = solver.fit_report(fit, P=count, S=S,
                                    L=L if kind == "epw" else None)
            rep["kind"] = kind
            if slice_pts is not None:
                approx = aset.basis_matrix(slice_pts) @ fit.xi
                err = np.abs(approx - slice_ref)
                row += [float(err.max()), float(err.mean())]
                rep["slice_max_error"] = float(err.max())
                rep["slice_mean_error"] = float(err.mean())
            rows.append(row)
            reports.append(rep)
            results.append(rep)

    header = ["set", "P", "S", "L", "epsilon", "residual", "coeff_norm", "eps_rank"]
    if slice_pts is not None:
        header += ["slice_max_error", "slice_mean_error"]
    csv_path = out / "fundamental.csv"
    _write_csv(csv_path, header, rows)
    lam = 2.0 * math.pi / kappa
    dofs = lam * (3.0 * max(counts) / (4.0 * math.pi)) ** (1.0 / 3.0)
    _write_manifest(out, spec, [csv_path.name], reports,
                    {"kappa_effective": kappa, "source": list(src.location),
                     "source_offset_wavelengths": offset,
                     "dofs_per_wavelength_at_max_P": dofs})
    return {"csv": csv_path, "results": results, "dofs_per_wavelength": dofs,
            "kappa": kappa}


# ---------------------------------------------------------------------------
# svd-spectrum
# ---------------------------------------------------------------------------


def run_svd_spectrum(spec: ExperimentSpec) -> dict:
    """Singular-value dumps across a P sweep; epsilon-rank per curve."""
    kappa = spec.effective_kappa()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    L = spec.L if spec.L is not None else int(4 * kappa)
    cfg = spec.sampler_config()
    if spec.p_sweep:
        counts = list(spec.p_sweep)
    else:
        multipliers = (2, 16) if spec.quick else (1, 2, 4, 8, 16)
        counts = [m * L * L for m in multipliers]
        if spec.p:
            counts = [spec.p]

    rows, outputs = [], []
    results = []
    for kind in spec.kinds():
        for count in counts:
            _, S, _ = sampling.tuning_rules(count, kappa)
            bs = geometry.sphere_boundary(S)
            aset = _build_set(kind, count, kappa, L, cfg)
            a = solver.weighted_basis_matrix(aset, bs)
            sigma = solver.singular_values(a, overwrite=True)
            del a
            rank = int(np.count_nonzero(sigma >= spec.epsilon * sigma[0]))
            name = f"sigma_{kind}_P{count}.csv"
            solver.write_sigma_csv(out / name, sigma)
            outputs.append(name)
            rows.append([kind, count, S, L if kind == "epw" else "",
                         spec.epsilon, rank, float(sigma[0])])
            results.append({"kind": kind, "P": count, "S": S,
                            "eps_rank": rank, "sigma_max": float(sigma[0])})

    csv_path = out / "svd_spectrum.csv"
    _write_csv(csv_path, ["set", "P", "S", "L", "epsilon", "eps_rank",
                          "sigma_max"], rows)
    outputs.append(csv_path.name)
    _write_manifest(out, spec, outputs, results, {"kappa_effective": kappa})
    return {"csv": csv_path, "results": results, "kappa": kappa}


# ---------------------------------------------------------------------------
# set dump and mesh info (thin CLI verbs)
# ---------------------------------------------------------------------------


def run_sample_set(spec: ExperimentSpec) -> dict:
    """Dump one approximation set (parameters, scales) to CSV."""
    kappa = spec.effective_kappa()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    count = spec.p if spec.p else 256
    L = spec.L if spec.L is not None else sampling.tuning_rules(count, kappa)[0]
    kind = "epw" if spec.set_kind == "both" else spec.set_kind
    aset = _build_set(kind, count, kappa, L, spec.sampler_config())

    rows = []
    for p in range(len(aset)):
        t1, t2, psi, zeta = aset.params[p]
        rows.append([kind, p, t1, t2, psi, zeta, float(aset.scales[p])])
    csv_path = out / "sample_set.csv"
    _write_csv(csv_path, ["set", "index", "theta1", "theta2", "psi", "zeta",
                          "scale"], rows)
    _write_manifest(out, spec, [csv_path.name], [],
                    {"kappa_effective": kappa, "L": L, "P": count,
                     "sampler": spec.sampler_config().to_kv()})
    return {"csv": csv_path, "set": aset}


def run_mesh_info(path: str, sample: int | None = None,
                  out: str | None = None) -> dict:
    """Validate a mesh file and report its statistics."""
    dom = geometry.mesh_ingest(path)
    areas = geometry.triangle_areas(dom.vertices, dom.faces)
    info = {
        "path": str(path),
        "vertices": int(dom.vertices.shape[0]),
        "faces": int(dom.faces.shape[0]),
        "euler_characteristic": geometry.euler_characteristic(dom.vertices, dom.faces),
        "surface_area": float(areas.sum()),
        "ingest_scale": dom.scale,
        "circumradius": float(np.max(np.linalg.norm(dom.vertices, axis=1))),
    }
    if sample and out:
        bs = geometry.mesh_boundary(dom, sample)
        geometry.write_boundary_csv(out, bs)
        info["boundary_csv"] = str(out)
        info["boundary_nodes"] = len(bs)
    return info
