"""Batch driver: build the surface, run pipeline stages, emit reports.

A run is fully determined by a RunConfig (plain-text key=value file plus
flag overrides); its SHA-256 hash is embedded in every JSON artifact so
outputs can be traced back to their configuration.  Numeric outputs are
deterministic for a fixed config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import curvature, qdiff, rankone, surface, surrogate, wedge
from .fuchsian import enumerate_words, octagon_group


@dataclass
class RunConfig:
    genus: int = 2
    word_length: int = 8
    mesh_level: int = 3
    norm_cap: float = 400.0
    eps_auto: float = 1e-5
    tau_rel: float = 1e-8
    solver_rtol: float = 1e-10
    seeds: int = 20
    surrogate_points: int = 40
    out: str = "wpcurv_out"
    stage: str = "all"          # all | surface | surrogate | rankone

    def validate(self):
        if self.genus != 2:
            raise ValueError("only genus 2 is supported")
        if not 1 <= self.mesh_level <= 8:
            raise ValueError("mesh level must be in [1, 8]")
        if self.word_length < 4:
            raise ValueError("word length must be >= 4")
        if self.tau_rel <= 0 or self.solver_rtol <= 0:
            raise ValueError("tolerances must be positive")
        if self.stage not in ("all", "surface", "surrogate", "rankone"):
            raise ValueError("unknown stage %r" % self.stage)

    def hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


#: check name -> human description printed by `explain`
CHECK_DESCRIPTIONS = {
    "resolvent_operator": "resolvent D is self-adjoint and positive in the weighted inner product",
    "green_kernel": "Green kernel entrywise positive, symmetric, weighted row sums equal 1",
    "tensor_symmetries": "curvature tensor satisfies the two index-swap symmetries and conjugation",
    "tensor_assembly": "diagonal entries positive, sectional curvatures negative, tensor and integral paths agree",
    "xx_block_definite": "Q strictly negative on random xx-wedge elements",
    "cross_block_null": "Q vanishes on antisymmetric cross-wedge elements",
    "yy_block_definite": "Q strictly negative on random yy-wedge elements",
    "reduction_null": "Q vanishes when the yy block cancels the xx block (a = -c)",
    "operator_nonpositive_kernel": "Q non-positive with kernel exactly the range of (identity - J)",
    "quaternionic_null_vector": "quaternionic special 2-vector: null expansion, J-invariance, least-squares margin",
}


def _stamp(path: str, cfg_hash: str):
    """Embed the config hash into an already-written JSON artifact."""
    with open(path) as fh:
        payload = json.load(fh)
    payload["config_hash"] = cfg_hash
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)


def _check(name, passed, residual, tolerance, detail=None):
    entry = {
        "pass": bool(passed),
        "residual": residual,
        "tolerance": tolerance,
        "description": CHECK_DESCRIPTIONS[name],
    }
    if detail:
        entry["detail"] = detail
    return entry


def run_surface_stage(config: RunConfig, outdir: str) -> dict:
    """Group -> words -> basis -> mesh -> operators -> tensor -> Q -> checks."""
    cfg_hash = config.hash()
    checks = {}

    group = octagon_group(config.genus)
    group.export_json(os.path.join(outdir, "group.json"))
    _stamp(os.path.join(outdir, "group.json"), cfg_hash)

    words = enumerate_words(group, config.word_length, norm_cap=config.norm_cap)
    basis_q = qdiff.build_qdiff_basis(group, config.word_length, word_set=words,
                                      eps_auto=config.eps_auto)

    surf = surface.build_mesh(group, config.mesh_level)
    surface.export_mesh_json(surf, os.path.join(outdir, "mesh.json"))
    _stamp(os.path.join(outdir, "mesh.json"), cfg_hash)

    fields = [qdiff.beltrami_from_qdiff(q, surf) for q in basis_q]
    gram = qdiff.gram_matrix(fields, surf)
    fields, gram, _ = qdiff.orthonormalize(fields, gram)

    rng = np.random.default_rng(config.seeds)
    n_nodes = surf.num_nodes

    # resolvent operator hypotheses
    asym = 0.0
    posmin = np.inf
    for _ in range(10):
        f = rng.standard_normal(n_nodes)
        g = rng.standard_normal(n_nodes)
        Df = surface.apply_D(surf, f, rtol=config.solver_rtol)
        Dg = surface.apply_D(surf, g, rtol=config.solver_rtol)
        nf = np.sqrt(surf.inner(f, f).real)
        ng = np.sqrt(surf.inner(g, g).real)
        asym = max(asym, abs(surf.inner(Df, g) - surf.inner(f, Dg)) / (nf * ng))
        posmin = min(posmin, surf.inner(Df, f).real / nf**2)
    checks["resolvent_operator"] = _check(
        "resolvent_operator", asym <= 1e-10 and posmin >= -1e-10,
        {"self_adjoint": float(asym), "positivity_min": float(posmin)}, 1e-10)

    green = surface.green_kernel(surf)
    surface.export_green(green, surf, os.path.join(outdir, "green"))
    _stamp(os.path.join(outdir, "green.json"), cfg_hash)
    gr = green.report
    checks["green_kernel"] = _check(
        "green_kernel",
        gr["min_entry"] > 0 and gr["asymmetry_rel"] <= 1e-8 and gr["rowsum_err"] <= 1e-8,
        gr, 1e-8)

    P = curvature.pairing_table(fields, surf)
    R = curvature.curvature_tensor(P)
    curvature.export_tensor_json(R, os.path.join(outdir, "tensor.json"))
    _stamp(os.path.join(outdir, "tensor.json"), cfg_hash)
    res = R.residuals()
    checks["tensor_symmetries"] = _check(
        "tensor_symmetries", max(res.values()) <= 1e-9, res, 1e-9)

    n = R.n
    diag_pos = [R.entries[i, i, i, i].real for i in range(n)]
    sectional = [curvature.holomorphic_sectional(R, gram, i) for i in range(n)]

    Q = wedge.assemble_Q(R)
    spec = wedge.spectrum(Q, config.tau_rel, strict=False)
    tau = spec.tau
    Jmat = wedge.j_wedge_matrix(n)
    kernel_report = {}
    kernel_ok = False
    try:
        kernel_report = wedge.kernel_check(Q, Jmat, config.tau_rel)
        kernel_ok = kernel_report["range_ok"] and kernel_report["plus_eigenspace_negative"]
    except Exception as exc:          # rank mismatch keeps the report honest
        kernel_report = {"error": str(exc)}

    WG = wedge.weighted_green(surf, green)

    # two-path agreement on a few random mixed elements
    two_path_rel = 0.0
    for _ in range(5):
        coeffs = {
            "a": rng.standard_normal((n, n)),
            "b": rng.standard_normal((n, n)),
            "c": rng.standard_normal((n, n)),
        }
        x = wedge.wedge_vector(coeffs, n)
        qt = Q.quad(x)
        qi = wedge.integral_form_Q(coeffs, fields, surf, green, WG=WG)
        two_path_rel = max(two_path_rel, abs(qt - qi) / max(1.0, abs(qt)))
    checks["tensor_assembly"] = _check(
        "tensor_assembly",
        min(diag_pos) > 0 and max(sectional) < 0 and two_path_rel <= 1e-6,
        {"diag_min": min(diag_pos), "sectional_max": max(sectional),
         "two_path_rel": two_path_rel}, 1e-6)

    def rand_antisym():
        a = rng.standard_normal((n, n))
        return a - a.T

    worst_xx = -np.inf
    worst_yy = -np.inf
    worst_cross = 0.0
    worst_reduction = 0.0
    for _ in range(10):
        a = rand_antisym()
        worst_xx = max(worst_xx, Q.quad(wedge.wedge_vector({"a": a}, n)))
        worst_yy = max(worst_yy, Q.quad(wedge.wedge_vector({"c": a}, n)))
        b = rand_antisym()
        worst_cross = max(worst_cross, abs(Q.quad(wedge.wedge_vector({"b": b}, n))))
        d = rng.standard_normal((n, n))
        worst_reduction = max(worst_reduction, abs(
            Q.quad(wedge.wedge_vector({"a": d, "c": -d}, n))))
    checks["xx_block_definite"] = _check(
        "xx_block_definite", worst_xx < -tau, float(worst_xx), -tau)
    checks["yy_block_definite"] = _check(
        "yy_block_definite", worst_yy < -tau, float(worst_yy), -tau)
    checks["cross_block_null"] = _check(
        "cross_block_null", worst_cross <= tau, float(worst_cross), tau)
    checks["reduction_null"] = _check(
        "reduction_null", worst_reduction <= tau, float(worst_reduction), tau)

    counts_ok = (spec.num_positive == 0 and spec.num_zero == spec.kernel_dim_expected)
    checks["operator_nonpositive_kernel"] = _check(
        "operator_nonpositive_kernel", counts_ok and kernel_ok,
        {"counts": [spec.num_negative, spec.num_zero, spec.num_positive],
         "gap_ratio": spec.gap_ratio, **kernel_report}, config.tau_rel)

    wedge.export_spectrum_csv(spec, os.path.join(outdir, "spectrum.csv"))
    wedge.export_spectrum_json(spec, kernel_report,
                               os.path.join(outdir, "spectrum.json"))
    _stamp(os.path.join(outdir, "spectrum.json"), cfg_hash)
    return checks


def run(config: RunConfig) -> dict:
    """Execute the selected stages; returns the verification report."""
    config.validate()
    os.makedirs(config.out, exist_ok=True)
    cfg_hash = config.hash()
    checks = {}

    if config.stage in ("all", "surface"):
        checks.update(run_surface_stage(config, config.out))

    if config.stage in ("all", "surrogate"):
        summary = surrogate.run_seed_sweep(
            range(config.seeds), config.surrogate_points, 3, config.tau_rel)
        surrogate.export_suite_json(summary, os.path.join(config.out, "surrogate.json"))
        _stamp(os.path.join(config.out, "surrogate.json"), cfg_hash)

    if config.stage in ("all", "rankone"):
        lemma = {}
        ok = True
        for m in (1, 2):
            rep = rankone.lemma51_check(m, config.seeds)
            lemma["m%d" % m] = {k: rep[k] for k in
                                ("worst_null_expansion", "worst_j_invariance",
                                 "min_lstsq_resid")}
            ok = ok and (rep["worst_null_expansion"] <= 1e-12
                         and rep["worst_j_invariance"] <= 1e-12
                         and rep["min_lstsq_resid"] >= 0.5)
            path = os.path.join(config.out, "rankone_m%d.json" % m)
            rankone.export_report_json(rep, path)
            _stamp(path, cfg_hash)
        checks["quaternionic_null_vector"] = _check(
            "quaternionic_null_vector", ok, lemma, 1e-12)

    report = {
        "config": asdict(config),
        "config_hash": cfg_hash,
        "checks": checks,
        "all_pass": all(c["pass"] for c in checks.values()),
    }
    with open(os.path.join(config.out, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    return report


def explain(report: dict) -> str:
    """One line per check: status, residual, tolerance, description."""
    if not report.get("checks"):
        raise ValueError("report contains no checks")
    lines = []
    for name, c in report["checks"].items():
        status = "pass" if c["pass"] else "FAIL"
        lines.append("%-28s %-4s residual=%s tol=%s  %s"
                     % (name, status, c["residual"], c["tolerance"],
                        c["description"]))
    return "\n".join(lines)


def _load_config(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        with open(args.config) as fh:
            for line in fh:
                line = line.split("#")[0].strip()
                if not line:
                    continue
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if not hasattr(config, key):
                    raise ValueError("unknown config key %r" % key)
                current = getattr(config, key)
                setattr(config, key,
                        type(current)(value) if not isinstance(current, str) else value)
    for key in ("mesh_level", "word_length", "tau_rel", "seeds", "out", "stage"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(config, key, val)
    return config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wpcurv",
        description="curvature-operator laboratory for the genus-2 octagon surface")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="plain-text key=value config file")
        p.add_argument("--mesh-level", dest="mesh_level", type=int)
        p.add_argument("--word-length", dest="word_length", type=int)
        p.add_argument("--tau-rel", dest="tau_rel", type=float)
        p.add_argument("--seeds", type=int)
        p.add_argument("--out")
        p.add_argument("--stage", choices=["all", "surface", "surrogate", "rankone"])

    for name in ("run", "spectrum", "surrogate", "rankone"):
        add_common(sub.add_parser(name))
    pe = sub.add_parser("explain")
    pe.add_argument("report", help="path to a report.json")

    args = parser.parse_args(argv)

    if args.command == "explain":
        with open(args.report) as fh:
            report = json.load(fh)
        print(explain(report))
        return 0

    config = _load_config(args)
    if args.command == "surrogate":
        config.stage = "surrogate"
    elif args.command == "rankone":
        config.stage = "rankone"
    elif args.command == "spectrum":
        config.stage = "surface"

    report = run(config)
    if args.command == "spectrum":
        with open(os.path.join(config.out, "spectrum.csv")) as fh:
            print(fh.read().strip())
    else:
        print(explain(report) if report["checks"] else "no checks selected")
    return 0 if report["all_pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
