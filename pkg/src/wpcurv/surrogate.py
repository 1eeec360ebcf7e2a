"""Synthetic-kernel harness for the curvature-operator sign mechanism.

The negativity proof for the wedge operator consumes exactly three
properties of the resolvent: it is self-adjoint and positive, and its
Green kernel is pointwise positive and symmetric.  Any kernel with those
properties on any finite measure space must therefore reproduce the same
spectral picture: Q non-positive with kernel of dimension n(n-1) equal
to the range of (identity - J).  This module generates random models
with a Gaussian radial kernel and replays the whole wedge pipeline on
them, serving as a brute-force oracle for the spectral claims.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import wedge
from .curvature import curvature_tensor, pairing_table
from .errors import KernelDimMismatch, PositiveModeDetected
from .qdiff import BeltramiField


@dataclass
class SurrogateModel:
    """Abstract sample sites, weights, kernel and tangent fields."""

    seed: int
    points: np.ndarray        # (N, 2) plane positions
    weights: np.ndarray       # positive
    kernel: np.ndarray        # symmetric, entrywise positive
    mu: np.ndarray            # (n, N) complex
    bandwidth: float

    @property
    def n(self):
        return len(self.mu)

    def apply_D(self, f):
        """Kernel contraction (Df)(p) = sum_q K[p,q] w_q f(q)."""
        return self.kernel @ (self.weights * f)

    def operator_eigenvalues(self):
        """Eigenvalues of the kernel as a weighted operator (similar to
        the symmetric matrix W^1/2 K W^1/2)."""
        s = np.sqrt(self.weights)
        return np.linalg.eigvalsh(self.kernel * np.outer(s, s))


def random_surrogate(seed: int, num_points: int, n: int) -> SurrogateModel:
    """Deterministic random model with a Gaussian radial kernel.

    Bandwidth is the median inter-point distance, so the kernel is
    symmetric, entrywise positive and positive definite by construction.
    `num_points >= 2 n^2` is required as an identifiability floor.
    """
    if num_points < 2 * n * n:
        raise ValueError(
            "num_points %d below identifiability floor %d" % (num_points, 2 * n * n))
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((num_points, 2))
    weights = rng.uniform(0.5, 1.5, num_points)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    bandwidth = float(np.median(dist[np.triu_indices(num_points, 1)]))
    kernel = np.exp(-(dist**2) / (2 * bandwidth**2))
    mu = rng.standard_normal((n, num_points)) + 1j * rng.standard_normal((n, num_points))
    return SurrogateModel(seed=seed, points=pts, weights=weights,
                          kernel=kernel, mu=mu, bandwidth=bandwidth)


def run_property_suite(model: SurrogateModel, tau_rel: float = wedge.TAU_REL_DEFAULT) -> dict:
    """Pairings -> tensor -> Q -> spectrum -> kernel characterization.

    Positive modes or a kernel smaller than n(n-1) raise immediately
    (either falsifies the implementation).  A kernel *larger* than
    n(n-1), possible when the mu vectors are linearly dependent, is
    reported as excess instead.
    """
    fields = [BeltramiField(row) for row in model.mu]
    P = pairing_table(fields, weights=model.weights, apply_D_fn=model.apply_D)
    R = curvature_tensor(P)
    Q = wedge.assemble_Q(R)
    report = wedge.spectrum(Q, tau_rel, strict=False)
    expected = Q.n * (Q.n - 1)
    if report.num_positive:
        raise PositiveModeDetected(
            "surrogate seed %d: positive mode %.3g" % (model.seed,
                                                       report.eigenvalues.max()))
    if report.num_zero < expected:
        raise KernelDimMismatch(
            "surrogate seed %d: %d zero modes < %d" % (model.seed,
                                                       report.num_zero, expected))
    Jmat = wedge.j_wedge_matrix(Q.n)
    m = Q.m
    range_resid = (np.linalg.norm(Q.matrix @ (np.eye(m) - Jmat))
                   / np.linalg.norm(Q.matrix))

    # Cauchy-Schwarz slack of the Green term for a random two-point field
    rng = np.random.default_rng(model.seed + 1)
    coeff = rng.standard_normal((model.n, model.n)) \
        + 1j * rng.standard_normal((model.n, model.n))
    L = wedge.pair_field(coeff, model.mu)
    WG = model.kernel * np.outer(model.weights, model.weights)
    slack = wedge.cauchy_schwarz_slack(L, WG)

    return {
        "seed": model.seed,
        "n": model.n,
        "eigenvalues": list(report.eigenvalues),
        "tau": report.tau,
        "num_negative": report.num_negative,
        "num_zero": report.num_zero,
        "num_positive": report.num_positive,
        "kernel_dim_expected": expected,
        "kernel_dim_excess": report.num_zero - expected,
        "gap_ratio": report.gap_ratio,
        "range_residual_rel": float(range_resid),
        "cauchy_schwarz_lhs": slack["lhs_abs"],
        "cauchy_schwarz_rhs": slack["rhs"],
    }


def run_seed_sweep(seeds, num_points: int, n: int,
                   tau_rel: float = wedge.TAU_REL_DEFAULT) -> dict:
    """Run the suite over many seeds and summarize worst margins."""
    per_seed = []
    for seed in seeds:
        model = random_surrogate(seed, num_points, n)
        per_seed.append(run_property_suite(model, tau_rel))
    return {
        "n": n,
        "num_points": num_points,
        "num_seeds": len(per_seed),
        "worst_eigenvalue_margin": max(
            max(r["eigenvalues"]) for r in per_seed),
        "worst_kernel_dim_excess": max(r["kernel_dim_excess"] for r in per_seed),
        "all_counts_ok": all(
            r["num_zero"] == r["kernel_dim_expected"] for r in per_seed),
        "per_seed": per_seed,
    }


def export_suite_json(summary: dict, path):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary
