"""Wolpert pairings and the curvature tensor at the chosen surface.

The building block is the pairing

    (ij,kl) = sum_p w_p * D(mu_i conj(mu_j))(p) * mu_k(p) conj(mu_l)(p),

a discrete integral over the surface against the resolvent operator D.
The curvature tensor in these coordinates is the two-pairing sum

    R[i][j][k][l] = (ij,kl) + (il,kj),

whose index symmetries (exchange of the holomorphic slots, exchange of
the antiholomorphic slots, and conjugation with pairwise swap) follow
from the self-adjointness of D and are validated here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import surface as surface_mod
from .errors import SymmetryViolation

SYMMETRY_TOL = 1e-7


@dataclass
class PairingTable:
    """All n^4 pairing values (ij,kl)."""

    entries: np.ndarray   # complex, shape (n, n, n, n)

    @property
    def n(self):
        return self.entries.shape[0]

    def residuals(self):
        """Max relative residuals of the two pairing symmetries:
        (ij,kl) = (kl,ij) and conj((ij,kl)) = (ji,lk)."""
        P = self.entries
        scale = np.abs(P).max()
        return {
            "exchange": float(np.abs(P - P.transpose(2, 3, 0, 1)).max() / scale),
            "conjugation": float(np.abs(np.conj(P) - P.transpose(1, 0, 3, 2)).max() / scale),
        }


@dataclass
class CurvatureTensor:
    """Entries R[i][j][k][l] with the index pattern (holo, anti, holo, anti)."""

    entries: np.ndarray

    @property
    def n(self):
        return self.entries.shape[0]

    def residuals(self):
        R = self.entries
        scale = np.abs(R).max()
        return {
            "holo_swap": float(np.abs(R - R.transpose(2, 1, 0, 3)).max() / scale),
            "anti_swap": float(np.abs(R - R.transpose(0, 3, 2, 1)).max() / scale),
            "conjugation": float(np.abs(np.conj(R) - R.transpose(1, 0, 3, 2)).max() / scale),
        }

    def max_abs(self):
        return float(np.abs(self.entries).max())


def pairing_table(fields, surface=None, *, weights=None, apply_D_fn=None) -> PairingTable:
    """Compute all pairings with n(n+1)/2 resolvent solves.

    D commutes with complex conjugation (its kernel is real), so
    D(mu_j conj(mu_i)) = conj(D(mu_i conj(mu_j))) and only the upper
    triangle of products needs a solve.  A custom (weights, apply_D_fn)
    pair may replace the surface operators (used by the synthetic-kernel
    harness).
    """
    mu = np.array([f.values for f in fields])
    n = len(mu)
    if weights is None:
        weights = surface.weights
    if apply_D_fn is None:
        apply_D_fn = lambda f: surface_mod.apply_D(surface, f)

    solved = {}
    for i in range(n):
        for j in range(i, n):
            solved[(i, j)] = apply_D_fn(mu[i] * np.conj(mu[j]))
    entries = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            dij = solved[(i, j)] if i <= j else np.conj(solved[(j, i)])
            entries[i, j] = np.einsum("p,kp,lp->kl", weights * dij, mu, np.conj(mu))
    return PairingTable(entries)


def curvature_tensor(P: PairingTable, *, tol: float = SYMMETRY_TOL) -> CurvatureTensor:
    """Assemble R[i][j][k][l] = (ij,kl) + (il,kj) and validate symmetries."""
    R = CurvatureTensor(P.entries + P.entries.transpose(0, 3, 2, 1))
    res = R.residuals()
    worst = max(res.values())
    if worst > tol:
        raise SymmetryViolation(
            "curvature symmetry residual %.3g exceeds %.3g (%s)" % (worst, tol, res))
    return R


def holomorphic_sectional(R: CurvatureTensor, gram, i: int) -> float:
    """Holomorphic sectional curvature along basis direction i.

    The diagonal entry R[i][i][i][i] is positive (it integrates a positive
    kernel against |mu_i|^4-type densities); the sectional curvature of
    the complex line spanned by mu_i carries the opposite sign:
    K_i = -R[i][i][i][i] / g_ii^2 < 0.
    """
    g_ii = gram.entries[i, i].real
    return float(-R.entries[i, i, i, i].real / g_ii**2)


def export_tensor_json(R: CurvatureTensor, path):
    entries = [
        [i, j, k, l,
         R.entries[i, j, k, l].real, R.entries[i, j, k, l].imag]
        for i in range(R.n) for j in range(R.n)
        for k in range(R.n) for l in range(R.n)
    ]
    payload = {"n": R.n, "entries": entries, "residuals": R.residuals()}
    with open(path, "w") as fh:
        json.dump(payload, fh)
    return payload
