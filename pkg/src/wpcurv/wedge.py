"""The real curvature operator Q on the second exterior power.

The real tangent basis is (x_1..x_n, y_1..y_n) with x_i, y_i the real and
imaginary directions of the i-th complex coordinate.  Q acts on the
m = C(2n, 2) wedge basis e_a ^ e_b (a < b) by

    Q(V1 ^ V2, V3 ^ V4) = R(V1, V2, V3, V4),

extended bilinearly.  Entries are evaluated from the complex curvature
tensor by expanding x_i = t_i + tbar_i, y_i = i (t_i - tbar_i); terms
whose holomorphic type is unbalanced (two unbarred or two barred indices
in a slot pair) vanish identically and are dropped; the survivors are
read off the stored R[i][j][k][l] after normalizing each slot pair to
(unbarred, barred) order with a sign flip.

A second, independent evaluation path expresses x^T Q x through integrals
of the two-point fields

    F(z,w) = sum a_ij mu_i(w) conj(mu_j(z))   (and H, K likewise),

the resolvent D and its Green kernel.  Its three-term structure makes the
sign of Q manifest: a non-positive D-term, a non-positive Green term, and
a cross term dominated by the Green term through the Cauchy-Schwarz
inequality (G positive and symmetric).  The zero locus is exactly the
antisymmetric cross-block, i.e. the range of (identity - J), where J is
the involution induced on wedges by the complex structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import surface as surface_mod
from .curvature import CurvatureTensor
from .errors import KernelDimMismatch, PositiveModeDetected, TypeImbalance

TAU_REL_DEFAULT = 1e-8


def wedge_basis(n: int):
    """Ordered pairs (a, b), a < b, over indices 0..2n-1.

    Index a < n is the direction x_a; index a >= n is y_(a-n).
    """
    dim = 2 * n
    return [(a, b) for a in range(dim) for b in range(dim) if a < b]


def symbol(index: int, n: int):
    """Translate a flat index into an ('x'|'y', i) symbol."""
    return ("x", index) if index < n else ("y", index - n)


def real_curvature(R: CurvatureTensor, va, vb, vc, vd) -> float:
    """R(va, vb, vc, vd) for symbols ('x'|'y', i).

    The imaginary residue after summation must vanish; a residue above
    1e-10 * max|R| signals broken type bookkeeping.
    """
    scale = R.max_abs()

    def parts(v):
        kind, i = v
        if kind == "x":
            return [(1.0, i, 0), (1.0, i, 1)]        # t_i + tbar_i
        if kind == "y":
            return [(1j, i, 0), (-1j, i, 1)]         # i (t_i - tbar_i)
        raise TypeImbalance("unknown symbol kind %r" % (kind,))

    total = 0j
    for (c1, i1, b1) in parts(va):
        for (c2, i2, b2) in parts(vb):
            if b1 == b2:
                continue                # unbalanced first pair: vanishes
            for (c3, i3, b3) in parts(vc):
                for (c4, i4, b4) in parts(vd):
                    if b3 == b4:
                        continue        # unbalanced second pair: vanishes
                    coef = c1 * c2 * c3 * c4
                    if b1:              # first slot barred: swap with sign
                        coef = -coef
                        h1, a1 = i2, i1
                    else:
                        h1, a1 = i1, i2
                    if b3:
                        coef = -coef
                        h2, a2 = i4, i3
                    else:
                        h2, a2 = i3, i4
                    total += coef * R.entries[h1, a1, h2, a2]
    if abs(total.imag) > 1e-10 * max(scale, 1e-300):
        raise TypeImbalance(
            "imaginary residue %.3g in a real curvature value" % total.imag)
    return float(total.real)


@dataclass
class WedgeOperator:
    """m x m real symmetric matrix of Q on the wedge basis."""

    matrix: np.ndarray
    n: int
    symmetry_residual: float

    @property
    def m(self):
        return len(self.matrix)

    def quad(self, x):
        return float(x @ self.matrix @ x)


def assemble_Q(R: CurvatureTensor) -> WedgeOperator:
    """Evaluate Q over the enumerated wedge basis and symmetrize."""
    n = R.n
    basis = wedge_basis(n)
    m = len(basis)
    Q = np.empty((m, m))
    for A, (a, b) in enumerate(basis):
        sa, sb = symbol(a, n), symbol(b, n)
        for B, (c, d) in enumerate(basis):
            Q[A, B] = real_curvature(R, sa, sb, symbol(c, n), symbol(d, n))
    scale = max(np.abs(Q).max(), 1e-300)
    resid = float(np.abs(Q - Q.T).max() / scale)
    return WedgeOperator(matrix=(Q + Q.T) / 2, n=n, symmetry_residual=resid)


def j_wedge_matrix(n: int) -> np.ndarray:
    """Matrix of the involution induced on wedges by J x_i = y_i, J y_i = -x_i."""
    basis = wedge_basis(n)
    index = {p: i for i, p in enumerate(basis)}
    m = len(basis)
    J = np.zeros((m, m))

    def jmap(a):
        return (a + n, 1.0) if a < n else (a - n, -1.0)

    for A, (a, b) in enumerate(basis):
        ja, sa = jmap(a)
        jb, sb = jmap(b)
        s = sa * sb
        if ja > jb:
            ja, jb, s = jb, ja, -s
        J[index[(ja, jb)], A] = s
    return J


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    tau: float
    num_negative: int
    num_zero: int
    num_positive: int
    kernel_dim_expected: int
    gap_ratio: float

    def to_dict(self):
        return {
            "eigenvalues": list(self.eigenvalues),
            "tau": self.tau,
            "counts": [self.num_negative, self.num_zero, self.num_positive],
            "kernel_dim_expected": self.kernel_dim_expected,
            "gap_ratio": self.gap_ratio,
        }


def spectrum(Q: WedgeOperator, tau_rel: float = TAU_REL_DEFAULT,
             *, strict: bool = True) -> SpectrumReport:
    """Eigendecomposition with sign counts against tau = tau_rel * max|lam|.

    With `strict`, a positive mode raises PositiveModeDetected and a zero
    count different from n(n-1) raises KernelDimMismatch; both signal an
    implementation (not theorem) failure.
    """
    lam = np.linalg.eigvalsh((Q.matrix + Q.matrix.T) / 2)
    scale = np.abs(lam).max()
    tau = tau_rel * scale
    neg = int(np.sum(lam < -tau))
    pos = int(np.sum(lam > tau))
    zero = len(lam) - neg - pos
    expected = Q.n * (Q.n - 1)
    nonzero = np.abs(lam)[np.abs(lam) > tau]
    gap = float(nonzero.min() / tau) if (len(nonzero) and tau > 0) else float("inf")
    report = SpectrumReport(eigenvalues=lam, tau=float(tau), num_negative=neg,
                            num_zero=zero, num_positive=pos,
                            kernel_dim_expected=expected, gap_ratio=gap)
    if strict:
        if pos:
            raise PositiveModeDetected(
                "largest eigenvalue %.3g above tau %.3g" % (lam.max(), tau))
        if zero != expected:
            raise KernelDimMismatch(
                "found %d near-zero modes, expected %d" % (zero, expected))
    return report


def kernel_check(Q: WedgeOperator, Jmat: np.ndarray,
                 tau_rel: float = TAU_REL_DEFAULT, *, num_random: int = 20,
                 seed: int = 0) -> dict:
    """Both directions of the kernel characterization.

    range(I - J) lies inside ker Q (residual check), and the kernel is no
    larger: rank(Q) = m - n(n-1), and random unit elements of the +1
    eigenspace of J are strictly negative directions.
    """
    m = Q.m
    lam = np.linalg.eigvalsh((Q.matrix + Q.matrix.T) / 2)
    tau = tau_rel * np.abs(lam).max()
    range_resid = np.linalg.norm(Q.matrix @ (np.eye(m) - Jmat)) / np.linalg.norm(Q.matrix)
    rank = int(np.sum(np.abs(lam) > tau))
    expected_rank = m - Q.n * (Q.n - 1)
    if rank != expected_rank:
        raise KernelDimMismatch("rank %d, expected %d" % (rank, expected_rank))

    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(num_random):
        v = rng.standard_normal(m)
        v = (v + Jmat @ v) / 2          # project onto the +1 eigenspace
        v /= np.linalg.norm(v)
        worst = max(worst, Q.quad(v))
    return {
        "range_residual_rel": float(range_resid),
        "range_ok": bool(range_resid <= tau_rel),
        "rank": rank,
        "worst_plus_eigenspace_value": float(worst),
        "plus_eigenspace_negative": bool(worst < -tau),
        "tau": float(tau),
    }


# ---------------------------------------------------------------------------
# integral-form evaluation


def wedge_vector(coeffs: dict, n: int) -> np.ndarray:
    """Coordinates of a {a, b, c} coefficient triple in the wedge basis.

    a and c are n x n real matrices of xx- and yy-components (only their
    antisymmetric parts matter), b is the full n x n cross block.
    """
    basis = wedge_basis(n)
    index = {p: i for i, p in enumerate(basis)}
    x = np.zeros(len(basis))
    a = np.asarray(coeffs.get("a", np.zeros((n, n))), dtype=float)
    b = np.asarray(coeffs.get("b", np.zeros((n, n))), dtype=float)
    c = np.asarray(coeffs.get("c", np.zeros((n, n))), dtype=float)
    for i in range(n):
        for j in range(n):
            if i < j:
                x[index[(i, j)]] += a[i, j] - a[j, i]
                x[index[(i + n, j + n)]] += c[i, j] - c[j, i]
            x[index[(i, j + n)]] += b[i, j]
    return x


def pair_field(coeff: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Two-point field L[p, q] = sum_ij coeff_ij mu_i(q) conj(mu_j(p))."""
    coeff = np.asarray(coeff, dtype=complex)
    return np.conj(mu).T @ (coeff.T @ mu)


def weighted_green(surface, green) -> np.ndarray:
    """Green kernel contracted with the quadrature weights on both slots."""
    w = surface.weights
    return green.matrix * np.outer(w, w)


def _d_term(surface, diag_part: np.ndarray) -> float:
    """sum_p w_p D(diag_part)(p) diag_part(p) for a real diagonal field."""
    u = surface_mod.apply_D(surface, diag_part)
    return float(np.sum(surface.weights * u * diag_part))


def _green_quad(WG: np.ndarray, L: np.ndarray) -> tuple[float, float]:
    """(sum WG |L|^2, Re sum WG L(z,w) L(w,z)) without large complex temps."""
    Lr, Li = L.real, L.imag
    mod2 = float(np.sum(WG * (Lr * Lr + Li * Li)))
    cross = float(np.sum(WG * (Lr * Lr.T)) - np.sum(WG * (Li * Li.T)))
    return mod2, cross


def q_xx_block(a, fields, surface, green, *, WG=None) -> float:
    """x^T Q x for a pure xx-element with coefficient matrix a."""
    mu = np.array([f.values for f in fields])
    if WG is None:
        WG = weighted_green(surface, green)
    F = pair_field(a, mu)
    t1 = -4 * _d_term(surface, np.diag(F).imag)
    mod2, cross = _green_quad(WG, F)
    return t1 - 2 * mod2 + 2 * cross


def q_yy_block(c, fields, surface, green, *, WG=None) -> float:
    """x^T Q x for a pure yy-element; same functional form as the xx block."""
    return q_xx_block(c, fields, surface, green, WG=WG)


def q_xy_block(b, fields, surface, green, *, WG=None) -> float:
    """x^T Q x for a pure cross-element with coefficient matrix b."""
    mu = np.array([f.values for f in fields])
    if WG is None:
        WG = weighted_green(surface, green)
    H = pair_field(b, mu)
    t1 = -4 * _d_term(surface, np.diag(H).real)
    mod2, cross = _green_quad(WG, H)
    return t1 - 2 * mod2 - 2 * cross


def q_cross_term(a, b, fields, surface, green, *, WG=None) -> float:
    """Mixed value Q(xx-element(a), cross-element(b))."""
    mu = np.array([f.values for f in fields])
    if WG is None:
        WG = weighted_green(surface, green)
    F = pair_field(a, mu)
    H = pair_field(b, mu)
    u = surface_mod.apply_D(surface, np.diag(F).imag)
    t1 = -4 * float(np.sum(surface.weights * u * np.diag(H).real))
    Fr, Fi, Hr, Hi = F.real, F.imag, H.real, H.imag
    # Im sum WG F conj(H) and Im sum WG F(z,w) H(w,z), real arithmetic
    im_fh_bar = float(np.sum(WG * (Fi * Hr - Fr * Hi)))
    im_fh_swap = float(np.sum(WG * (Fr * Hi.T)) + np.sum(WG * (Fi * Hr.T)))
    return t1 - 2 * im_fh_bar - 2 * im_fh_swap


def integral_form_Q(coeffs: dict, fields, surface, green, *, WG=None) -> float:
    """Quadratic value of the full element {a, b, c} by the integral path.

    The yy-block is folded into the xx-block first (d = a + c; the wedge
    involution J sends xx-wedges to yy-wedges and preserves Q), then the
    three-term combined formula is evaluated with L = F_d + i H.
    """
    mu = np.array([f.values for f in fields])
    n = len(mu)
    a = np.asarray(coeffs.get("a", np.zeros((n, n))), dtype=float)
    b = np.asarray(coeffs.get("b", np.zeros((n, n))), dtype=float)
    c = np.asarray(coeffs.get("c", np.zeros((n, n))), dtype=float)
    if WG is None:
        WG = weighted_green(surface, green)
    d = a + c
    L = pair_field(d, mu) + 1j * pair_field(b, mu)
    t1 = -4 * _d_term(surface, np.diag(L).imag)
    mod2, cross = _green_quad(WG, L)
    return t1 - 2 * mod2 + 2 * cross


def cross_term_consistency(a, b, fields, surface, green, *, WG=None) -> dict:
    """Compare the standalone cross-term formula with its polarization.

    The polarization identity Q(A,B) = (Q(A+B,A+B) - Q(A,A) - Q(B,B)) / 2
    uses only the separately validated block formulas, so a mismatch here
    isolates a sign or factor problem in the standalone cross term.
    """
    if WG is None:
        WG = weighted_green(surface, green)
    direct = q_cross_term(a, b, fields, surface, green, WG=WG)
    total = integral_form_Q({"a": a, "b": b}, fields, surface, green, WG=WG)
    qa = q_xx_block(a, fields, surface, green, WG=WG)
    qb = q_xy_block(b, fields, surface, green, WG=WG)
    polarized = (total - qa - qb) / 2
    return {
        "direct": direct,
        "polarized": polarized,
        "abs_difference": abs(direct - polarized),
    }


def cauchy_schwarz_slack(L: np.ndarray, WG: np.ndarray) -> dict:
    """|sum WG L(z,w) L(w,z)|  <=  sum WG |L(z,w)|^2 (G positive, symmetric)."""
    Lr, Li = L.real, L.imag
    lhs_re = float(np.sum(WG * (Lr * Lr.T)) - np.sum(WG * (Li * Li.T)))
    lhs_im = float(np.sum(WG * (Lr * Li.T)) + np.sum(WG * (Li * Lr.T)))
    rhs = float(np.sum(WG * (Lr * Lr + Li * Li)))
    return {"lhs_abs": abs(complex(lhs_re, lhs_im)), "rhs": rhs}


def export_spectrum_json(report: SpectrumReport, kernel_report: dict, path):
    payload = {"spectrum": report.to_dict(), "kernel_check": kernel_report}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    return payload


def export_spectrum_csv(report: SpectrumReport, path):
    with open(path, "w") as fh:
        fh.write("index,eigenvalue\n")
        for i, lam in enumerate(report.eigenvalues):
            fh.write("%d,%.17g\n" % (i, lam))
