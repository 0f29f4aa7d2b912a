"""Linear stability of the synchronized steady state via spectral equivalence.

Linearizing the coupled system about (u, v) gives the block operator

    J = [ Δ + diag(a - 2u - bv)      -b·diag(u)          ]
        [      c·diag(v)         Δ + diag(a - 2v + cu)   ]

whose stability eigenvalues μ solve JΦ = -μΦ. At the synchronized state
u = αθ, v = βθ the identities α + bβ = 1, β - cα = 1 collapse J into

    J = I₂⊗(Δ + diag(a)) - M⊗diag(θ),   M = [[α+1, bα], [-cβ, β+1]],

and M has eigenvalues exactly {s₁, 2} with s₁ = (2+c-b)/(1+bc) (its
characteristic polynomial factors as (x-2)(x-s₁)). A constant 2×2
similarity therefore block-diagonalizes J into the two scalar operators
Δ + diag(a - s₁θ) and Δ + diag(a - 2θ): the coupled spectrum is the union
of the two scalar families, and the coupled eigenvectors are

    (b, c)   ⊗ φ_i(a - s₁θ)   with μ = λ_i(a - s₁θ),
    (1-b,1+c)⊗ φ_i(a - 2θ)    with μ = λ_i(a - 2θ).

The component ratios φ/ψ are the roots z₁ = b/c and z₂ = (1-b)/(1+c) of
c(1+c)z² - (b+c)z + b(1-b) = 0. On the locus b = c/(2c+1) the two families
coincide (s₁ = 2), M becomes a Jordan block, and every eigenvalue of J is
a defective double eigenvalue of the single weight a - 2θ; the projection
ξ = (2c+1)φ - ψ then maps any eigenvector into the scalar eigenspace.
Since s₁ > 1 and 2 > 1, both families are strictly positive whenever θ is
the positive logistic state, which is the stability assertion this module
verifies numerically.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elliptic import SubcriticalError, NewtonDivergenceError, solve_logistic
from .grid import Field, Grid, GridMismatchError, assemble_operator, fmt_g17
from .model import ModelParams, ratio_coefficients, synchronized_state
from .spectral import EigenPair, EigenSolveError, eigenpairs

__all__ = [
    "CoupledJacobian",
    "StabilityReport",
    "assemble_jacobian",
    "s_parameter",
    "mode_ratios",
    "degenerate_distance",
    "coupled_spectrum",
    "coupled_eigenpairs",
    "predicted_spectrum",
    "verify_theorem",
    "ansatz_coefficients",
    "ansatz_residual",
    "component_projection",
    "stability_report_dict",
    "write_eigentable_csv",
    "DEGENERATE_TOL",
    "DEGENERATE_WARN_BAND",
    "COUPLED_DENSE_CUTOFF",
]

DEGENERATE_TOL = 1e-12
DEGENERATE_WARN_BAND = 1e-4
COUPLED_DENSE_CUTOFF = 1000
DEFAULT_TOL = 1e-10


def s_parameter(b: float, c: float) -> float:
    """Decoupling exponent s₁ = (2+c-b)/(1+bc); always > 1 for valid (b, c).

    On the degenerate locus b = c/(2c+1) it equals 2 exactly (to rounding).
    """
    ratio_coefficients(b, c)  # parameter validation
    return (2.0 + c - b) / (1.0 + b * c)


def degenerate_distance(b: float, c: float) -> float:
    """|b - c/(2c+1)|, distance to the defective-spectrum locus."""
    return abs(b - c / (2.0 * c + 1.0))


def mode_ratios(b: float, c: float) -> tuple[float, float, bool]:
    """Roots (z₁, z₂) of c(1+c)z² - (b+c)z + b(1-b) = 0 in closed form.

    z₁ = b/c is the φ/ψ ratio of the s₁ family, z₂ = (1-b)/(1+c) that of
    the s=2 family. degenerate flags |b - c/(2c+1)| <= DEGENERATE_TOL,
    where the roots coincide.
    """
    ratio_coefficients(b, c)
    z1 = b / c
    z2 = (1.0 - b) / (1.0 + c)
    return z1, z2, degenerate_distance(b, c) <= DEGENERATE_TOL


class CoupledJacobian:
    """Block linearization of the coupled system at a state (u, v)."""

    __slots__ = ("grid", "u", "v", "params", "_matrix")

    def __init__(self, grid: Grid, u: Field, v: Field, params: ModelParams):
        if u.grid != grid or v.grid != grid:
            raise GridMismatchError("u/v live on a different grid than the Jacobian")
        self.grid = grid
        self.u = u
        self.v = v
        self.params = params
        self._matrix = None

    @property
    def size(self) -> int:
        return 2 * self.grid.size

    @property
    def matrix(self) -> sp.csr_matrix:
        if self._matrix is None:
            from .grid import _laplacian

            lap = _laplacian(self.grid.domain)
            a = self.params.a_field(self.grid).values
            b, c = self.params.b, self.params.c
            u, v = self.u.values, self.v.values
            self._matrix = sp.bmat(
                [
                    [lap + sp.diags(a - 2.0 * u - b * v), sp.diags(-b * u)],
                    [sp.diags(c * v), lap + sp.diags(a - 2.0 * v + c * u)],
                ],
                format="csr",
            )
        return self._matrix


def assemble_jacobian(u: Field, v: Field, params: ModelParams, grid: Grid) -> CoupledJacobian:
    """Coupled linearization at any state (u, v), not only steady states."""
    return CoupledJacobian(grid, u, v, params)


def _l2_scale(grid: Grid) -> float:
    return math.sqrt(grid.cell_volume)


def coupled_eigenpairs(
    J: CoupledJacobian, k: int, tol: float = DEFAULT_TOL, method: str = "auto"
) -> tuple[np.ndarray, np.ndarray]:
    """k eigenvalues of -J with smallest real parts, plus eigenvectors.

    Returns (values, vectors) with values sorted ascending by (Re, Im) and
    vectors normalized to unit combined L2 norm. Residuals are validated
    against tol * max(1, |μ|).
    """
    n2 = J.size
    if not 1 <= k <= n2:
        raise ValueError(f"k must be in [1, {n2}], got {k}")
    M = (-J.matrix).tocsr()

    if method == "auto":
        method = "dense" if n2 <= COUPLED_DENSE_CUTOFF else "shift_invert"
    if method == "shift_invert" and k >= n2 - 1:
        method = "dense"  # ARPACK requires k < n - 1
    if method == "dense":
        vals, vecs = sla.eig(M.toarray())
    elif method == "shift_invert":
        # Gershgorin lower bound on the real parts keeps the shift outside
        diag = M.diagonal()
        offsum = np.asarray(np.abs(M).sum(axis=1)).ravel() - np.abs(diag)
        sigma = float((diag - offsum).min()) - 1.0
        v0 = np.ones(n2)
        vals, vecs = spla.eigs(M, k=k, sigma=sigma, which="LM", tol=1e-12, v0=v0)
    else:
        raise ValueError(f"unknown method {method!r}")

    order = np.lexsort((vals.imag, vals.real))[:k]
    vals = vals[order]
    vecs = vecs[:, order]

    scale = _l2_scale(J.grid)
    out_vecs = np.empty((n2, k), dtype=complex)
    for j in range(k):
        vec = vecs[:, j]
        vec = vec / (np.linalg.norm(vec) * scale)
        res = float(np.linalg.norm(M @ vec - vals[j] * vec) * scale)
        if res > tol * max(1.0, abs(vals[j])):
            raise EigenSolveError(
                f"coupled eigenpair {j} residual {res:.3e} exceeds tol {tol:.1e}",
                last_residual=res,
            )
        out_vecs[:, j] = vec
    return vals, out_vecs


def coupled_spectrum(
    J: CoupledJacobian, k: int, tol: float = DEFAULT_TOL, method: str = "auto"
) -> list[complex]:
    """k eigenvalues μ of JΦ = -μΦ with smallest real parts, ascending."""
    vals, _ = coupled_eigenpairs(J, k, tol, method)
    return [complex(v) for v in vals]


def predicted_spectrum(
    grid: Grid,
    a: Field,
    theta: Field,
    b: float,
    c: float,
    k: int,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
) -> tuple[list[tuple[float, str]], dict[str, "object"]]:
    """k smallest predicted coupled eigenvalues as (value, family) pairs.

    Families: "s1" (weight a - s₁θ, ratio z₁) and "two" (weight a - 2θ,
    ratio z₂); on the degenerate locus a single family "degenerate"
    (weight a - 2θ) contributes every value twice. The k smallest of the
    union are found by merging min(k, N) values from each family, which is
    always enough. Also returns the scalar spectra keyed by family for
    reuse (eigenfunctions feed the direct ansatz checks).
    """
    n = grid.size
    _, _, degenerate = mode_ratios(b, c)
    s1 = s_parameter(b, c)
    spectra: dict[str, object] = {}
    if degenerate:
        kk = min((k + 1) // 2, n)
        spec2 = eigenpairs(assemble_operator(grid, a - 2.0 * theta), kk, tol, method)
        spectra["degenerate"] = spec2
        tagged = [(p.lam, "degenerate") for p in spec2.pairs for _ in range(2)]
        return tagged[:k], spectra

    kk = min(k, n)
    spec1 = eigenpairs(assemble_operator(grid, a - s1 * theta), kk, tol, method)
    spec2 = eigenpairs(assemble_operator(grid, a - 2.0 * theta), kk, tol, method)
    spectra["s1"] = spec1
    spectra["two"] = spec2
    tagged = [(p.lam, "s1") for p in spec1.pairs] + [(p.lam, "two") for p in spec2.pairs]
    tagged.sort(key=lambda t: t[0])
    return tagged[:k], spectra


def ansatz_coefficients(b: float, c: float, family: str) -> tuple[float, float]:
    """Component pair (A, B) such that (Aφ, Bφ) is a coupled eigenvector.

    family "s1" pairs with eigenfunctions of weight a - s₁θ, family "two"
    with weight a - 2θ. On the degenerate locus the two pairs are parallel.
    """
    if family == "s1":
        return b, c
    if family in ("two", "degenerate"):
        return 1.0 - b, 1.0 + c
    raise ValueError(f"unknown family {family!r}")


def ansatz_residual(J: CoupledJacobian, pair: EigenPair, coeffs: tuple[float, float]) -> float:
    """L2 norm of J·(Aφ, Bφ) + λ·(Aφ, Bφ) for a scalar eigenpair (λ, φ).

    Pure matrix-vector application: no eigensolver involved. For the correct
    family pairing this is bounded by the scalar residual times
    max(|A|, |B|) plus assembly roundoff.
    """
    A, B = coeffs
    big = np.concatenate([A * pair.phi.values, B * pair.phi.values])
    return float(np.linalg.norm(J.matrix @ big + pair.lam * big) * _l2_scale(J.grid))


def component_projection(vec: np.ndarray, w_phi: float, w_psi: float, grid: Grid) -> np.ndarray:
    """w_phi·φ + w_psi·ψ for a stacked coupled vector (φ, ψ).

    With (w_phi, w_psi) a left eigenvector of the 2×2 mixing matrix, the
    result satisfies the corresponding scalar eigenproblem: (2c+1, -1)
    projects onto the a-2θ family (the degenerate-case reduction), and
    (1+c, -(1-b)) onto the a-s₁θ family.
    """
    n = grid.size
    return w_phi * vec[:n] + w_psi * vec[n:]


@dataclass(frozen=True)
class StabilityReport:
    """Coupled vs predicted spectra with diagnostics and verdict."""

    s_value: float
    s_second: float
    degenerate: bool
    band_warning: bool
    coupled_eigs: tuple[complex, ...]
    predicted_eigs: tuple[float, ...]
    predicted_families: tuple[str, ...]
    max_rel_mismatch: float
    max_imag: float
    ratio_errors: tuple[float, ...]
    mu1: float
    verdict: str
    cause: str | None
    k: int
    mismatch_threshold: float


def _inconclusive(params: ModelParams, k: int, cause: str) -> StabilityReport:
    b, c = params.b, params.c
    return StabilityReport(
        s_value=s_parameter(b, c),
        s_second=2.0,
        degenerate=degenerate_distance(b, c) <= DEGENERATE_TOL,
        band_warning=degenerate_distance(b, c) <= DEGENERATE_WARN_BAND,
        coupled_eigs=(),
        predicted_eigs=(),
        predicted_families=(),
        max_rel_mismatch=math.nan,
        max_imag=math.nan,
        ratio_errors=(),
        mu1=math.nan,
        verdict="inconclusive",
        cause=cause,
        k=k,
        mismatch_threshold=math.nan,
    )


def verify_theorem(
    params: ModelParams,
    grid: Grid,
    k: int,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
) -> StabilityReport:
    """Full stability verification pipeline at the synchronized steady state.

    Solves the logistic profile, assembles the coupled Jacobian, computes
    its 2k smallest eigenvalues, and compares them as a sorted multiset
    against the union of the two predicted scalar families. Solver failures
    (including a subcritical growth rate) yield verdict "inconclusive" with
    a cause instead of propagating.
    """
    b, c = params.b, params.c
    s1 = s_parameter(b, c)
    z1, z2, degenerate = mode_ratios(b, c)
    band = degenerate_distance(b, c) <= DEGENERATE_WARN_BAND

    try:
        logistic = solve_logistic(grid, params.a_field(grid), tol=tol)
        steady = synchronized_state(params, logistic)
        J = assemble_jacobian(steady.u, steady.v, params, grid)
        a = logistic.a
        predicted, _ = predicted_spectrum(
            grid, a, logistic.theta, b, c, 2 * k, tol=tol, method=method
        )
        coupled_vals, coupled_vecs = coupled_eigenpairs(J, 2 * k, tol=tol, method=method)
    except SubcriticalError as exc:
        return _inconclusive(params, k, f"no positive steady state: {exc}")
    except (NewtonDivergenceError, EigenSolveError) as exc:
        return _inconclusive(params, k, f"solver failure: {exc}")

    pred_vals = np.array([p[0] for p in predicted])
    pred_fams = tuple(p[1] for p in predicted)
    coupled_re = np.sort(coupled_vals.real)
    max_rel_mismatch = _cluster_mismatch(coupled_re, pred_vals)
    max_imag = float(np.abs(coupled_vals.imag).max())

    # component-ratio diagnostics, skipped on the degenerate locus and for
    # eigenvalues clustered with the other family (mixed eigenspaces)
    ratio_errors: list[float] = []
    if not degenerate:
        fam_vals: dict[str, list[float]] = {"s1": [], "two": []}
        for v, f in predicted:
            fam_vals[f].append(v)
        n = grid.size
        for j in range(len(coupled_vals)):
            mu = coupled_vals[j]
            if abs(mu.imag) > 1e-8 * max(1.0, abs(mu.real)):
                continue
            home = _closest_family(mu.real, fam_vals)
            other_gap = min(
                (abs(mu.real - v) for f, vs in fam_vals.items() if f != home for v in vs),
                default=np.inf,
            )
            if other_gap <= 1e-6 * max(1.0, abs(mu.real)):
                continue  # cross-family cluster: eigenspace may mix the ratios
            vec = coupled_vecs[:, j]
            if np.abs(vec.imag).max() > 1e-8 * np.abs(vec).max():
                continue
            phi, psi = vec.real[:n], vec.real[n:]
            denom_psi = float(psi @ psi)
            if denom_psi == 0.0:
                continue
            z_fit = float(phi @ psi) / denom_psi
            err = min(abs(z_fit - z1) / max(1.0, abs(z1)), abs(z_fit - z2) / max(1.0, abs(z2)))
            ratio_errors.append(err)

    threshold = 100.0 * tol
    if degenerate or band:
        threshold = max(threshold, 1e-6)
    min_pred = float(pred_vals.min())
    min_re = float(coupled_re.min())
    if max_rel_mismatch <= threshold:
        if min_pred > 0.0 and min_re > 0.0:
            verdict, cause = "stable", None
        elif min_re < 0.0:
            verdict, cause = "unstable", None
        else:
            verdict, cause = "inconclusive", "borderline spectrum (eigenvalue at zero)"
    else:
        verdict = "inconclusive"
        cause = (
            f"spectral mismatch {max_rel_mismatch:.3e} exceeds threshold {threshold:.1e}"
        )

    return StabilityReport(
        s_value=s1,
        s_second=2.0,
        degenerate=degenerate,
        band_warning=band,
        coupled_eigs=tuple(complex(v) for v in coupled_vals),
        predicted_eigs=tuple(float(v) for v in pred_vals),
        predicted_families=pred_fams,
        max_rel_mismatch=max_rel_mismatch,
        max_imag=max_imag,
        ratio_errors=tuple(ratio_errors),
        mu1=min_re,
        verdict=verdict,
        cause=cause,
        k=k,
        mismatch_threshold=threshold,
    )


CLUSTER_GAP = 1e-6


def _cluster_mismatch(coupled_re: np.ndarray, pred: np.ndarray) -> float:
    """Max relative mismatch between sorted multisets, cluster-aware.

    Predicted values closer than CLUSTER_GAP (relative) are grouped and
    compared by cluster mean. Defective double eigenvalues perturb as
    +/-sqrt(rounding) in an uncontrolled direction (a real or a complex
    pair), but the pair mean stays accurate to ordinary rounding, so
    comparing means is the stable check; well-separated eigenvalues reduce
    to the plain elementwise comparison.
    """
    floor = 1e-12 * max(1.0, float(np.abs(pred).max()))
    worst = 0.0
    i = 0
    m = len(pred)
    while i < m:
        j = i + 1
        while j < m and abs(pred[j] - pred[j - 1]) <= CLUSTER_GAP * max(1.0, abs(pred[j])):
            j += 1
        c_mean = float(np.mean(coupled_re[i:j]))
        p_mean = float(np.mean(pred[i:j]))
        worst = max(worst, abs(c_mean - p_mean) / max(abs(p_mean), floor))
        i = j
    return worst


def _closest_family(value: float, fam_vals: dict[str, list[float]]) -> str:
    best, best_d = "s1", np.inf
    for f, vs in fam_vals.items():
        for v in vs:
            d = abs(value - v)
            if d < best_d:
                best, best_d = f, d
    return best


def stability_report_dict(report: StabilityReport) -> dict:
    """JSON-ready dict with complex eigenvalues as [re, im] pairs."""
    return {
        "s_value": report.s_value,
        "s_second": report.s_second,
        "degenerate": report.degenerate,
        "band_warning": report.band_warning,
        "coupled_eigs": [[v.real, v.imag] for v in report.coupled_eigs],
        "predicted_eigs": list(report.predicted_eigs),
        "predicted_families": list(report.predicted_families),
        "max_rel_mismatch": report.max_rel_mismatch,
        "max_imag": report.max_imag,
        "ratio_errors": list(report.ratio_errors),
        "mu1": report.mu1,
        "verdict": report.verdict,
        "cause": report.cause,
        "k": report.k,
        "mismatch_threshold": report.mismatch_threshold,
    }


def write_eigentable_csv(report: StabilityReport, path):
    """Eigenvalue table: i,coupled_re,coupled_im,predicted,rel_err."""
    coupled_sorted = sorted(report.coupled_eigs, key=lambda v: (v.real, v.imag))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "coupled_re", "coupled_im", "predicted", "rel_err"])
        for i, (mu, pred) in enumerate(zip(coupled_sorted, report.predicted_eigs)):
            rel = abs(mu.real - pred) / max(abs(pred), 1e-300)
            w.writerow([str(i), fmt_g17(mu.real), fmt_g17(mu.imag), fmt_g17(pred), fmt_g17(rel)])
