"""End-to-end certification that structured pencil perturbations map back to
structured polynomial perturbations within explicit bounds.

Pipeline per trial: draw a structured perturbation of the assembled pencil,
rezero its trailing block by a structure-preserving congruence (quadratic
star-Sylvester fixed point), complete the perturbed bidiagonal block to a dual
basis of degree k, reconstruct the perturbed polynomial by the monomial
sandwich, and compare the achieved backward error against the certified
multiplier.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linearize, minbases, polycore, spectra, sylvester
from .errors import StructureError, StruktError, ThresholdError
from .linearize import BlockKroneckerPencil
from .polycore import (
    MatrixPolynomial,
    StructureKind,
    frob_norm,
    pair_norm,
    structure_residual,
)


# ---------------------------------------------------------------------------
# Structured perturbations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructuredPerturbation:
    """The six natural blocks of a structured pencil perturbation.

    The (1,2) block is determined by the (2,1) block through the kind's 2x2
    matrix, so it is never stored; `pencil()` rebuilds it exactly.
    """

    da11: np.ndarray
    db11: np.ndarray
    da21: np.ndarray
    db21: np.ndarray
    da22: np.ndarray
    db22: np.ndarray
    kind: StructureKind
    k: int
    n: int

    def pencil(self) -> MatrixPolynomial:
        a = self.kind.mobius
        size = (2 * self.k + 1) * self.n
        top = (self.k + 1) * self.n
        dtype = np.result_type(self.da11, self.db11)
        l0 = np.zeros((size, size), dtype=dtype)
        l1 = np.zeros_like(l0)
        l0[:top, :top] = self.da11
        l1[:top, :top] = self.db11
        l0[top:, :top] = self.da21
        l1[top:, :top] = self.db21
        l0[top:, top:] = self.da22
        l1[top:, top:] = self.db22
        l0[:top, top:] = _star(a.b * self.db21 + a.d * self.da21)
        l1[:top, top:] = _star(a.a * self.db21 + a.c * self.da21)
        field_tag = polycore.COMPLEX if np.iscomplexobj(l0) else polycore.REAL
        return polycore.from_coeff_list([l0, l1], field_tag)

    def norm(self) -> float:
        return frob_norm(self.pencil())

    @classmethod
    def from_pencil(
        cls, dl: MatrixPolynomial, k: int, n: int, kind: StructureKind, tol: float = 1e-10
    ) -> "StructuredPerturbation":
        size = (2 * k + 1) * n
        if dl.shape != (size, size) or dl.grade != 1:
            raise ValueError(f"expected a {size} square pencil")
        top = (k + 1) * n
        c0, c1 = dl.coefficient(0), dl.coefficient(1)
        pert = cls(
            da11=c0[:top, :top].copy(),
            db11=c1[:top, :top].copy(),
            da21=c0[top:, :top].copy(),
            db21=c1[top:, :top].copy(),
            da22=c0[top:, top:].copy(),
            db22=c1[top:, top:].copy(),
            kind=kind,
            k=k,
            n=n,
        )
        rebuilt = pert.pencil()
        defect = frob_norm(rebuilt - dl)
        if defect > tol * max(1.0, frob_norm(dl)):
            raise StructureError(
                f"(1,2) block is not determined by the (2,1) block (defect {defect:.3e})"
            )
        return pert


def _star(a: np.ndarray) -> np.ndarray:
    return np.conj(a.T) if np.iscomplexobj(a) else a.T


def random_structured_perturbation(
    k: int,
    n: int,
    kind: StructureKind,
    target_norm: float,
    seed,
    field_tag: str = polycore.REAL,
) -> StructuredPerturbation:
    """Random structured pencil perturbation with exact Frobenius norm.

    The raw pencil is projected onto the structure class, its blocks are
    extracted, the (1,2) block is replaced by its determined form, and the
    whole object is rescaled; the (2,2) block is generically nonzero.
    """
    dl = polycore.random_structured(
        (2 * k + 1) * n, 1, kind, target_norm=1.0, seed=seed, field=field_tag
    )
    pert = StructuredPerturbation.from_pencil(dl, k, n, kind, tol=1e-8)
    scale = target_norm / pert.norm()
    return StructuredPerturbation(
        da11=pert.da11 * scale,
        db11=pert.db11 * scale,
        da21=pert.da21 * scale,
        db21=pert.db21 * scale,
        da22=pert.da22 * scale,
        db22=pert.db22 * scale,
        kind=kind,
        k=k,
        n=n,
    )


# ---------------------------------------------------------------------------
# Congruence and reconstruction
# ---------------------------------------------------------------------------

def congruence_threshold(k: int, norm_m: float) -> float:
    """Admissibility bound on the perturbation for the rezeroing congruence."""
    return (math.pi / 16.0) ** 2 / (k**2 * (1.0 + norm_m))


def x_norm_bound(k: int, norm_dl: float) -> float:
    """Guaranteed bound 3k||dL|| / (1 - 3k||dL||) on the congruence factor."""
    denom = 1.0 - 3.0 * k * norm_dl
    return 3.0 * k * norm_dl / denom if denom > 0 else math.inf


@dataclass
class CongruenceResult:
    x: np.ndarray
    ltilde: MatrixPolynomial
    dtilde21: MatrixPolynomial
    state: sylvester.FixedPointState
    residual22: float
    norm_dl: float


def congruence_zero_block(
    pencil: BlockKroneckerPencil,
    pert: StructuredPerturbation,
    tol: float = 1e-12,
    mode: str = "certified",
    fp_tol: float | None = None,
    max_iter: int = 100,
) -> CongruenceResult:
    """Rezero the (2,2) block of the perturbed pencil by a structure-preserving
    congruence [[I, 0], [X, I]] (L + dL) [[I, X^*], [0, I]].

    In certified mode the perturbation must lie below `congruence_threshold`;
    empirical mode proceeds whenever the fixed point is admissible.
    """
    k, n = pencil.k, pencil.n
    norm_m = frob_norm(pencil.m_pencil)
    norm_dl = pert.norm()
    bound = congruence_threshold(k, norm_m)
    if mode == "certified" and norm_dl >= bound:
        raise ThresholdError(
            f"perturbation norm {norm_dl:.3e} exceeds the congruence bound {bound:.3e}",
            value=norm_dl,
            bound=bound,
        )
    if fp_tol is None and norm_dl > 0:
        fp_tol = 1e-12 * pair_norm(pert.da22, pert.db22)
    state = sylvester.quadratic_fixed_point(
        pert, pencil.m0, pencil.m1, pencil.kind, tol=fp_tol, max_iter=max_iter
    )
    x = state.x
    size = pencil.size
    top = (k + 1) * n
    g_left = np.eye(size, dtype=np.result_type(x, pencil.l0))
    g_left[top:, :top] = x
    g_right = np.eye(size, dtype=g_left.dtype)
    g_right[:top, top:] = _star(x)

    perturbed = pencil.as_polynomial() + pert.pencil()
    t0 = g_left @ perturbed.coefficient(0) @ g_right
    t1 = g_left @ perturbed.coefficient(1) @ g_right
    residual22 = pair_norm(t0[top:, top:], t1[top:, top:])
    if residual22 > max(tol, (fp_tol or 0.0) * 4.0):
        raise StruktError(
            f"(2,2) block residual {residual22:.3e} above tolerance after congruence"
        )
    t0[top:, top:] = 0.0
    t1[top:, top:] = 0.0
    ltilde = polycore.from_coeff_list([t0, t1], perturbed.field)
    base = minbases.build_Lk(k, n)
    dtilde21 = polycore.from_coeff_list(
        [t0[top:, :top], t1[top:, :top]], perturbed.field
    ) - base
    return CongruenceResult(
        x=x,
        ltilde=ltilde,
        dtilde21=dtilde21,
        state=state,
        residual22=residual22,
        norm_dl=norm_dl,
    )


@dataclass
class ReconstructionResult:
    poly: MatrixPolynomial
    dual: minbases.DualBasisPair
    norm_dtilde21: float
    norm_dr: float


def reconstruct_perturbed_polynomial(
    ltilde: MatrixPolynomial,
    k: int,
    n: int,
    kind: StructureKind,
    tol: float = 1e-11,
    mode: str = "certified",
) -> ReconstructionResult:
    """Grade 2k+1 polynomial strongly linearized by the rezeroed pencil.

    Completes the perturbed (2,1) block to a dual basis pair and sandwiches
    the (1,1) block between the completed basis and its substituted adjoint,
    applying the same sign normalization as `linearize.recover`.
    """
    m11, b21, _, _ = linearize.split_natural_partition(ltilde, k, n)
    if k == 0:
        return ReconstructionResult(
            poly=linearize.recover_from_m(m11, k, n, kind),
            dual=minbases.DualBasisPair(
                K=minbases.build_Lk(0, n), N=minbases.build_Lambda(0, n), k=0, n=n
            ),
            norm_dtilde21=0.0,
            norm_dr=0.0,
        )
    dt21 = b21 - minbases.build_Lk(k, n)
    norm_dt21 = frob_norm(dt21)
    bound = minbases.completion_threshold(k)
    if mode == "certified" and norm_dt21 >= bound:
        raise ThresholdError(
            f"(2,1) defect {norm_dt21:.3e} exceeds the completion bound {bound:.3e}",
            value=norm_dt21,
            bound=bound,
        )
    pair = minbases.dual_basis_complete(b21, k, n, tol=max(1e-12, tol * 0.1))
    nt = polycore.transpose_poly(pair.N)
    left = polycore.star_adjoint(polycore.mobius(nt, kind.mobius))
    raw = polycore.poly_matmul(polycore.poly_matmul(left, m11), nt)
    poly = kind.recovery_sign(k) * raw
    return ReconstructionResult(
        poly=poly,
        dual=pair,
        norm_dtilde21=norm_dt21,
        norm_dr=frob_norm(pair.delta_r()),
    )


# ---------------------------------------------------------------------------
# Certified bound bookkeeping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremBound:
    """Admissibility threshold and backward-error multiplier for a (P, L) pair."""

    threshold: float
    c_pl: float

    def ratio_bound(self, norm_dl: float, norm_l: float) -> float:
        return self.c_pl * norm_dl / norm_l


def theorem_bound(p: MatrixPolynomial, pencil: BlockKroneckerPencil) -> TheoremBound:
    k = pencil.k
    norm_m = frob_norm(pencil.m_pencil)
    norm_p = frob_norm(p)
    norm_l = frob_norm(pencil.as_polynomial())
    threshold = (math.pi / 16.0) ** 2 / ((k + 1) ** 2.5 * (1.0 + norm_m))
    c_pl = 68.0 * (k + 1) ** 2.5 * (norm_l / norm_p) * (1.0 + norm_m + norm_m**2)
    return TheoremBound(threshold=threshold, c_pl=c_pl)


def corollary_factor(k: int, n: int) -> float:
    """Simplified multiplier (k+1)^3 sqrt(n); meaningful when ||M|| is close to
    ||P||, which the tridiagonal placement achieves at unit polynomial norm."""
    return (k + 1) ** 3 * math.sqrt(n)


# ---------------------------------------------------------------------------
# Certification runner
# ---------------------------------------------------------------------------

REPORT_COLUMNS = [
    "seed",
    "kind",
    "g",
    "n",
    "k",
    "placement",
    "norm_P",
    "norm_L",
    "norm_M",
    "norm_dL",
    "threshold_ok",
    "norm_X",
    "norm_dR",
    "norm_dP",
    "ratio",
    "C_PL",
    "bound",
    "ratio_le_bound",
    "structure_ok",
    "eig_chordal_max",
    "iters",
    "wall_ms",
]

_BOOL_COLUMNS = {"threshold_ok", "ratio_le_bound", "structure_ok"}
_INT_COLUMNS = {"seed", "g", "n", "k", "iters"}


@dataclass
class BackwardErrorReport:
    """One certification trial; the field order matches the CSV schema."""

    seed: int
    kind: str
    g: int
    n: int
    k: int
    placement: str
    norm_P: float
    norm_L: float
    norm_M: float
    norm_dL: float
    threshold_ok: bool
    norm_X: float
    norm_dP: float = math.nan
    norm_dR: float = math.nan
    ratio: float = math.nan
    C_PL: float = math.nan
    bound: float = math.nan
    ratio_le_bound: bool = False
    structure_ok: bool = False
    eig_chordal_max: float = math.nan
    iters: int = 0
    wall_ms: float = 0.0
    error: str | None = None  # not serialized; diagnostic only

    def row(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}


def _run_single_trial(
    p,
    pencil,
    tb,
    kind,
    placement_name,
    norm_dl_target,
    trial_seed,
    seed_label,
    mode,
    compute_eigs,
    fp_max_iter,
):
    start = time.perf_counter()
    norm_p = frob_norm(p)
    norm_l = frob_norm(pencil.as_polynomial())
    norm_m = frob_norm(pencil.m_pencil)
    report = BackwardErrorReport(
        seed=seed_label,
        kind=kind.value,
        g=p.grade,
        n=p.rows,
        k=pencil.k,
        placement=placement_name,
        norm_P=norm_p,
        norm_L=norm_l,
        norm_M=norm_m,
        norm_dL=norm_dl_target,
        threshold_ok=norm_dl_target < tb.threshold,
        norm_X=math.nan,
        C_PL=tb.c_pl,
    )
    try:
        if norm_dl_target == 0.0:
            report.norm_X = 0.0
            report.norm_dR = 0.0
            report.norm_dP = 0.0
            report.ratio = 0.0
            report.bound = 0.0
            report.ratio_le_bound = True
            report.structure_ok = True
            report.iters = 0
            pert = None
        else:
            if mode == "certified" and not report.threshold_ok:
                raise ThresholdError(
                    "perturbation above the certified threshold",
                    value=norm_dl_target,
                    bound=tb.threshold,
                )
            pert = random_structured_perturbation(
                pencil.k, pencil.n, kind, norm_dl_target, trial_seed, field_tag=p.field
            )
            cong = congruence_zero_block(
                pencil, pert, mode=mode, max_iter=fp_max_iter
            )
            recon = reconstruct_perturbed_polynomial(
                cong.ltilde, pencil.k, pencil.n, kind, mode=mode
            )
            dp = recon.poly - p
            report.norm_X = float(np.linalg.norm(cong.x))
            report.norm_dR = recon.norm_dr
            report.norm_dP = frob_norm(dp)
            report.ratio = report.norm_dP / norm_p
            report.bound = tb.ratio_bound(cong.norm_dl, norm_l)
            report.ratio_le_bound = bool(report.ratio <= report.bound)
            report.structure_ok = bool(
                structure_residual(dp, kind) <= 1e-11 * max(1.0, norm_p)
            )
            report.iters = cong.state.iterations
            if compute_eigs:
                lpert = pencil.as_polynomial() + pert.pencil()
                got = spectra.pencil_eigs(lpert.coefficient(0), lpert.coefficient(1))
                want = spectra.reference_polyeigs(recon.poly)
                report.eig_chordal_max = spectra.compare_spectra(got, want).max_distance
    except StruktError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
    report.wall_ms = (time.perf_counter() - start) * 1000.0
    return report


def run_certification(
    p: MatrixPolynomial,
    kind: StructureKind,
    placement: str,
    pert_norms,
    trials: int,
    seed: int,
    mode: str = "certified",
    compute_eigs: bool = False,
    fp_max_iter: int = 100,
    normalize: bool = True,
) -> list[BackwardErrorReport]:
    """Run the full pipeline over a grid of perturbation norms and trials.

    Trials are independent and deterministic per (seed, norm index, trial
    index); per-trial failures are recorded in the report, never raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if any(nrm < 0 for nrm in pert_norms):
        raise ValueError("perturbation norms must be nonnegative")
    if normalize:
        p = p * (1.0 / frob_norm(p))
    pencil = linearize.build_linearization(p, kind, placement)
    tb = theorem_bound(p, pencil)

    jobs = []
    for ni, nrm in enumerate(pert_norms):
        for ti in range(trials):
            trial_seed = np.random.SeedSequence(entropy=seed, spawn_key=(ni, ti))
            jobs.append((nrm, trial_seed))

    def work(job):
        nrm, trial_seed = job
        return _run_single_trial(
            p,
            pencil,
            tb,
            kind,
            placement,
            nrm,
            trial_seed,
            seed,
            mode,
            compute_eigs,
            fp_max_iter,
        )

    workers = int(os.environ.get("STRUKT_NUM_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(work, jobs))
    return [work(job) for job in jobs]


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

def reports_to_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for rep in reports:
            row = rep.row()
            writer.writerow([_format_cell(row[name]) for name in REPORT_COLUMNS])


def _format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(name: str, text: str):
    if name in _BOOL_COLUMNS:
        return text == "true"
    if name in _INT_COLUMNS:
        return int(text)
    if name in ("kind", "placement"):
        return text
    return float(text)


def reports_from_csv(path) -> list[BackwardErrorReport]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            BackwardErrorReport(**{k: _parse_cell(k, v) for k, v in row.items()})
            for row in reader
        ]


def reports_to_json(reports, path) -> None:
    with open(path, "w") as fh:
        json.dump([rep.row() for rep in reports], fh)


def reports_from_json(path) -> list[BackwardErrorReport]:
    with open(path) as fh:
        return [BackwardErrorReport(**row) for row in json.load(fh)]
