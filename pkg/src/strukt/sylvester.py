"""Star-Sylvester machinery behind the congruence that rezeroes a perturbed
pencil's trailing block.

The linear step vectorizes a pair of coupled Sylvester equations into one
underdetermined system whose matrix has exact 0/+-1 entries and minimum
singular value 2*sin(pi/(4k)) for every structure kind and every block size.
The quadratic step wraps the linear solve in a fixed-point iteration whose
convergence is certified by delta > 0 and theta*omega/delta^2 < 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import minbases
from .errors import ConvergenceError, NumericalError, StructureError, ThresholdError
from .polycore import (
    COMPLEX,
    driver_matrix,
    from_coeff_list,
    is_structured,
    pair_norm,
)


def sigma_min_formula(k: int) -> float:
    """Smallest singular value of the unperturbed vectorized system matrix."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 2.0 * math.sin(math.pi / (4.0 * k))


@dataclass(frozen=True)
class PerturbedSelectors:
    """Selector matrices shifted by the (2,1) perturbation blocks.

    ehat = -E + dA21 and fhat = F + dB21; with a zero perturbation they reduce
    to (-E, F).
    """

    ehat: np.ndarray
    fhat: np.ndarray
    k: int
    n: int

    @classmethod
    def unperturbed(cls, k: int, n: int) -> "PerturbedSelectors":
        sel = minbases.selector_matrices(k, n)
        return cls(ehat=-sel.e, fhat=sel.f.copy(), k=k, n=n)

    @classmethod
    def from_blocks(cls, da21: np.ndarray, db21: np.ndarray, k: int, n: int):
        sel = minbases.selector_matrices(k, n)
        return cls(ehat=-sel.e + da21, fhat=sel.f + db21, k=k, n=n)

    @property
    def da21(self) -> np.ndarray:
        return self.ehat + minbases.selector_matrices(self.k, self.n).e

    @property
    def db21(self) -> np.ndarray:
        return self.fhat - minbases.selector_matrices(self.k, self.n).f


# ---------------------------------------------------------------------------
# The vectorized system matrix, its reductions, and perturbation
# ---------------------------------------------------------------------------

def build_TA(k: int, n: int, kind) -> np.ndarray:
    """Unperturbed 2k^2n^2 x 2k(k+1)n^2 system matrix, exact 0/+-1 entries."""
    a = driver_matrix(kind)
    sel = minbases.selector_matrices(k, n)
    e, f = sel.e, sel.f
    eye = np.eye(k * n)
    top = np.hstack([np.kron(a.b * f - a.d * e, eye), -np.kron(eye, e)])
    bot = np.hstack([np.kron(a.a * f - a.c * e, eye), np.kron(eye, f)])
    return np.vstack([top, bot])


def build_TA_mid(k: int, n: int, kind) -> np.ndarray:
    """Intermediate reduction with one identity factor peeled off."""
    a = driver_matrix(kind)
    sel_n = minbases.selector_matrices(k, n)
    sel_1 = minbases.selector_matrices(k, 1)
    eye_k = np.eye(k)
    eye_kn = np.eye(k * n)
    top = np.hstack(
        [np.kron(a.b * sel_n.f - a.d * sel_n.e, eye_k), -np.kron(eye_kn, sel_1.e)]
    )
    bot = np.hstack(
        [np.kron(a.a * sel_n.f - a.c * sel_n.e, eye_k), np.kron(eye_kn, sel_1.f)]
    )
    return np.vstack([top, bot])


def build_TA_reduced(k: int, kind) -> np.ndarray:
    """Fully reduced 2k^2 x 2k(k+1) matrix sharing every singular value of the
    full system matrix (each full singular value repeats n^2 times)."""
    a = driver_matrix(kind)
    sel = minbases.selector_matrices(k, 1)
    e, f = sel.e, sel.f
    eye = np.eye(k)
    top = np.hstack([np.kron(eye, a.b * f - a.d * e), -np.kron(e, eye)])
    bot = np.hstack([np.kron(eye, a.a * f - a.c * e), np.kron(f, eye)])
    return np.vstack([top, bot])


def reference_reduced(k: int) -> np.ndarray:
    """The all-positive reduced reference matrix every kind is sign/permutation
    equivalent to."""
    sel = minbases.selector_matrices(k, 1)
    e, f = sel.e, sel.f
    eye = np.eye(k)
    return np.vstack(
        [
            np.hstack([np.kron(eye, e), np.kron(e, eye)]),
            np.hstack([np.kron(eye, f), np.kron(f, eye)]),
        ]
    )


def sign_diagonals(k: int):
    """Alternating-sign diagonal pair used in the alternating-kind reduction."""
    s_k = np.diag([(-1.0) ** i for i in range(k)])
    s_k1 = np.diag([(-1.0) ** i for i in range(k + 1)])
    return s_k, s_k1


def build_delta_TA(sel: PerturbedSelectors, kind) -> np.ndarray:
    """Perturbation of the system matrix induced by the (2,1) blocks."""
    a = driver_matrix(kind)
    da21, db21 = sel.da21, sel.db21
    eye = np.eye(sel.k * sel.n)
    top = np.hstack(
        [np.kron(a.b * np.conj(db21) + a.d * np.conj(da21), eye), np.kron(eye, da21)]
    )
    bot = np.hstack(
        [np.kron(a.a * np.conj(db21) + a.c * np.conj(da21), eye), np.kron(eye, db21)]
    )
    return np.vstack([top, bot])


def delta_lower_bound(k: int, norm_dl: float) -> float:
    """Certified lower bound on the perturbed minimum singular value gap."""
    if not 0 <= norm_dl < 1.0 / (3.0 * k):
        raise ThresholdError(
            f"perturbation norm {norm_dl:.3e} not below 1/(3k) = {1.0 / (3 * k):.3e}",
            value=norm_dl,
            bound=1.0 / (3.0 * k),
        )
    return (math.pi / (4.0 * k)) * (1.0 - 3.0 * k * norm_dl)


# ---------------------------------------------------------------------------
# Minimum-norm solves
# ---------------------------------------------------------------------------

def _vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1, order="F")


def _unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v).reshape((rows, cols), order="F")


def _star(a: np.ndarray) -> np.ndarray:
    return np.conj(a.T) if np.iscomplexobj(a) else a.T


class _MinNormSolver:
    """SVD-backed pseudoinverse with a cutoff tied to the singular value gap."""

    def __init__(self, t: np.ndarray, delta: float):
        u, s, vt = np.linalg.svd(t, full_matrices=False)
        cutoff = max(delta * 1e-3, s[0] * 1e-14) if delta > 0 else s[0] * 1e-12
        keep = s > cutoff
        self.u = u[:, keep]
        self.s = s[keep]
        self.vt = vt[keep, :]
        self.t = t

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self.vt.conj().T @ ((self.u.conj().T @ b) / self.s)


def _solver_for(sel: PerturbedSelectors, kind):
    t = build_TA(sel.k, sel.n, kind) + build_delta_TA(sel, kind)
    delta = sigma_min_formula(sel.k) - float(np.linalg.norm(build_delta_TA(sel, kind), 2))
    if delta <= 0:
        raise ThresholdError(
            "perturbed system matrix may be rank deficient "
            f"(singular value gap {delta:.3e} <= 0)",
            value=delta,
            bound=0.0,
        )
    return _MinNormSolver(t, delta), delta


def _split_solution(x: np.ndarray, k: int, n: int):
    half = x.size // 2
    y = _unvec(x[:half], k * n, (k + 1) * n)
    zstar = _unvec(x[half:], (k + 1) * n, k * n)
    return y, _star(zstar)


def min_norm_sylvester_solve(
    kind,
    sel: PerturbedSelectors,
    c0: np.ndarray,
    c1: np.ndarray,
    tol: float = 1e-12,
):
    """Minimum Frobenius norm (Y, Z) solving the coupled Sylvester pair

        Y (b*fhat + d*ehat)^* + ehat Z^* = c0
        Y (a*fhat + c*ehat)^* + fhat Z^* = c1

    Requires a positive singular value gap; the solution obeys
    ||(Y, Z)||_F <= ||(c0, c1)||_F / delta and is residual-checked.
    """
    kn = sel.k * sel.n
    if c0.shape != (kn, kn) or c1.shape != (kn, kn):
        raise ValueError(f"right-hand sides must be {kn} square")
    solver, delta = _solver_for(sel, kind)
    b = np.concatenate([_vec(c0), _vec(c1)])
    x = solver.solve(b)
    resid = np.linalg.norm(solver.t @ x - b)
    scale = max(np.linalg.norm(b), 1e-300)
    if resid > tol * scale:
        raise NumericalError(
            f"Sylvester solve residual {resid:.3e} above {tol:.1e} relative"
        )
    return _split_solution(x, sel.k, sel.n)


def _star_sylvester_residual(
    x: np.ndarray,
    kind,
    sel: PerturbedSelectors,
    c0: np.ndarray,
    c1: np.ndarray,
):
    a = driver_matrix(kind)
    g0 = a.b * sel.fhat + a.d * sel.ehat
    g1 = a.a * sel.fhat + a.c * sel.ehat
    r0 = x @ _star(g0) + sel.ehat @ _star(x) - c0
    r1 = x @ _star(g1) + sel.fhat @ _star(x) - c1
    return pair_norm(r0, r1)


def star_from_sylvester(
    y: np.ndarray,
    z: np.ndarray,
    kind,
    sel: PerturbedSelectors,
    c0: np.ndarray,
    c1: np.ndarray,
    tol: float = 1e-12,
) -> np.ndarray:
    """Average a coupled-Sylvester solution pair into a star-Sylvester solution.

    Valid only when the right-hand pencil l*c1 + c0 carries the structure; the
    averaged matrix is verified against both star equations before returning.
    """
    rhs = from_coeff_list([c0, c1], COMPLEX if np.iscomplexobj(c0) else None)
    if not is_structured(rhs, kind, tol=1e-10):
        raise StructureError(
            "right-hand pencil must carry the structure for the averaging step"
        )
    x = (y + z) / 2.0
    resid = _star_sylvester_residual(x, kind, sel, c0, c1)
    scale = max(pair_norm(c0, c1), 1.0)
    if resid > tol * scale:
        raise NumericalError(
            f"star-Sylvester residual {resid:.3e} above {tol:.1e} relative"
        )
    return x


# ---------------------------------------------------------------------------
# Quadratic fixed point
# ---------------------------------------------------------------------------

@dataclass
class FixedPointState:
    """Outcome of the quadratic star-Sylvester iteration."""

    x: np.ndarray
    delta: float
    theta: float
    omega: float
    kappa1: float
    kappa: float
    rho0: float
    residuals: list = field(default_factory=list)
    x_norms: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def norm_bound(self) -> float:
        """Guaranteed bound 2*theta/delta on the solution norm."""
        return 2.0 * self.theta / self.delta if self.delta > 0 else math.inf


def _quad_residual(x, sel, kind, da22, db22, w0, w1):
    a = driver_matrix(kind)
    g0 = a.b * sel.fhat + a.d * sel.ehat
    g1 = a.a * sel.fhat + a.c * sel.ehat
    r0 = x @ _star(g0) + sel.ehat @ _star(x) + da22 + x @ w0 @ _star(x)
    r1 = x @ _star(g1) + sel.fhat @ _star(x) + db22 + x @ w1 @ _star(x)
    return pair_norm(r0, r1)


def quadratic_fixed_point(
    pert,
    m0: np.ndarray,
    m1: np.ndarray,
    kind,
    tol: float | None = None,
    max_iter: int = 100,
) -> FixedPointState:
    """Solve the quadratic star-Sylvester system that rezeroes the (2,2) block.

    ``pert`` is any object exposing the six natural perturbation blocks as
    attributes da11, db11, da21, db21, da22, db22 together with k and n.
    Each sweep solves the linearized coupled system at minimum norm and
    averages; admissibility requires delta > 0 and theta*omega/delta^2 < 1/4.
    """
    k, n = pert.k, pert.n
    sel = PerturbedSelectors.from_blocks(pert.da21, pert.db21, k, n)
    w0 = m0 + pert.da11
    w1 = m1 + pert.db11
    theta = pair_norm(pert.da22, pert.db22)
    omega = pair_norm(w0, w1)

    solver, delta = _solver_for(sel, kind)
    kappa1 = theta * omega / delta**2
    if kappa1 >= 0.25:
        raise ThresholdError(
            f"contraction condition violated: theta*omega/delta^2 = {kappa1:.3e} >= 1/4",
            value=kappa1,
            bound=0.25,
        )
    kappa = 0.0
    if kappa1 > 0:
        kappa = 2.0 * kappa1 / (1.0 - 2.0 * kappa1 + math.sqrt(1.0 - 4.0 * kappa1))
    if tol is None:
        tol = 1e-13 * max(1.0, theta)

    state = FixedPointState(
        x=np.zeros_like(sel.ehat),
        delta=delta,
        theta=theta,
        omega=omega,
        kappa1=kappa1,
        kappa=kappa,
        rho0=theta / delta,
    )

    b0 = np.concatenate([_vec(-pert.da22), _vec(-pert.db22)])
    y, z = _split_solution(solver.solve(b0), k, n)
    x = (y + z) / 2.0
    for it in range(1, max_iter + 1):
        resid = _quad_residual(x, sel, kind, pert.da22, pert.db22, w0, w1)
        state.x = x
        state.residuals.append(resid)
        state.x_norms.append(float(np.linalg.norm(x)))
        state.iterations = it
        if resid <= tol:
            state.converged = True
            return state
        rhs0 = -pert.da22 - x @ w0 @ _star(x)
        rhs1 = -pert.db22 - x @ w1 @ _star(x)
        b = np.concatenate([_vec(rhs0), _vec(rhs1)])
        y, z = _split_solution(solver.solve(b), k, n)
        x = (y + z) / 2.0
    raise ConvergenceError(
        f"fixed point did not reach {tol:.3e} in {max_iter} sweeps "
        f"(last residual {state.residuals[-1]:.3e})"
    )
