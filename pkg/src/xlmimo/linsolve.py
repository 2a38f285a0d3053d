"""Solvers for P w = s with P Hermitian positive definite.

Direct Cholesky plus four iterative schemes: Gauss-Seidel, Jacobi
over-relaxation, conjugate gradient, and Jacobi-preconditioned CG.  All
solvers accept one right-hand side (shape (n,)) or several (shape (n, m))
and record a per-iteration least-square error trace
||P w^(t) - s||_F^2 / ||s||_F^2.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, NotHpdError, SplittingError

HERMITIAN_RTOL = 1e-12
CONDITION_SIZE_CAP = 512


@dataclass(frozen=True)
class HpdSystem:
    """A Hermitian positive-definite matrix with right-hand side(s)."""

    P: np.ndarray
    rhs: np.ndarray
    xi: float | None = None

    def __post_init__(self):
        P = np.asarray(self.P)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise NotHpdError(f"P must be square, got shape {P.shape}")
        rhs = np.asarray(self.rhs)
        if rhs.shape[0] != P.shape[0] or rhs.ndim not in (1, 2):
            raise NotHpdError(
                f"rhs shape {rhs.shape} incompatible with n={P.shape[0]}")
        scale = max(1.0, float(np.abs(P).max()))
        if not np.allclose(P, P.conj().T, atol=HERMITIAN_RTOL * scale, rtol=0):
            raise NotHpdError("P is not Hermitian to machine precision")

    @property
    def n(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class Splitting:
    """P = D + Lo + Up with D diagonal, Lo/Up strictly triangular."""

    D: np.ndarray
    Lo: np.ndarray
    Up: np.ndarray

    @classmethod
    def from_matrix(cls, P: np.ndarray) -> "Splitting":
        P = np.asarray(P)
        return cls(D=np.diag(np.diag(P)), Lo=np.tril(P, -1), Up=np.triu(P, 1))


@dataclass
class SolverOutcome:
    """Solution, iteration count, residual telemetry, and convergence flag."""

    w: np.ndarray
    iterations: int
    residual_trace: np.ndarray  # length iterations + 1; index 0 = initial guess
    converged: bool
    iterates: list = field(default_factory=list)  # populated on request only


def _prepare(sys: HpdSystem, w0):
    """Promote rhs/initial guess to 2-D working arrays."""
    s = np.asarray(sys.rhs, dtype=complex)
    was_1d = s.ndim == 1
    s2 = s[:, None] if was_1d else s
    if w0 is None:
        w = np.zeros_like(s2)
    else:
        w = np.asarray(w0, dtype=complex)
        w = w[:, None] if w.ndim == 1 else w
        if w.shape != s2.shape:
            raise ConfigurationError(
                f"w0 shape {w.shape} does not match rhs shape {s2.shape}")
        w = w.copy()
    snorm2 = float(np.vdot(s2, s2).real)
    return s2, w, was_1d, (snorm2 if snorm2 > 0 else 1.0)


def _ls_error(P, w, s2, snorm2) -> float:
    r = P @ w - s2
    return float(np.vdot(r, r).real / snorm2)


def _finish(w, was_1d, iterations, trace, converged, iterates):
    w_out = w[:, 0] if was_1d else w
    if was_1d:
        iterates = [x[:, 0] for x in iterates]
    return SolverOutcome(w=w_out, iterations=iterations,
                         residual_trace=np.asarray(trace),
                         converged=converged, iterates=iterates)


def _converged_flag(trace, eps) -> bool:
    if eps is not None:
        return np.sqrt(trace[-1]) <= eps
    return trace[-1] <= trace[0]


def direct_solve(sys: HpdSystem) -> SolverOutcome:
    """Exact solve via Cholesky P = M M^H; reference oracle for the iterative paths."""
    s2, _, was_1d, snorm2 = _prepare(sys, None)
    try:
        factor = scipy.linalg.cho_factor(np.asarray(sys.P, dtype=complex),
                                         lower=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NotHpdError(f"Cholesky breakdown: {exc}") from exc
    w = scipy.linalg.cho_solve(factor, s2)
    trace = [_ls_error(sys.P, w, s2, snorm2)]
    return _finish(w, was_1d, 0, trace, True, [])


def _check_diag(P) -> np.ndarray:
    d = np.diag(P)
    if np.any(d == 0):
        raise SplittingError(
            f"zero diagonal entry at index {int(np.argmin(np.abs(d)))}")
    return d


def gs_solve(sys: HpdSystem, T: int, w0=None, eps: float | None = None,
             keep_iterates: bool = False) -> SolverOutcome:
    """Gauss-Seidel sweeps, realized as forward substitution with (D + Lo)."""
    if T < 1:
        raise ConfigurationError(f"iteration count T must be >= 1, got {T}")
    P = np.asarray(sys.P, dtype=complex)
    _check_diag(P)
    s2, w, was_1d, snorm2 = _prepare(sys, w0)
    DL = np.tril(P)
    Up = np.triu(P, 1)
    trace = [_ls_error(P, w, s2, snorm2)]
    iterates = []
    it = 0
    for t in range(1, T + 1):
        w = scipy.linalg.solve_triangular(DL, s2 - Up @ w, lower=True)
        it = t
        trace.append(_ls_error(P, w, s2, snorm2))
        if keep_iterates:
            iterates.append(w.copy())
        if eps is not None and np.sqrt(trace[-1]) <= eps:
            break
    return _finish(w, was_1d, it, trace, _converged_flag(trace, eps), iterates)


def jor_solve(sys: HpdSystem, T: int, omega: float = 0.5, w0=None,
              eps: float | None = None,
              keep_iterates: bool = False) -> SolverOutcome:
    """Jacobi over-relaxation: w <- w + omega * D^{-1} (s - P w)."""
    if T < 1:
        raise ConfigurationError(f"iteration count T must be >= 1, got {T}")
    if omega <= 0:
        raise ConfigurationError(f"relaxation omega must be positive, got {omega}")
    P = np.asarray(sys.P, dtype=complex)
    d = _check_diag(P)[:, None]
    s2, w, was_1d, snorm2 = _prepare(sys, w0)
    trace = [_ls_error(P, w, s2, snorm2)]
    iterates = []
    it = 0
    for t in range(1, T + 1):
        w = w + omega * ((s2 - P @ w) / d)
        it = t
        trace.append(_ls_error(P, w, s2, snorm2))
        if keep_iterates:
            iterates.append(w.copy())
        if eps is not None and np.sqrt(trace[-1]) <= eps:
            break
    return _finish(w, was_1d, it, trace, _converged_flag(trace, eps), iterates)


def _col_dot(a, b) -> np.ndarray:
    return np.einsum("ij,ij->j", a.conj(), b).real


def cg_solve(sys: HpdSystem, T: int, eps: float | None = None, w0=None,
             keep_iterates: bool = False) -> SolverOutcome:
    """Classical conjugate gradient; exact within n iterations in exact arithmetic."""
    return _pcg_core(sys, T, eps, w0, precond_diag=None, keep_iterates=keep_iterates,
                     variant="cg")


def jacpcg_solve(sys: HpdSystem, T: int, eps: float | None = None, w0=None,
                 precond_diag=None, keep_iterates: bool = False,
                 variant: str = "algorithm") -> SolverOutcome:
    """Diagonally preconditioned CG with C = diag(P) by default.

    `variant="algorithm"` runs the recurrences on the preconditioned residual
    r = C^{-1}(s - P w) with beta = r+^H r+ / r^H r; `variant="textbook"`
    runs standard PCG with the r^H z inner products.  Both coincide for C = I.
    Pass `precond_diag` to override the preconditioner (e.g. ones for C = I).
    """
    P = np.asarray(sys.P)
    if precond_diag is None:
        c = np.diag(P).real.copy()
    else:
        c = np.asarray(precond_diag, dtype=float).copy()
    if np.any(c == 0):
        raise SplittingError(
            f"preconditioner has zero diagonal entry at index "
            f"{int(np.argmin(np.abs(c)))}")
    if variant not in ("algorithm", "textbook"):
        raise ConfigurationError(f"unknown PCG variant {variant!r}")
    if variant == "textbook":
        return _pcg_textbook(sys, T, eps, w0, c, keep_iterates)
    return _pcg_core(sys, T, eps, w0, precond_diag=c,
                     keep_iterates=keep_iterates, variant="pcg")


def _pcg_core(sys, T, eps, w0, precond_diag, keep_iterates, variant):
    # CG and the preconditioned recurrence share one loop so that C = I
    # reproduces CG bit-for-bit (dividing by 1.0 is exact).
    if T < 1:
        raise ConfigurationError(f"iteration count T must be >= 1, got {T}")
    P = np.asarray(sys.P, dtype=complex)
    s2, w, was_1d, snorm2 = _prepare(sys, w0)
    if variant == "pcg":
        c_col = precond_diag[:, None]
        r = (s2 - P @ w) / c_col
    else:
        r = s2 - P @ w
    m = r.copy()
    rr = _col_dot(r, r)
    trace = [_ls_error(P, w, s2, snorm2)]
    iterates = []
    it = 0
    for t in range(1, T + 1):
        if not np.any(rr > 0):
            break
        Pm = P @ m
        z = (Pm / c_col) if variant == "pcg" else Pm
        curv = _col_dot(m, z)
        if np.any((curv <= 0) & (rr > 0)):
            raise NotHpdError(
                "nonpositive direction curvature encountered; P is not HPD")
        alpha = np.where(rr > 0, rr / np.where(curv > 0, curv, 1.0), 0.0)
        w = w + alpha * m
        r = r - alpha * z
        rr_new = _col_dot(r, r)
        beta = np.where(rr > 0, rr_new / np.where(rr > 0, rr, 1.0), 0.0)
        m = r + beta * m
        rr = rr_new
        it = t
        trace.append(_ls_error(P, w, s2, snorm2))
        if keep_iterates:
            iterates.append(w.copy())
        if eps is not None and np.sqrt(trace[-1]) <= eps:
            break
    return _finish(w, was_1d, it, trace, _converged_flag(trace, eps), iterates)


def _pcg_textbook(sys, T, eps, w0, c, keep_iterates):
    if T < 1:
        raise ConfigurationError(f"iteration count T must be >= 1, got {T}")
    P = np.asarray(sys.P, dtype=complex)
    s2, w, was_1d, snorm2 = _prepare(sys, w0)
    c_col = c[:, None]
    r = s2 - P @ w
    z = r / c_col
    m = z.copy()
    rz = np.einsum("ij,ij->j", r.conj(), z).real
    trace = [_ls_error(P, w, s2, snorm2)]
    iterates = []
    it = 0
    for t in range(1, T + 1):
        if not np.any(rz > 0):
            break
        Pm = P @ m
        curv = _col_dot(m, Pm)
        if np.any((curv <= 0) & (rz > 0)):
            raise NotHpdError(
                "nonpositive direction curvature encountered; P is not HPD")
        alpha = np.where(rz > 0, rz / np.where(curv > 0, curv, 1.0), 0.0)
        w = w + alpha * m
        r = r - alpha * Pm
        z = r / c_col
        rz_new = np.einsum("ij,ij->j", r.conj(), z).real
        beta = np.where(rz > 0, rz_new / np.where(rz > 0, rz, 1.0), 0.0)
        m = z + beta * m
        rz = rz_new
        it = t
        trace.append(_ls_error(P, w, s2, snorm2))
        if keep_iterates:
            iterates.append(w.copy())
        if eps is not None and np.sqrt(trace[-1]) <= eps:
            break
    return _finish(w, was_1d, it, trace, _converged_flag(trace, eps), iterates)


def condition_number(P: np.ndarray) -> float:
    """Spectral condition number lambda_max / lambda_min of an HPD matrix."""
    P = np.asarray(P)
    if P.shape[0] > CONDITION_SIZE_CAP:
        raise ConfigurationError(
            f"dense condition number capped at n={CONDITION_SIZE_CAP}, "
            f"got n={P.shape[0]}")
    vals = np.linalg.eigvalsh(P)
    if vals[0] <= 0:
        raise NotHpdError(f"min eigenvalue {vals[0]:.3e} is not positive")
    return float(vals[-1] / vals[0])


ITERATIVE_SOLVERS = {
    "gs": gs_solve,
    "jor": jor_solve,
    "cg": cg_solve,
    "jacpcg": jacpcg_solve,
}
