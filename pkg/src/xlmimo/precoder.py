"""RZF precoding per channel block, direct or via the iterative solvers.

Each block i gets G_i = beta_i * H_i (H_i^H H_i + xi I)^{-1} with beta_i
enforcing tr(G_i^H G_i) = power.  The iterative variant materializes the
approximate inverse column by column so per-user precoding vectors exist for
the SINR evaluation; beta is computed from the approximate solution.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AssemblyError, ConfigurationError, DegenerateChannelError
from .linsolve import ITERATIVE_SOLVERS, HpdSystem, direct_solve

SOLVER_NAMES = ("direct", "gs", "jor", "cg", "jacpcg")


@dataclass(frozen=True)
class PrecoderBlock:
    """One block's precoder G = beta * F with F = H P^{-1} (possibly approximate)."""

    G: np.ndarray
    F: np.ndarray
    beta: float


@dataclass(frozen=True)
class BlockPrecoder:
    """Stacked precoder for the S=3, L=2 topology with per-block power control."""

    G1: np.ndarray
    Gc: np.ndarray
    G2: np.ndarray
    beta_1: float
    beta_c: float
    beta_2: float
    G: np.ndarray  # (M, K) stacked with exact zero blocks

    @property
    def K1(self) -> int:
        return self.G1.shape[1]

    @property
    def Gc1(self) -> np.ndarray:
        return self.Gc[:, :self.K1]

    @property
    def Gc2(self) -> np.ndarray:
        return self.Gc[:, self.K1:]


def gram_regularized(H: np.ndarray, xi: float) -> HpdSystem:
    """P = H^H H + xi I, symmetrized; rhs defaults to the identity columns."""
    if xi <= 0:
        raise ConfigurationError(f"regularization xi must be positive, got {xi}")
    H = np.asarray(H, dtype=complex)
    n = H.shape[1]
    P = H.conj().T @ H + xi * np.eye(n)
    P = (P + P.conj().T) / 2.0
    return HpdSystem(P=P, rhs=np.eye(n, dtype=complex), xi=xi)


def _power_scale(H, F, power):
    tr = float(np.vdot(F, F).real)
    if tr <= 0:
        raise DegenerateChannelError(
            "tr(F^H F) = 0; channel block carries no energy")
    beta = float(np.sqrt(power / tr))
    return PrecoderBlock(G=beta * F, F=F, beta=beta)


def rzf_direct(H: np.ndarray, xi: float, power: float) -> PrecoderBlock:
    """Exact RZF block via Cholesky solves."""
    sys = gram_regularized(H, xi)
    Pinv = direct_solve(sys).w
    F = np.asarray(H, dtype=complex) @ Pinv
    return _power_scale(H, F, power)


def rzf_iterative(H: np.ndarray, xi: float, power: float, solver: str = "jacpcg",
                  T: int = 5, omega: float = 0.5,
                  eps: float | None = None,
                  pcg_variant: str = "algorithm") -> PrecoderBlock:
    """Approximate RZF block: solve P x_j = e_j for each column with T iterations."""
    if T < 1:
        raise ConfigurationError(f"iteration count T must be >= 1, got {T}")
    out = solve_iterative(gram_regularized(H, xi), solver, T, omega=omega,
                          eps=eps, pcg_variant=pcg_variant)
    F = np.asarray(H, dtype=complex) @ out.w
    return _power_scale(H, F, power)


def solve_iterative(sys: HpdSystem, solver: str, T: int, omega: float = 0.5,
                    eps: float | None = None, pcg_variant: str = "algorithm",
                    **kwargs):
    """Dispatch P w = s to the named iterative scheme (per-symbol path)."""
    if solver not in ITERATIVE_SOLVERS:
        raise ConfigurationError(
            f"unknown solver {solver!r}; expected one of {sorted(ITERATIVE_SOLVERS)}")
    if solver == "jor":
        return ITERATIVE_SOLVERS[solver](sys, T, omega=omega, eps=eps, **kwargs)
    if solver == "jacpcg":
        return ITERATIVE_SOLVERS[solver](sys, T, eps=eps, variant=pcg_variant,
                                         **kwargs)
    return ITERATIVE_SOLVERS[solver](sys, T, eps=eps, **kwargs)


def rzf_block(H, xi, power, method: str, T: int = 5, omega: float = 0.5,
              pcg_variant: str = "algorithm") -> PrecoderBlock:
    """Build one block with either the direct or an iterative method."""
    if method == "direct":
        return rzf_direct(H, xi, power)
    return rzf_iterative(H, xi, power, solver=method, T=T, omega=omega,
                         pcg_variant=pcg_variant)


def assemble_precoder(block1: PrecoderBlock, blockc: PrecoderBlock,
                      block2: PrecoderBlock) -> BlockPrecoder:
    """Stack per-block precoders into the M x K matrix with zero blocks."""
    G1, Gc, G2 = block1.G, blockc.G, block2.G
    M1, K1 = G1.shape
    Mc, K = Gc.shape
    M2, K2 = G2.shape
    if K != K1 + K2:
        raise AssemblyError(
            f"central precoder has {K} columns, expected K1+K2 = {K1 + K2}")
    G = np.zeros((M1 + Mc + M2, K), dtype=complex)
    G[:M1, :K1] = G1
    G[M1:M1 + Mc, :] = Gc
    G[M1 + Mc:, K1:] = G2
    return BlockPrecoder(G1=G1, Gc=Gc, G2=G2, beta_1=block1.beta,
                         beta_c=blockc.beta, beta_2=block2.beta, G=G)


def build_precoder(realization, xi: float, power: float, method: str,
                   T: int = 5, omega: float = 0.5,
                   pcg_variant: str = "algorithm") -> BlockPrecoder:
    """All three blocks of Eq.-6 structure for one channel realization."""
    b1 = rzf_block(realization.H1, xi, power, method, T=T, omega=omega,
                   pcg_variant=pcg_variant)
    bc = rzf_block(realization.Hc, xi, power, method, T=T, omega=omega,
                   pcg_variant=pcg_variant)
    b2 = rzf_block(realization.H2, xi, power, method, T=T, omega=omega,
                   pcg_variant=pcg_variant)
    return assemble_precoder(b1, bc, b2)
