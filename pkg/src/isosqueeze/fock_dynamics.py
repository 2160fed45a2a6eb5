"""Exact pair-generation dynamics inside one energy-conserving subspace.

The pump-signal Hamiltonian conserves total optical energy, so the joint
state space splits into orthogonal invariant subspaces indexed by an integer
N >= 0.  Inside subspace N the real amplitude vector psi[n] (n counts signal
photon pairs, 0 <= n <= N) obeys the tridiagonal first-order system

    d psi[n] / d tau = sqrt(beta[n-1]) psi[n-1] - sqrt(beta[n]) psi[n+1]

with couplings beta[n] = (N - n)(2n + 1)(2n + 2), dimensionless time tau and
initial state psi[n] = delta(n, 0).  The generator is skew-symmetric, so the
evolution is norm preserving, and beta[N] = 0 guarantees it never leaves the
subspace.

Two independent evolution routes are provided: a fixed-step classical RK4
integrator (`integrate_subspace`) and exact exponentiation through a
tridiagonal eigendecomposition (`oracle_eigensolve`).  They share no code
beyond the coupling ladder, which makes them usable as mutual oracles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "AmplitudeKind",
    "SubspaceAmplitudes",
    "BetaLadder",
    "IntegratorConfig",
    "NormDriftExceeded",
    "TruncationTailExceeded",
    "DimensionCapExceeded",
    "beta_ladder",
    "integrate_subspace",
    "tau_for_squeezing",
    "oracle_eigensolve",
    "state_distance",
    "subspace_norm",
]

# RK4 is stable on the imaginary axis up to |h*lambda| = 2*sqrt(2); 2.8 leaves
# a small margin below that bound before the safety factor is applied.
_RK4_IMAG_STABILITY = 2.8


class AmplitudeKind(enum.Enum):
    """Provenance of a subspace amplitude vector."""

    NUMERIC = "numeric"
    ISOENERGETIC = "isoenergetic"
    PARAMETRIC = "parametric"


class NormDriftExceeded(RuntimeError):
    """The integrator lost more norm than the configured tolerance allows."""


class TruncationTailExceeded(RuntimeError):
    """Probability reached the truncated edge of a capped amplitude vector."""


class DimensionCapExceeded(ValueError):
    """Subspace too large for dense spectral decomposition."""


@dataclass(frozen=True)
class SubspaceAmplitudes:
    """Real amplitude vector over the pair index inside subspace N.

    ``amps[n]`` is the amplitude for n signal photon pairs (2n photons) and
    N - n remaining pump photons.  The vector has length N + 1 unless it was
    produced with an explicit pair-index cap.
    """

    N: int
    amps: np.ndarray
    kind: AmplitudeKind
    tau: float


@dataclass(frozen=True)
class BetaLadder:
    """Coupling strengths beta[n] = (N - n)(2n + 1)(2n + 2) for one subspace."""

    N: int
    beta: np.ndarray


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-size and truncation policy for `integrate_subspace`.

    step_count:
        Fixed number of RK4 steps.  When None, the count is derived from the
        spectral-radius bound 2*max(sqrt(beta)) and `safety_factor`.
    safety_factor:
        Fraction of the RK4 imaginary-axis stability limit to use, in (0, 1].
    pair_cap:
        Optional truncation of the pair index for exploratory large-N runs.
        The truncated generator is still skew-symmetric, so norm is conserved;
        error shows up as probability piling against the cut edge, which is
        monitored against `tail_threshold`.
    norm_drift_tolerance:
        Maximum |norm - 1| accepted for the returned state.
    """

    step_count: int | None = None
    safety_factor: float = 0.25
    pair_cap: int | None = None
    tail_threshold: float = 1e-10
    norm_drift_tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if not 0.0 < self.safety_factor <= 1.0:
            raise ValueError("safety_factor must lie in (0, 1]")
        if not 0.0 < self.tail_threshold < 1.0:
            raise ValueError("tail_threshold must lie in (0, 1)")
        if self.step_count is not None and self.step_count < 1:
            raise ValueError("step_count must be a positive integer")
        if self.pair_cap is not None and self.pair_cap < 1:
            raise ValueError("pair_cap must be a positive integer")


def beta_ladder(N: int) -> BetaLadder:
    """Full coupling vector for subspace N; beta[N] = 0 by construction."""
    if N < 0 or int(N) != N:
        raise ValueError("N must be a nonnegative integer")
    n = np.arange(N + 1, dtype=float)
    return BetaLadder(int(N), (N - n) * (2.0 * n + 1.0) * (2.0 * n + 2.0))


def tau_for_squeezing(N: int, r: float) -> float:
    """Dimensionless time at which subspace N reaches squeezing r = 2 sqrt(N) tau."""
    if N < 1 or int(N) != N:
        raise ValueError("N must be a positive integer")
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    return r / (2.0 * math.sqrt(N))


def _apply_generator(sqrt_beta: np.ndarray, psi: np.ndarray, out: np.ndarray) -> None:
    """out = A psi for the skew tridiagonal generator of one subspace slice."""
    top = psi.size - 1
    if top == 0:
        out[0] = 0.0
        return
    out[0] = -sqrt_beta[0] * psi[1]
    if top > 1:
        np.multiply(sqrt_beta[0:top - 1], psi[0:top - 1], out=out[1:top])
        out[1:top] -= sqrt_beta[1:top] * psi[2:top + 1]
    out[top] = sqrt_beta[top - 1] * psi[top - 1]


def _rk4_evolve(
    sqrt_beta: np.ndarray,
    psi: np.ndarray,
    tau: float,
    n_steps: int,
    sign: float = 1.0,
    tail_threshold: float | None = None,
) -> np.ndarray:
    """Advance psi by tau with n_steps classical RK4 steps.

    `sign` = -1 integrates the negated generator (time reversal).  When
    `tail_threshold` is set, the probability in the two topmost entries is
    checked each step.
    """
    h = sign * tau / n_steps
    k1 = np.empty_like(psi)
    k2 = np.empty_like(psi)
    k3 = np.empty_like(psi)
    k4 = np.empty_like(psi)
    tmp = np.empty_like(psi)
    for _ in range(n_steps):
        _apply_generator(sqrt_beta, psi, k1)
        np.multiply(k1, 0.5 * h, out=tmp); tmp += psi
        _apply_generator(sqrt_beta, tmp, k2)
        np.multiply(k2, 0.5 * h, out=tmp); tmp += psi
        _apply_generator(sqrt_beta, tmp, k3)
        np.multiply(k3, h, out=tmp); tmp += psi
        _apply_generator(sqrt_beta, tmp, k4)
        k2 += k3
        k1 += k4
        k1 += 2.0 * k2
        psi += (h / 6.0) * k1
        if tail_threshold is not None:
            edge = psi[-1] * psi[-1] + (psi[-2] * psi[-2] if psi.size > 1 else 0.0)
            if edge > tail_threshold:
                raise TruncationTailExceeded(
                    f"probability {edge:.3e} at the pair-index cap exceeds "
                    f"tail threshold {tail_threshold:.3e}"
                )
    return psi


def integrate_subspace(
    N: int,
    tau_final: float,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> SubspaceAmplitudes:
    """Evolve the one-pair-ladder initial state delta(n, 0) to tau_final.

    Uses fixed-step classical RK4 with the step chosen from the
    spectral-radius bound unless `cfg.step_count` overrides it.  Raises
    `NormDriftExceeded` if the result's norm deviates from 1 beyond the
    configured tolerance, and `TruncationTailExceeded` if a pair cap is set
    and probability reaches the cut edge.
    """
    if not math.isfinite(tau_final) or tau_final < 0.0:
        raise ValueError("tau_final must be finite and nonnegative")
    ladder = beta_ladder(N)
    dim = N + 1
    if cfg.pair_cap is not None and cfg.pair_cap < N:
        dim = cfg.pair_cap + 1
    sqrt_beta = np.sqrt(ladder.beta[: max(dim - 1, 1)])

    psi = np.zeros(dim)
    psi[0] = 1.0
    if tau_final == 0.0 or N == 0:
        return SubspaceAmplitudes(N, psi, AmplitudeKind.NUMERIC, tau_final)

    if cfg.step_count is not None:
        n_steps = cfg.step_count
    else:
        rho = 2.0 * float(np.max(sqrt_beta))
        n_steps = max(1, int(math.ceil(tau_final * rho / (cfg.safety_factor * _RK4_IMAG_STABILITY))))

    tail = cfg.tail_threshold if cfg.pair_cap is not None and cfg.pair_cap < N else None
    psi = _rk4_evolve(sqrt_beta, psi, tau_final, n_steps, tail_threshold=tail)

    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if drift > cfg.norm_drift_tolerance:
        raise NormDriftExceeded(
            f"norm drift {drift:.3e} exceeds tolerance {cfg.norm_drift_tolerance:.3e} "
            f"(N={N}, tau={tau_final}, steps={n_steps})"
        )
    return SubspaceAmplitudes(N, psi, AmplitudeKind.NUMERIC, tau_final)


def oracle_eigensolve(N: int, tau_final: float, dim_cap: int = 2000) -> SubspaceAmplitudes:
    """Evolve delta(n, 0) by exact exponentiation of the subspace generator.

    The skew generator A maps to a real symmetric tridiagonal matrix by the
    diagonal phase i**n, so the propagator follows from one call to
    `eigh_tridiagonal`.  Independent of the RK4 route; norm is exact up to
    floating round-off.  Dense decomposition, so N is capped.
    """
    if not math.isfinite(tau_final) or tau_final < 0.0:
        raise ValueError("tau_final must be finite and nonnegative")
    if N > dim_cap:
        raise DimensionCapExceeded(f"N={N} exceeds the dense eigensolve cap {dim_cap}")
    ladder = beta_ladder(N)
    if N == 0 or tau_final == 0.0:
        psi = np.zeros(N + 1)
        psi[0] = 1.0
        return SubspaceAmplitudes(N, psi, AmplitudeKind.NUMERIC, tau_final)

    sqrt_beta = np.sqrt(ladder.beta[:N])
    lam, vec = eigh_tridiagonal(np.zeros(N + 1), -sqrt_beta)
    psi = vec @ (np.exp(-1j * tau_final * lam) * vec[0, :])
    psi *= (-1j) ** np.arange(N + 1)
    residue = float(np.max(np.abs(psi.imag)))
    if residue > 1e-8:
        raise RuntimeError(f"spectral propagator left imaginary residue {residue:.3e}")
    return SubspaceAmplitudes(N, np.ascontiguousarray(psi.real), AmplitudeKind.NUMERIC, tau_final)


def subspace_norm(a: SubspaceAmplitudes) -> float:
    """Euclidean norm sqrt(sum amps**2)."""
    return float(np.linalg.norm(a.amps))


def state_distance(a: SubspaceAmplitudes, b: SubspaceAmplitudes) -> float:
    """Euclidean norm of the amplitude difference inside one subspace.

    Requires equal N; a shorter vector (from a pair-index cap) is zero-padded
    so all pair indices 0..N are compared.
    """
    if a.N != b.N:
        raise ValueError(f"mismatched subspace index: {a.N} != {b.N}")
    la, lb = a.amps.size, b.amps.size
    if la == lb:
        return float(np.linalg.norm(a.amps - b.amps))
    size = max(la, lb)
    diff = np.zeros(size)
    diff[:la] = a.amps
    diff[:lb] -= b.amps
    return float(np.linalg.norm(diff))
