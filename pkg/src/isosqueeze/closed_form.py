"""Closed-form amplitude families and their norm and tail results, in log domain.

Three families share the squeezed-vacuum shape over the pair index n,

    sqrt(sech g) * binom(2n, n)**0.5 * (tanh(g) / 2)**n :

* `squeezed_amplitude`: the shape itself at a uniform squeezing g,
* `isoenergetic_amplitudes`: subspace N carries its own g = 2 sqrt(N) tau,
* `parametric_projection_amplitudes`: uniform g = 2 alpha tau plus the
  pump-depletion factor sqrt((N)_n) / alpha**n left by projecting a coherent
  pump onto subspace N.

All binomials and falling factorials go through log-gamma and exponentiation
is deferred to the very end: (tanh g)**(2n) with n of order 1e5 underflows a
direct float long before the physics becomes negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .fock_dynamics import AmplitudeKind, SubspaceAmplitudes

__all__ = [
    "LogAmplitude",
    "log_tanh",
    "log_sech",
    "log_cosh",
    "squeezed_amplitude",
    "squeezed_log_amplitudes",
    "isoenergetic_amplitudes",
    "parametric_projection_amplitudes",
    "projection_cutoff",
    "tail_norm_deficit_closed",
    "tail_norm_deficit_closed_log",
    "tail_norm_deficit_direct",
    "tail_norm_deficit_direct_log",
    "parametric_norm_exact",
    "parametric_norm_first_order",
    "parametric_norm_msq_deviation",
    "parametric_norm_msq_deviation_direct",
]

_LN2 = math.log(2.0)


def log_tanh(r: float) -> float:
    """ln tanh r, written so that 1 - tanh r ~ 2 exp(-2r) keeps full precision."""
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    if r == 0.0:
        return -math.inf
    e = math.exp(-2.0 * r)
    return math.log1p(-e) - math.log1p(e)


def log_sech(r: float) -> float:
    """ln sech r without overflow at large r."""
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    return _LN2 - r - math.log1p(math.exp(-2.0 * r))


def log_cosh(r: float) -> float:
    return -log_sech(r)


@dataclass(frozen=True)
class LogAmplitude:
    """Sign and natural log of the magnitude of one amplitude."""

    sign: int
    log_abs: float

    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


def _log_binom_central(n: np.ndarray) -> np.ndarray:
    """ln binom(2n, n) via log-gamma."""
    return gammaln(2.0 * n + 1.0) - 2.0 * gammaln(n + 1.0)


def squeezed_log_amplitudes(r: float, n_max: int) -> np.ndarray:
    """Vector of ln |amplitude of 2n photons| in the squeezed family, n = 0..n_max.

    At r = 0 the 0**0 = 1 convention makes the result the vacuum: entry 0 is
    ln 1 and every other entry is -inf.
    """
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    n = np.arange(n_max + 1, dtype=float)
    if r == 0.0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = 0.0
        return out
    return 0.5 * log_sech(r) + 0.5 * _log_binom_central(n) + n * (log_tanh(r) - _LN2)


def squeezed_amplitude(n: int, r: float) -> LogAmplitude:
    """Amplitude of the 2n-photon component of the squeezed family."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    if r < 0.0:
        raise ValueError("r must be nonnegative")
    if r == 0.0:
        return LogAmplitude(1, 0.0) if n == 0 else LogAmplitude(0, -math.inf)
    log_abs = float(squeezed_log_amplitudes(r, n)[n]) if n <= 1 else (
        0.5 * log_sech(r)
        + 0.5 * float(gammaln(2.0 * n + 1) - 2.0 * gammaln(n + 1.0))
        + n * (log_tanh(r) - _LN2)
    )
    return LogAmplitude(1, log_abs)


def isoenergetic_amplitudes(N: int, tau: float) -> SubspaceAmplitudes:
    """Leading-order closed-form amplitudes in subspace N at time tau.

    Squeezed shape with the subspace's own parameter g = 2 sqrt(N) tau,
    truncated to 0 <= n <= N (so the norm is <= 1; the discarded tail is
    negligible until g approaches ln N scale).
    """
    if N < 1 or int(N) != N:
        raise ValueError("N must be a positive integer")
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    r_n = 2.0 * math.sqrt(N) * tau
    amps = np.exp(squeezed_log_amplitudes(r_n, N))
    return SubspaceAmplitudes(int(N), amps, AmplitudeKind.ISOENERGETIC, tau)


def parametric_projection_amplitudes(
    N: int,
    alpha: float,
    r: float,
    pump_weight: str = "amplitude",
) -> SubspaceAmplitudes:
    """Projection of coherent pump times squeezed signal onto subspace N.

    The squeezed shape at uniform r picks up the pump-depletion factor
    sqrt((N)_n) / alpha**n, with the falling factorial (N)_n = N!/(N-n)! in
    log domain.

    pump_weight selects how the depletion factor enters the amplitude:
    "amplitude" applies sqrt((N)_n)/alpha**n (the projection identity);
    "probability" applies (N)_n/alpha**(2n) un-rooted, which is the
    convention behind the reference benchmark table.
    """
    if N < 0 or int(N) != N:
        raise ValueError("N must be a nonnegative integer")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    power = {"amplitude": 0.5, "probability": 1.0}.get(pump_weight)
    if power is None:
        raise ValueError("pump_weight must be 'amplitude' or 'probability'")
    n = np.arange(N + 1, dtype=float)
    log_fall = gammaln(N + 1.0) - gammaln(N - n + 1.0)
    log_amps = squeezed_log_amplitudes(r, N) + 2.0 * power * (0.5 * log_fall - n * math.log(alpha))
    tau = r / (2.0 * alpha)
    return SubspaceAmplitudes(int(N), np.exp(log_amps), AmplitudeKind.PARAMETRIC, tau)


def projection_cutoff(N: int, eps: float) -> int:
    """Largest pair index n = floor(sqrt(eps N)) resolved to relative error eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if eps * N < 1.0:
        raise ValueError(
            f"eps*N = {eps * N:.3g} < 1: the asymptotic regime needs at least one "
            "resolvable pair index; increase N or eps"
        )
    return int(math.floor(math.sqrt(eps * N)))


def tail_norm_deficit_closed_log(r_n: float, n_cut: int) -> float:
    """ln of the closed-form probability discarded beyond pair index n_cut."""
    if n_cut < 1 or int(n_cut) != n_cut:
        raise ValueError("n_cut must be a positive integer")
    if r_n < 0.0:
        raise ValueError("r_n must be nonnegative")
    if r_n == 0.0:
        return -math.inf
    return log_cosh(r_n) + 2.0 * n_cut * log_tanh(r_n) - 0.5 * math.log(math.pi * n_cut)


def tail_norm_deficit_closed(r_n: float, n_cut: int) -> float:
    """Closed form cosh(g) tanh(g)**(2 n_cut) / sqrt(pi n_cut) of the tail weight.

    Underflows to 0.0 when the log form drops below float range; use
    `tail_norm_deficit_closed_log` for such regimes.
    """
    return math.exp(tail_norm_deficit_closed_log(r_n, n_cut)) if r_n > 0.0 else 0.0


_TAIL_REL_CUTOFF = 1e-20
_TAIL_MAX_TERMS = 2_000_000


def tail_norm_deficit_direct_log(r_n: float, n_cut: int) -> float:
    """ln of the directly summed squared-amplitude weight beyond n_cut.

    Terms are generated by the exact ratio recurrence
    t[n+1]/t[n] = tanh(g)**2 (2n+1)/(2n+2), collected until they fall below
    1e-20 of the leading term, and accumulated with exact compensated
    summation from the small end.  Serves as the oracle for the closed form.
    """
    if n_cut < 1 or int(n_cut) != n_cut:
        raise ValueError("n_cut must be a positive integer")
    if r_n < 0.0:
        raise ValueError("r_n must be nonnegative")
    if r_n == 0.0:
        return -math.inf
    t2 = math.exp(2.0 * log_tanh(r_n))
    m = n_cut + 1
    log_first = (
        log_sech(r_n)
        + float(gammaln(2.0 * m + 1.0) - 2.0 * gammaln(m + 1.0))
        + 2.0 * m * (log_tanh(r_n) - _LN2)
    )
    rel_terms = [1.0]
    term = 1.0
    n = m
    while True:
        term *= t2 * (2.0 * n + 1.0) / (2.0 * n + 2.0)
        if term < _TAIL_REL_CUTOFF:
            break
        rel_terms.append(term)
        n += 1
        if n - m > _TAIL_MAX_TERMS:
            raise RuntimeError(
                f"tail sum did not converge within {_TAIL_MAX_TERMS} terms (r_n={r_n})"
            )
    return log_first + math.log(math.fsum(reversed(rel_terms)))


def tail_norm_deficit_direct(r_n: float, n_cut: int) -> float:
    """Directly summed tail weight; 0.0 when it underflows float range."""
    log_val = tail_norm_deficit_direct_log(r_n, n_cut)
    return math.exp(log_val) if log_val > -745.0 else 0.0


def parametric_norm_exact(
    N: int,
    alpha: float,
    r: float,
    pump_weight: str = "amplitude",
) -> float:
    """Exact squared norm of the parametric projection onto subspace N.

    Evaluates sech(r) * sum_n binom(N, n) (2n)!/n! (tanh(r)/(2 alpha))**(2n)
    by log-domain summation.  `pump_weight` must match the amplitude variant
    it is compared against; the sum above corresponds to "amplitude".
    """
    if N < 0 or int(N) != N:
        raise ValueError("N must be a nonnegative integer")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    power = {"amplitude": 1.0, "probability": 2.0}.get(pump_weight)
    if power is None:
        raise ValueError("pump_weight must be 'amplitude' or 'probability'")
    if r == 0.0:
        return 1.0
    n = np.arange(N + 1, dtype=float)
    log_fall = gammaln(N + 1.0) - gammaln(N - n + 1.0)
    log_terms = (
        log_sech(r)
        + _log_binom_central(n)
        + 2.0 * n * (log_tanh(r) - _LN2)
        + power * (log_fall - 2.0 * n * math.log(alpha))
    )
    return float(np.exp(logsumexp(log_terms)))


def parametric_norm_first_order(N: int, alpha: float, r: float) -> float:
    """First-order squared norm 1 + sinh(r)**2 / 2 * (N/alpha**2 - 1)."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    return 1.0 + 0.5 * math.sinh(r) ** 2 * (N / alpha**2 - 1.0)


def parametric_norm_msq_deviation(alpha: float, r: float) -> float:
    """Leading mean-square norm deviation sinh(r)**4 / (4 alpha**2)."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    return math.sinh(r) ** 4 / (4.0 * alpha**2)


def parametric_norm_msq_deviation_direct(
    alpha: float,
    r: float,
    half_width_sigmas: float = 12.0,
) -> float:
    """Poisson average of (1 - exact norm)**2 over subspaces around alpha**2.

    Validation oracle for `parametric_norm_msq_deviation` at moderate alpha;
    the subspace range alpha**2 +- half_width_sigmas*alpha carries all but
    ~exp(-half_width_sigmas**2/2) of the weight.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    center = alpha**2
    lo = max(0, int(math.floor(center - half_width_sigmas * alpha)))
    hi = int(math.ceil(center + half_width_sigmas * alpha))
    ns = np.arange(lo, hi + 1, dtype=float)
    log_p = -center + 2.0 * ns * math.log(alpha) - gammaln(ns + 1.0)
    weights = np.exp(log_p)
    deviations = np.array(
        [(1.0 - parametric_norm_exact(int(n), alpha, r)) ** 2 for n in range(lo, hi + 1)]
    )
    return float(math.fsum(weights * deviations))
