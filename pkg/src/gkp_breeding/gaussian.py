"""Exact Gaussian-formalism oracle: symplectic phase-space evolution, the
closed-form wavefunction precision matrices of the two heralding setups, and
the closed-form heralding probabilities / two-peak approximation fidelity.

Phase-space ordering is (x1, p1[, x2, p2]); vacuum covariance is I/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, exp, lgamma, log, pi, sqrt

import numpy as np

from .errors import ValidationError

GATE_KINDS = ("squeeze", "displace", "rotate", "beamsplitter", "qnd", "quadratic_phase")
SINGLE_MODE_KINDS = ("squeeze", "displace", "rotate", "quadratic_phase")
TWO_MODE_KINDS = ("beamsplitter", "qnd")


@dataclass(frozen=True)
class GateSpec:
    """One Gaussian gate: kind and its single real parameter.

    squeeze Δ:          x -> x/Δ, p -> Δ p              (Δ > 0)
    displace d:         x -> x + d
    rotate θ:           x -> cosθ x + sinθ p
    beamsplitter T:     transmittance-T mixing of two modes (0 <= T <= 1)
    qnd g:              x1 -> x1 + g x2, p2 -> p2 - g p1
    quadratic_phase b:  p -> p + 2b x (multiplies the x-wavefunction by e^{i b x²})
    """

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if self.kind == "squeeze" and not self.parameter > 0:
            raise ValidationError("squeeze parameter must be positive")
        if self.kind == "beamsplitter" and not 0.0 <= self.parameter <= 1.0:
            raise ValidationError("beamsplitter transmittance must be in [0, 1]")


@dataclass(frozen=True)
class GaussianState:
    """First and second moments: mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if mean.size % 2 != 0:
            raise ValidationError("mean vector length must be even")
        if cov.shape != (mean.size, mean.size):
            raise ValidationError("covariance shape does not match mean")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValidationError("covariance must be symmetric")

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def satisfies_uncertainty(self, tol: float = 1e-10) -> bool:
        """cov + (i/2)Ω >= 0, checked through eigenvalues."""
        omega = symplectic_form(self.n_modes)
        evals = np.linalg.eigvalsh(self.cov + 0.5j * omega)
        return bool(np.min(evals.real) >= -tol)


@dataclass(frozen=True)
class PrecisionMatrix:
    """2x2 symmetric positive-definite quadratic form of an x-wavefunction,
    ψ(x1, x2) ∝ exp(-x^T σ x / 2)."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float)
        object.__setattr__(self, "sigma", s)
        if s.shape != (2, 2) or not np.allclose(s, s.T, atol=1e-12):
            raise ValidationError("sigma must be a symmetric 2x2 matrix")
        if np.linalg.eigvalsh(s).min() <= 0:
            raise ValidationError("sigma must be positive definite")


def symplectic_form(n_modes: int) -> np.ndarray:
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for m in range(n_modes):
        out[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = omega1
    return out


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def _single_mode_symplectic(gate: GateSpec) -> tuple[np.ndarray, np.ndarray]:
    v = gate.parameter
    if gate.kind == "squeeze":
        return np.diag([1.0 / v, v]), np.zeros(2)
    if gate.kind == "displace":
        return np.eye(2), np.array([v, 0.0])
    if gate.kind == "rotate":
        c, s = np.cos(v), np.sin(v)
        return np.array([[c, s], [-s, c]]), np.zeros(2)
    if gate.kind == "quadratic_phase":
        return np.array([[1.0, 0.0], [2.0 * v, 1.0]]), np.zeros(2)
    raise ValidationError(f"{gate.kind} is not single-mode")


def _two_mode_symplectic(gate: GateSpec) -> tuple[np.ndarray, np.ndarray]:
    v = gate.parameter
    s = np.eye(4)
    if gate.kind == "beamsplitter":
        rt, tt = sqrt(1.0 - v), sqrt(v)
        # x1 -> √R x1 - √T x2 and likewise for p (passive, phase-free mixing)
        for off in (0, 1):
            s[0 + off, 0 + off] = rt
            s[0 + off, 2 + off] = -tt
            s[2 + off, 0 + off] = tt
            s[2 + off, 2 + off] = rt
        return s, np.zeros(4)
    if gate.kind == "qnd":
        s[0, 2] = v   # x1 += g x2
        s[3, 1] = -v  # p2 -= g p1
        return s, np.zeros(4)
    raise ValidationError(f"{gate.kind} is not two-mode")


def symplectic_of(gate: GateSpec, modes: tuple[int, ...], n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic matrix and phase-space shift of a gate embedded in n_modes."""
    if gate.kind in SINGLE_MODE_KINDS:
        if len(modes) != 1:
            raise ValidationError(f"{gate.kind} acts on exactly one mode")
        s1, d1 = _single_mode_symplectic(gate)
        s = np.eye(2 * n_modes)
        d = np.zeros(2 * n_modes)
        (m,) = modes
        s[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = s1
        d[2 * m : 2 * m + 2] = d1
        return s, d
    if len(modes) != 2:
        raise ValidationError(f"{gate.kind} acts on exactly two modes")
    s2, d2 = _two_mode_symplectic(gate)
    s = np.eye(2 * n_modes)
    d = np.zeros(2 * n_modes)
    idx = [2 * modes[0], 2 * modes[0] + 1, 2 * modes[1], 2 * modes[1] + 1]
    s[np.ix_(idx, idx)] = s2
    d[idx] = d2
    return s, d


def evolve(state: GaussianState, gate: GateSpec, modes: tuple[int, ...] = (0,)) -> GaussianState:
    """mean -> S mean + shift, cov -> S cov S^T."""
    s, d = symplectic_of(gate, modes, state.n_modes)
    return GaussianState(s @ state.mean + d, s @ state.cov @ s.T)


# ---------------------------------------------------------------------------
# closed-form precision matrices of the two heralding setups


def precision_after_bs(delta1: float, delta2: float, transmittance: float) -> PrecisionMatrix:
    """Quadratic form of B(T) |S_Δ1⟩|S_Δ2⟩ in the x representation."""
    if delta1 <= 0 or delta2 <= 0:
        raise ValidationError("squeezing parameters must be positive")
    if not 0.0 <= transmittance <= 1.0:
        raise ValidationError("transmittance must be in [0, 1]")
    t, r = transmittance, 1.0 - transmittance
    d1s, d2s = delta1**2, delta2**2
    off = sqrt(r * t) * (d1s - d2s)
    return PrecisionMatrix(np.array([[r * d1s + t * d2s, off], [off, t * d1s + r * d2s]]))


def precision_after_qnd(delta1: float, delta2: float, delta3: float, g: float) -> PrecisionMatrix:
    """Quadratic form of S2(Δ3) Q(g) |S_Δ1⟩|S_Δ2⟩ in the x representation."""
    if min(delta1, delta2, delta3) <= 0:
        raise ValidationError("squeezing parameters must be positive")
    d1s = delta1**2
    off = -g * d1s * delta3
    return PrecisionMatrix(
        np.array([[d1s, off], [off, (delta2**2 + g**2 * d1s) * delta3**2]])
    )


def delta_c(sigma: PrecisionMatrix) -> float:
    """Peak squeezing of the heralded state: Δ_c = sqrt(det σ + σ11)."""
    s = sigma.sigma
    return sqrt(float(np.linalg.det(s)) + float(s[0, 0]))


# ---------------------------------------------------------------------------
# closed-form heralding probability and two-peak approximation fidelity


def herald_t_quadratic(g: float, delta1: float, delta2: float) -> float:
    """t = g² Δ1²/Δ2².  This mapping matches the simulated heralding
    probability (see tests/test_acceptance.py for the numerical comparison)."""
    return g * g * delta1 * delta1 / (delta2 * delta2)


def herald_t_linear(g: float, delta1: float, delta2: float) -> float:
    """t = g² Δ1/Δ2, the rival parameterization; kept for the documented
    comparison against the brute-force probability."""
    return g * g * delta1 / delta2


def closed_form_pn(n: int, t: float) -> float:
    """P(n) = √2 (2n)!/(4^n n!²) t^n (t+2)^(-n-1/2), evaluated in log space."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if t < 0:
        raise ValidationError("t must be nonnegative")
    if n > 0 and t == 0.0:
        return 0.0
    lp = 0.5 * log(2.0) + lgamma(2 * n + 1) - n * log(4.0) - 2 * lgamma(n + 1)
    if n > 0:
        lp += n * log(t)
    lp -= (n + 0.5) * log(t + 2.0)
    return exp(lp)


def closed_form_pmax(n: int) -> float:
    """Maximum of P(n) over t, attained at t = 4n."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if n == 0:
        return 1.0
    lp = (
        lgamma(2 * n + 1)
        - n * log(2.0)
        - 2 * lgamma(n + 1)
        - 0.5 * log(2 * n + 1.0)
        + n * (log(n) - log(2 * n + 1.0))
    )
    return exp(lp)


def _log_hermite_imag(n: int, y: float) -> float:
    """log of i^{-n} H_n(iy) for y > 0 (positive; stable upward recurrence)."""
    if n == 0:
        return 0.0
    log_prev, log_cur = 0.0, log(2.0 * y)
    for k in range(1, n):
        m = max(log_cur, log_prev)
        nxt = 2.0 * y * exp(log_cur - m) + 2.0 * k * exp(log_prev - m)
        log_prev, log_cur = log_cur, m + log(nxt)
    return log_cur


def cat_fidelity(n: int) -> float:
    """Fidelity of the heralded x^n-profile state to its two-peak approximation.

    Exact expression via Hermite polynomials at imaginary argument; approaches
    1 - 0.03/n for large n.  Note the Hermite magnitude enters squared; the
    squared form is the one that matches the brute-force overlap integral.
    """
    if n < 1:
        raise ValidationError("cat_fidelity requires n >= 1")
    y = sqrt(2.0 * n / 3.0)
    lf = (
        (n + 2.5) * log(2.0)
        - 2.0 * n / 3.0
        + lgamma(n + 1)
        + 2.0 * _log_hermite_imag(n, y)
        - (n + 1) * log(3.0)
        - lgamma(2 * n + 1)
        - log(1.0 + (-1.0) ** n * exp(-2.0 * n))
    )
    return exp(lf)


def binomial_gaussian(big_n: int, l: int) -> tuple[float, float]:
    """Exact binomial C(N, l) and its Gaussian-envelope approximation."""
    if not 0 <= l <= big_n:
        raise ValidationError("need 0 <= l <= N")
    exact = float(comb(big_n, l))
    approx = sqrt(2.0 ** (2 * big_n + 1) / (big_n * pi)) * exp(
        -2.0 * (l - big_n / 2.0) ** 2 / big_n
    )
    return exact, approx
