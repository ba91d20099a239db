"""Approximate grid-state (GKP) targets, effective-squeezing fitting, envelope
damping optimization, logical bit-flip bookkeeping, and Wigner functions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from math import exp, log10, pi, sqrt

import numpy as np

from .breeding import displaced_squeezed, _quad_eig
from .errors import ParameterWarning, ValidationError
from .fock import FockState, TruncationPolicy, check_tail

SQRT_PI = sqrt(pi)

# dropped envelope weight must stay below this when choosing the peak cutoff
_ENVELOPE_DROP_TOL = 1e-10


@dataclass(frozen=True)
class GkpTarget:
    """A grid-state target: codeword k or logical qubit (alpha, beta, phi).

    delta (peak squeezing) and kappa (envelope width) may be None when the
    object denotes the fit family rather than one concrete member.
    """

    kind: str  # "codeword" | "qubit"
    k: int = 0
    alpha: float = 1.0
    beta: float = 0.0
    phi: float = 0.0
    delta: float | None = None
    kappa: float | None = None

    def __post_init__(self):
        if self.kind not in ("codeword", "qubit"):
            raise ValidationError("target kind must be 'codeword' or 'qubit'")
        if self.kind == "codeword" and self.k not in (0, 1):
            raise ValidationError("codeword index must be 0 or 1")
        if self.kind == "qubit" and abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-9:
            raise ValidationError("qubit amplitudes must satisfy alpha^2 + beta^2 = 1")
        for name in ("delta", "kappa"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValidationError(f"{name} must be positive when set")


@dataclass(frozen=True)
class GridSpec:
    """Rectangular phase-space grid for Wigner evaluation."""

    x_min: float = -6.0
    x_max: float = 6.0
    p_min: float = -6.0
    p_max: float = 6.0
    n_x: int = 201
    n_p: int = 201

    def __post_init__(self):
        for name in ("x_min", "x_max", "p_min", "p_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("n_x", "n_p"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.x_max <= self.x_min or self.p_max <= self.p_min:
            raise ValidationError("grid bounds must be increasing")
        if self.n_x < 2 or self.n_p < 2:
            raise ValidationError("grid needs at least 2 points per axis")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)


@dataclass(frozen=True)
class WignerGrid:
    """Evaluated Wigner function; values[i, j] = W(x_j, p_i)."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.spec.n_p, self.spec.n_x):
            raise ValidationError("values shape must be (n_p, n_x)")
        if not np.all(np.isfinite(v)):
            raise ValidationError("Wigner values must be finite")


def squeezing_db(delta: float) -> float:
    """10 log10(Δ²)."""
    if delta <= 0:
        raise ValidationError("delta must be positive")
    return 10.0 * log10(delta * delta)


def db_to_delta(db: float) -> float:
    return 10.0 ** (db / 20.0)


def envelope_cutoff(kappa: float) -> int:
    """Smallest peak-sum cutoff with dropped weight e^{-((2s+2)√π)²/(2κ²)} below tol."""
    s = 0
    while exp(-(((2 * s + 2) * SQRT_PI) ** 2) / (2.0 * kappa**2)) >= _ENVELOPE_DROP_TOL:
        s += 1
    return max(8, s)


def codeword(k: int, delta: float, kappa: float, policy: TruncationPolicy,
             s_max: int | None = None) -> FockState:
    """Normalized grid-state codeword: an envelope-weighted comb of displaced
    squeezed states at positions (2s+k)√π."""
    if k not in (0, 1):
        raise ValidationError("codeword index must be 0 or 1")
    if delta <= 0 or kappa <= 0:
        raise ValidationError("delta and kappa must be positive")
    cutoff = envelope_cutoff(kappa) if s_max is None else s_max
    amps = np.zeros(policy.dim, dtype=np.complex128)
    for s in range(-cutoff, cutoff + 1):
        x_s = (2 * s + k) * SQRT_PI
        weight = exp(-(x_s**2) / (2.0 * kappa**2))
        if weight < 1e-16:
            continue
        amps += weight * displaced_squeezed(x_s, delta, policy.dim).amplitudes
    state = FockState(amps / np.linalg.norm(amps), normalized=True)
    check_tail(state, policy, context=f"codeword k={k}")
    return state


def qubit_target(alpha: float, beta: float, phi: float, delta: float, kappa: float,
                 policy: TruncationPolicy) -> FockState:
    """Normalized α|0̃⟩ + β e^{iφ}|1̃⟩ built from the two codewords."""
    if abs(alpha**2 + beta**2 - 1.0) > 1e-9:
        raise ValidationError("alpha^2 + beta^2 must equal 1")
    amps = alpha * codeword(0, delta, kappa, policy).amplitudes
    if beta != 0.0:
        amps = amps + beta * np.exp(1j * phi) * codeword(1, delta, kappa, policy).amplitudes
    return FockState(amps / np.linalg.norm(amps), normalized=True)


def target_state(target: GkpTarget, policy: TruncationPolicy) -> FockState:
    if target.delta is None or target.kappa is None:
        raise ValidationError("target_state needs concrete delta and kappa")
    if target.kind == "codeword":
        return codeword(target.k, target.delta, target.kappa, policy)
    return qubit_target(target.alpha, target.beta, target.phi, target.delta, target.kappa, policy)


def logical_flip(target: GkpTarget, n_flips: int) -> GkpTarget:
    """Apply the logical bit flip n_flips times: swaps the codeword roles for
    odd counts (phase carried along), identity for even counts."""
    if n_flips % 2 == 0:
        return target
    if target.kind == "codeword":
        return replace(target, k=1 - target.k)
    return replace(target, alpha=target.beta, beta=target.alpha, phi=-target.phi)


# ---------------------------------------------------------------------------
# effective-squeezing fit over the kappa = delta family

_DB_MIN, _DB_MAX, _DB_STEP = 0.0, 14.0, 0.01


@lru_cache(maxsize=8)
def _db_grid() -> np.ndarray:
    n = int(round((_DB_MAX - _DB_MIN) / _DB_STEP)) + 1
    return _DB_MIN + _DB_STEP * np.arange(n)


@lru_cache(maxsize=16)
def _codeword_family(k: int, dim: int) -> np.ndarray:
    """Rows: normalized codeword(k, Δ, Δ) over the dB grid. Vectorized over
    the grid and the peak index via the displaced-squeezed recurrence."""
    dbs = _db_grid()
    deltas = 10.0 ** (dbs / 20.0)
    cutoff = envelope_cutoff(float(deltas.max()))
    s_vals = np.arange(-cutoff, cutoff + 1)
    x_s = (2.0 * s_vals + k) * SQRT_PI                     # (n_s,)
    d2 = (deltas**2)[:, None]                              # (n_db, 1)
    lam = (d2 - 1.0) / (d2 + 1.0)                          # (n_db, 1)
    mu = sqrt(2.0) * d2 * x_s[None, :] / (d2 + 1.0)        # (n_db, n_s)
    weights = np.exp(-(x_s[None, :] ** 2) / (2.0 * d2))    # (n_db, n_s)
    c_prev = np.zeros_like(mu)
    c_cur = np.ones_like(mu)
    norm2 = np.ones_like(mu)
    comps = np.zeros((dbs.size, x_s.size, dim))
    comps[:, :, 0] = 1.0
    for idx in range(dim - 1):
        c_next = (mu * c_cur - lam * sqrt(idx) * c_prev) / sqrt(idx + 1)
        comps[:, :, idx + 1] = c_next
        norm2 += c_next**2
        c_prev, c_cur = c_cur, c_next
    comps /= np.sqrt(norm2)[:, :, None]
    fam = np.einsum("ds,dsn->dn", weights, comps)
    fam /= np.linalg.norm(fam, axis=1)[:, None]
    return fam


def _family_matrix(target: GkpTarget, dim: int) -> np.ndarray:
    if target.kind == "codeword":
        return _codeword_family(target.k, dim)
    fam = target.alpha * _codeword_family(0, dim) + (
        target.beta * np.exp(1j * target.phi)
    ) * _codeword_family(1, dim)
    return fam / np.linalg.norm(fam, axis=1)[:, None]


@dataclass(frozen=True)
class FitResult:
    delta: float
    db: float
    fidelity: float
    at_bracket_edge: bool


def fit_effective_squeezing(state: FockState, target: GkpTarget,
                            policy: TruncationPolicy) -> FitResult:
    """Maximize fidelity over the kappa = delta family on a 0.01 dB grid in
    [0, 14] dB; returns the best member and the maximum fidelity."""
    n = state.norm()
    if n == 0.0:
        raise ValidationError("cannot fit a zero state")
    fam = _family_matrix(target, state.dim)
    overlaps = np.abs(fam.conj() @ state.amplitudes) ** 2 / n**2
    idx = int(np.argmax(overlaps))
    dbs = _db_grid()
    edge = idx in (0, dbs.size - 1)
    if edge:
        warnings.warn(
            f"effective-squeezing fit hit the search bracket edge at {dbs[idx]:.2f} dB",
            ParameterWarning,
            stacklevel=2,
        )
    return FitResult(db_to_delta(dbs[idx]), float(dbs[idx]), float(min(1.0, overlaps[idx])), edge)


def fit_two_parameter(state: FockState, target: GkpTarget, policy: TruncationPolicy,
                      rounds: int = 3) -> tuple[float, float, float]:
    """Optional (delta, kappa) fit by alternating 1-D scans; returns
    (delta, kappa, fidelity).  The production metric fixes kappa = delta."""
    n = state.norm()
    if n == 0.0:
        raise ValidationError("cannot fit a zero state")
    dbs = _db_grid()[::5]  # 0.05 dB resolution is ample for the free fit
    kappa = fit_effective_squeezing(state, target, policy).delta
    delta = kappa
    best = -1.0
    for _ in range(rounds):
        for which in ("delta", "kappa"):
            vals = []
            for db in dbs:
                cand = db_to_delta(db)
                d, kp = (cand, kappa) if which == "delta" else (delta, cand)
                member = replace(target, delta=d, kappa=kp)
                st = target_state(member, policy)
                vals.append(abs(np.vdot(st.amplitudes, state.amplitudes)) ** 2 / n**2)
            i = int(np.argmax(vals))
            best = float(vals[i])
            if which == "delta":
                delta = db_to_delta(dbs[i])
            else:
                kappa = db_to_delta(dbs[i])
    return delta, kappa, best


# ---------------------------------------------------------------------------
# envelope damping optimization


def _damp_x(state: FockState, t: float, policy: TruncationPolicy) -> FockState:
    """Apply e^{-t x̂²} through the cached padded eigendecomposition."""
    evals, evecs = _quad_eig(policy.padded_dim, "x")
    v = np.zeros(policy.padded_dim, dtype=np.complex128)
    v[: state.dim] = state.amplitudes
    v = evecs @ (np.exp(-t * evals**2) * (evecs.conj().T @ v))
    return FockState(v[: state.dim], normalized=False)


@dataclass(frozen=True)
class DampingResult:
    t: float
    state: FockState
    probability: float
    delta: float
    fidelity: float


def optimize_envelope_damping(state: FockState, target: GkpTarget,
                              policy: TruncationPolicy, t_max: float = 2.0,
                              tol: float = 1e-4) -> DampingResult:
    """Golden-section search of the envelope damping strength.

    Maximizes the fitted fidelity of e^{-t x̂²}|state⟩ over t in [0, t_max];
    probability is the squared norm of the bare damped state (input
    normalized first).  A flat objective returns t = 0.
    """
    psi = state.normalized_copy()

    def objective(t: float) -> float:
        return fit_effective_squeezing(_damp_x(psi, t, policy), target, policy).fidelity

    gr = (sqrt(5.0) - 1.0) / 2.0
    a, b = 0.0, t_max
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = objective(c), objective(d)
    while abs(b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = objective(d)
    t_star = 0.5 * (a + b)
    f_zero = objective(0.0)
    if objective(t_star) <= f_zero + 1e-9:
        t_star = 0.0
    damped = _damp_x(psi, t_star, policy)
    probability = min(1.0, float(damped.norm() ** 2))
    fit = fit_effective_squeezing(damped, target, policy)
    return DampingResult(t_star, damped.normalized_copy(), probability, fit.delta, fit.fidelity)


# ---------------------------------------------------------------------------
# Wigner function


def wigner(state: FockState, grid: GridSpec = GridSpec()) -> WignerGrid:
    """Wigner function with [x, p] = i: vacuum peak 1/π, ∫W dx dp = 1.

    Evaluated diagonal-by-diagonal in |m⟩⟨n| with an associated-Laguerre
    recurrence; values[i, j] = W(x_j, p_i).
    """
    n = state.norm()
    if n == 0.0:
        raise ValidationError("Wigner function of a zero state is undefined")
    if max((grid.x_max - grid.x_min) / (grid.n_x - 1),
           (grid.p_max - grid.p_min) / (grid.n_p - 1)) > 0.25:
        warnings.warn("Wigner grid spacing above 0.25 undersamples √π-spaced peaks",
                      ParameterWarning, stacklevel=2)
    psi = state.amplitudes / n
    dim = psi.size
    xg, pg = np.meshgrid(grid.xs(), grid.ps())
    alpha = (xg + 1j * pg) / sqrt(2.0)
    b = 4.0 * np.abs(alpha) ** 2
    w = np.zeros_like(xg)
    a_pow = np.ones_like(alpha)  # (2 conj(alpha))^d, running
    f0 = 1.0                     # 1/sqrt(d!), running
    for d in range(dim):
        if d > 0:
            a_pow = a_pow * (2.0 * alpha.conj())
            f0 /= sqrt(d)
        coeffs = psi.conj()[: dim - d] * psi[d:]
        if not np.any(coeffs):
            continue
        l_prev = np.zeros_like(b)
        l_cur = np.ones_like(b)
        f = f0
        acc = coeffs[0] * f * l_cur
        for m in range(1, dim - d):
            l_next = ((2.0 * (m - 1) + d + 1.0 - b) * l_cur - (m - 1 + d) * l_prev) / m
            l_prev, l_cur = l_cur, l_next
            f = -f * sqrt(m / (m + d))
            acc = acc + coeffs[m] * f * l_cur
        term = acc * a_pow
        w += term.real if d == 0 else 2.0 * term.real
    w *= np.exp(-b / 2.0) / pi
    return WignerGrid(grid, w)
