"""Conditioned operations of the breeding protocol: heralded Kraus operators
of the photon-subtraction circuits (QND and beam-splitter variants), damping
operators and their zero-photon circuit realizations, parameter solvers, seed
construction and the bifurcation step.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import asin, atan2, exp, log, pi, sqrt

import numpy as np

from .errors import NumericError, ParameterWarning, SeedNotRequired, ValidationError
from .fock import (
    FockOperator,
    FockState,
    TruncationPolicy,
    TwoModeOperator,
    TwoModeState,
    _ladder,
    _quadratures,
    check_tail,
    op_exp,
)
from .gaussian import GateSpec, SINGLE_MODE_KINDS

logger = logging.getLogger(__name__)

_INVARIANT_TOL = 1e-12


@dataclass(frozen=True)
class StepParams:
    """Physical parameters of one coherent-bifurcation step.

    n: heralded photon count; delta1/2/3: squeezing parameters of the input,
    ancilla and output squeezer; g: QND gain; w: peak half-separation.
    """

    n: int
    delta1: float
    delta2: float
    delta3: float
    g: float
    w: float

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("herald count must be nonnegative")
        if min(self.delta1, self.delta2, self.delta3) <= 0:
            raise ValidationError("squeezing parameters must be positive")
        if abs(self.w - sqrt(2.0 * self.n) / self.delta1) > _INVARIANT_TOL:
            raise ValidationError("w must equal sqrt(2 n)/delta1")
        cond = (self.delta2**2 + self.g**2 * self.delta1**2) * self.delta3**2
        if abs(cond - 1.0) > _INVARIANT_TOL:
            raise ValidationError(
                f"(delta2^2 + g^2 delta1^2) delta3^2 = {cond!r} must equal 1"
            )
        if not (self.delta2**2 < 1.0 < self.delta1**2):
            warnings.warn(
                "parameters leave the regime delta2^2 < 1 < delta1^2; the "
                "two-peak approximation degrades",
                ParameterWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class DampingSpec:
    """Strength and axis of the non-unitary envelope multiplier e^{-t q^2}."""

    t: float
    axis: str = "x"

    def __post_init__(self):
        if self.axis not in ("x", "p"):
            raise ValidationError("axis must be 'x' or 'p'")
        if not np.isfinite(self.t) or self.t < 0:
            raise ValidationError("damping strength must be finite and nonnegative")


@dataclass(frozen=True)
class SeedSpec:
    """Logical amplitudes and geometry of the three-peak seed state.

    Derived fields follow from (alpha, beta, w_seed): a and b set the relative
    weight and phase imprinted on the outer peaks, c re-widens the peaks and
    delta rescales the lattice back to sqrt(pi) spacing.
    """

    alpha: complex
    beta: complex
    w_seed: float
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    delta_s: float = 1.0

    def __post_init__(self):
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1.0) > 1e-9:
            raise ValidationError("|alpha|^2 + |beta|^2 must equal 1")
        if abs(self.alpha) < abs(self.beta):
            raise ValidationError("seed construction requires |alpha| >= |beta|")
        if self.w_seed < sqrt(pi) / 2 - 1e-12:
            raise ValidationError("w_seed must be at least sqrt(pi)/2")
        a, b, c, d = seed_params(self.alpha, self.beta, self.w_seed, delta=1.0)
        # c depends on the input squeezing; store the delta-independent factor
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "delta_s", d)


def solve_step_params(n: int, w: float, delta2: float, g: float = 1.0) -> StepParams:
    """delta1 = sqrt(2n)/w and delta3 from the unit-variance ancilla condition."""
    if n < 1:
        raise ValidationError("solve_step_params requires n >= 1")
    if w <= 0:
        raise ValidationError("w must be positive")
    if delta2 <= 0 or g == 0.0:
        raise ValidationError("need delta2 > 0 and g != 0")
    delta1 = sqrt(2.0 * n) / w
    delta3 = 1.0 / sqrt(delta2**2 + g**2 * delta1**2)
    if delta1**2 <= 2.0:
        warnings.warn(
            f"delta1^2 = {delta1**2:.3f} is not well above 1; the two-peak "
            "approximation of the heralded state degrades",
            ParameterWarning,
            stacklevel=2,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterWarning)
        return StepParams(n=n, delta1=delta1, delta2=delta2, delta3=delta3, g=g, w=w)


def damping_circuit_params(t: float, delta2: float) -> StepParams:
    """Zero-photon heralded circuit realizing e^{-t p^2} (up to a scalar).

    Convention: no output squeezer (delta3 = 1) and the gain absorbs the
    strength, g = sqrt(2 t (1 + delta2^2)).  The vacuum-herald prefactor of
    this circuit is part of the physical success probability.
    """
    if t <= 0:
        raise ValidationError("damping strength must be positive for a circuit")
    if not 0 < delta2 < 1:
        raise ValidationError("circuit damping requires 0 < delta2 < 1")
    g = sqrt(2.0 * t * (1.0 + delta2**2))
    delta1 = sqrt(1.0 - delta2**2) / g
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterWarning)
        return StepParams(n=0, delta1=delta1, delta2=delta2, delta3=1.0, g=g, w=0.0)


def damping_strength(step: StepParams) -> float:
    """t = g^2 delta3^2 / (2 (1 + delta2^2 delta3^2)) of the n=0 circuit."""
    b2 = step.delta2**2 * step.delta3**2
    return step.g**2 * step.delta3**2 / (2.0 * (1.0 + b2))


# ---------------------------------------------------------------------------
# Gaussian unitaries in the Fock representation


@lru_cache(maxsize=128)
def _squeeze_matrix(delta: float, dim: int) -> np.ndarray:
    """S(Δ) with x -> x/Δ, generator (ln Δ / 2)(a² - a†²), built at dim."""
    a = _ladder(dim)
    gen = 0.5 * log(delta) * (a @ a - a.conj().T @ a.conj().T)
    return op_exp(FockOperator(gen, label=f"squeeze-gen({delta})")).entries


def _padded_gate_matrix(gate: GateSpec, policy: TruncationPolicy) -> np.ndarray:
    """Exponential of the gate generator at the padded dimension, then cropped."""
    dim, pdim = policy.dim, policy.padded_dim
    v = gate.parameter
    if gate.kind == "squeeze":
        return _squeeze_matrix(v, pdim)[:dim, :dim]
    x, p = _quadratures(pdim)
    if gate.kind == "displace":
        gen = -1j * v * p
    elif gate.kind == "rotate":
        # exp(-i theta n) realizes x -> cos(theta) x + sin(theta) p
        gen = -1j * v * np.diag(np.arange(pdim, dtype=np.complex128))
    elif gate.kind == "quadratic_phase":
        gen = 1j * v * (x @ x)
    else:
        raise ValidationError(f"{gate.kind!r} is not a single-mode gate")
    return op_exp(FockOperator(gen, label=f"{gate.kind}({v})")).entries[:dim, :dim]


def gaussian_unitary(gate: GateSpec, policy: TruncationPolicy) -> FockOperator:
    """Single-mode Gaussian unitary, built at the padded dimension and cropped."""
    if gate.kind not in SINGLE_MODE_KINDS:
        raise ValidationError(
            f"{gate.kind!r} is two-mode; use qnd_unitary/beamsplitter_unitary "
            "or the dedicated appliers"
        )
    return FockOperator(_padded_gate_matrix(gate, policy), label=f"{gate.kind}({gate.parameter})")


def squeezed_vacuum(delta: float, policy: TruncationPolicy) -> FockState:
    """|S_Δ⟩ from the exact displaced-squeezed recurrence (d = 0)."""
    return displaced_squeezed(0.0, delta, policy.dim)


def displaced_squeezed(d: float, delta: float, dim: int) -> FockState:
    """Fock amplitudes of D(d)|S_Δ⟩ by the Bogoliubov annihilator recurrence.

    (a + λ a† - μ) D(d)S(Δ)|0⟩ = 0 with λ = (Δ²-1)/(Δ²+1), μ = √2 Δ² d/(Δ²+1)
    gives a stable three-term recurrence; the result is normalized within the
    truncated space.
    """
    if delta <= 0:
        raise ValidationError("delta must be positive")
    lam = (delta**2 - 1.0) / (delta**2 + 1.0)
    mu = sqrt(2.0) * delta**2 * d / (delta**2 + 1.0)
    c = np.zeros(dim, dtype=np.complex128)
    c[0] = 1.0
    for k in range(dim - 1):
        prev = c[k - 1] if k >= 1 else 0.0
        c[k + 1] = (mu * c[k] - lam * sqrt(k) * prev) / sqrt(k + 1)
    return FockState(c / np.linalg.norm(c), normalized=True)


# ---------------------------------------------------------------------------
# heralded Kraus operators


@lru_cache(maxsize=64)
def _quad_eig(dim: int, axis: str) -> tuple[np.ndarray, np.ndarray]:
    x, p = _quadratures(dim)
    evals, evecs = np.linalg.eigh(x if axis == "x" else p)
    return evals, evecs


@lru_cache(maxsize=64)
def _kraus_qnd_raw(n: int, delta2: float, delta3: float, g: float, dim: int, pdim: int) -> np.ndarray:
    """⟨n|₂ S₂(Δ3) Q(g) (I ⊗ |S_Δ2⟩) built spectrally at pdim, cropped to dim.

    Q(g) commutes with p̂₁, so the Kraus operator is a function of p̂₁ alone and
    diagonalizes in the eigenbasis of the truncated momentum operator.
    """
    if not 0 <= n < dim:
        raise ValidationError(f"herald count {n} outside truncation range")
    e_p, w_p = _quad_eig(pdim, "p")
    e_x, v_x = _quad_eig(pdim, "x")
    ancilla = _squeeze_matrix(delta2, pdim)[:, 0]
    s3_row = _squeeze_matrix(delta3, pdim)[n, :] @ v_x
    u = v_x.conj().T @ ancilla
    phi = np.exp(-1j * g * np.outer(e_p, e_x)) @ (s3_row * u)
    k_full = (w_p * phi) @ w_p.conj().T
    return np.ascontiguousarray(k_full[:dim, :dim])


def kraus_igps(step: StepParams, policy: TruncationPolicy) -> FockOperator:
    """Kraus operator of the QND-based (iterable) photon subtraction.

    It commutes with position displacements at the operator level, which is
    what makes the bifurcation iterable.
    """
    entries = _kraus_qnd_raw(
        step.n, step.delta2, step.delta3, step.g, policy.dim, policy.padded_dim
    )
    return FockOperator(entries, label=f"K{step.n}(qnd g={step.g:.4g})")


def beamsplitter_angle(transmittance: float) -> float:
    """Mixing angle of exp(θ (a1†a2 - a1 a2†)) matching the oracle convention."""
    if not 0.0 <= transmittance <= 1.0:
        raise ValidationError("transmittance must be in [0, 1]")
    return -asin(sqrt(transmittance))


@lru_cache(maxsize=32)
def _bs_blocks(theta: float, pdim: int) -> dict:
    """Per-total-photon-number rotation blocks of the beam splitter."""
    blocks = {}
    for ntot in range(2 * pdim - 1):
        lo = max(0, ntot - pdim + 1)
        hi = min(ntot, pdim - 1)
        size = hi - lo + 1
        gen = np.zeros((size, size))
        for i, k1 in enumerate(range(lo, hi)):
            val = sqrt((k1 + 1) * (ntot - k1))
            gen[i + 1, i] = val
            gen[i, i + 1] = -val
        blocks[ntot] = op_exp(FockOperator(theta * gen, label=f"bs-block({ntot})")).entries.real
    return blocks


def kraus_gps(n: int, delta1: float, delta2: float, transmittance: float,
              policy: TruncationPolicy) -> FockOperator:
    """Kraus operator of the beam-splitter photon subtraction, ⟨n|₂ B(T) (I ⊗ |S_Δ2⟩).

    Produces the same two-peak states as the QND variant but does not commute
    with displacements, which is the structural reason it cannot be iterated.
    delta1 only enters the regime check.
    """
    if not 0.0 < transmittance < 1.0:
        raise ValidationError("kraus_gps needs 0 < T < 1")
    cond = transmittance * delta1**2 + (1 - transmittance) * delta2**2
    if abs(cond - 1.0) > 0.1:
        warnings.warn(
            f"T delta1^2 + R delta2^2 = {cond:.3f} is far from 1; the two-peak "
            "output contract degrades",
            ParameterWarning,
            stacklevel=2,
        )
    dim, pdim = policy.dim, policy.padded_dim
    blocks = _bs_blocks(beamsplitter_angle(transmittance), pdim)
    ancilla = _squeeze_matrix(delta2, pdim)[:, 0]
    k = np.zeros((dim, dim), dtype=np.complex128)
    for m in range(dim):
        ntot = m + n
        lo = max(0, ntot - pdim + 1)
        block = blocks[ntot]
        for mp in range(dim):
            k2 = ntot - mp
            if 0 <= k2 < pdim:
                k[m, mp] = block[m - lo, mp - lo] * ancilla[k2]
    return FockOperator(k, label=f"K{n}(bs T={transmittance:.4g})")


# two-mode unitaries for brute-force cross-checks (small dimensions only)

_TWO_MODE_MATERIALIZE_CAP = 64


def qnd_unitary(g: float, policy: TruncationPolicy) -> TwoModeOperator:
    """exp(-i g p̂₁ x̂₂) materialized at the padded dimension and cropped."""
    pdim, dim = policy.padded_dim, policy.dim
    if pdim > _TWO_MODE_MATERIALIZE_CAP:
        raise ValidationError(
            f"two-mode materialization capped at padded dim {_TWO_MODE_MATERIALIZE_CAP}; "
            "use apply_qnd for large spaces"
        )
    x, p = _quadratures(pdim)
    u = op_exp(FockOperator(-1j * g * np.kron(p, x), label=f"qnd({g})")).entries
    u = u.reshape(pdim, pdim, pdim, pdim)[:dim, :dim, :dim, :dim].reshape(dim**2, dim**2)
    return TwoModeOperator(u, dim=dim, label=f"qnd({g})")


def beamsplitter_unitary(transmittance: float, policy: TruncationPolicy) -> TwoModeOperator:
    """exp(θ (a1†a2 - a1 a2†)) materialized at the padded dimension and cropped."""
    pdim, dim = policy.padded_dim, policy.dim
    if pdim > _TWO_MODE_MATERIALIZE_CAP:
        raise ValidationError(
            f"two-mode materialization capped at padded dim {_TWO_MODE_MATERIALIZE_CAP}; "
            "use apply_beamsplitter for large spaces"
        )
    a = _ladder(pdim)
    gen = np.kron(a.conj().T, a) - np.kron(a, a.conj().T)
    theta = beamsplitter_angle(transmittance)
    u = op_exp(FockOperator(theta * gen, label=f"bs({transmittance})")).entries
    u = u.reshape(pdim, pdim, pdim, pdim)[:dim, :dim, :dim, :dim].reshape(dim**2, dim**2)
    return TwoModeOperator(u, dim=dim, label=f"bs({transmittance})")


def _pad_two_mode(state2: TwoModeState, pdim: int) -> np.ndarray:
    m = np.zeros((pdim, pdim), dtype=np.complex128)
    m[: state2.dim, : state2.dim] = state2.matrix()
    return m


def apply_qnd(state2: TwoModeState, g: float, policy: TruncationPolicy) -> TwoModeState:
    """Apply exp(-i g p̂₁ x̂₂) without materializing the two-mode matrix."""
    pdim = policy.padded_dim
    e_p, w_p = _quad_eig(pdim, "p")
    e_x, v_x = _quad_eig(pdim, "x")
    m = w_p.conj().T @ _pad_two_mode(state2, pdim) @ v_x.conj()
    m *= np.exp(-1j * g * np.outer(e_p, e_x))
    out = w_p @ m @ v_x.T
    return TwoModeState(out[: state2.dim, : state2.dim].reshape(-1), dim=state2.dim)


def apply_beamsplitter(state2: TwoModeState, transmittance: float,
                       policy: TruncationPolicy) -> TwoModeState:
    """Apply the beam splitter blockwise over total photon number."""
    pdim = policy.padded_dim
    blocks = _bs_blocks(beamsplitter_angle(transmittance), pdim)
    m = _pad_two_mode(state2, pdim)
    out = np.zeros_like(m)
    for ntot, block in blocks.items():
        lo = max(0, ntot - pdim + 1)
        hi = min(ntot, pdim - 1)
        k1 = np.arange(lo, hi + 1)
        vec = m[k1, ntot - k1]
        out[k1, ntot - k1] = block @ vec
    return TwoModeState(out[: state2.dim, : state2.dim].reshape(-1), dim=state2.dim)


def apply_single_mode(state2: TwoModeState, op: FockOperator, mode: int) -> TwoModeState:
    """Apply a single-mode operator to one mode of a two-mode state."""
    if op.dim != state2.dim:
        raise ValidationError("operator/state dimension mismatch")
    m = state2.matrix()
    out = op.entries @ m if mode == 0 else m @ op.entries.T
    return TwoModeState(out.reshape(-1), dim=state2.dim)


# ---------------------------------------------------------------------------
# damping operators


def damping_op(spec: DampingSpec, policy: TruncationPolicy) -> FockOperator:
    """e^{-t x̂²} or e^{-t p̂²}: Hermitian, positive, operator norm <= 1.

    Built through the padded quadrature eigendecomposition (identical, up to
    roundoff, to op_exp of the padded generator) and cropped.
    """
    pdim, dim = policy.padded_dim, policy.dim
    evals, evecs = _quad_eig(pdim, spec.axis)
    k = (evecs * np.exp(-spec.t * evals**2)) @ evecs.conj().T
    return FockOperator(k[:dim, :dim], label=f"exp(-{spec.t:.4g}·{spec.axis}²)")


def damping_circuit_op(t: float, axis: str, delta2: float,
                       policy: TruncationPolicy) -> tuple[FockOperator, StepParams]:
    """The zero-photon heralded circuit realizing the damping, with its params.

    The returned operator equals C e^{-t q²} with a physical herald prefactor
    C < 1; x-axis damping conjugates the native p-axis circuit by ±π/2
    rotations (diagonal phases in the number basis).
    """
    step = damping_circuit_params(t, delta2)
    k = kraus_igps(step, policy)
    if axis == "p":
        return FockOperator(k.entries, label=f"circuit[{k.label}]·p"), step
    phases = np.exp(1j * (pi / 2) * np.arange(policy.dim))
    entries = (phases.conj()[:, None] * k.entries) * phases[None, :]
    return FockOperator(entries, label=f"circuit[{k.label}]·x"), step


# ---------------------------------------------------------------------------
# seed construction and bifurcation


def seed_params(alpha: complex, beta: complex, w: float, delta: float) -> tuple[float, float, float, float]:
    """Damping/phase/squeeze parameters (a, b, c, δ) of the seed recipe.

    a = ln|α/β|/(4w²), b = arg(β/α)/(4w²), c = (4w²/π - 1)/(2Δ²), δ = 2w/√π.
    For w = √π/2 the (c, δ) stage collapses to the identity.
    """
    if beta == 0:
        raise SeedNotRequired("beta = 0: start from a squeezed vacuum instead")
    if w < sqrt(pi) / 2 - 1e-12:
        raise ValidationError("seed recipe requires w >= sqrt(pi)/2")
    ratio = alpha / beta
    a = log(abs(ratio)) / (4.0 * w**2)
    b = atan2((beta / alpha).imag, (beta / alpha).real) / (4.0 * w**2)
    c = (4.0 * w**2 / pi - 1.0) / (2.0 * delta**2)
    return a, b, c, 2.0 * w / sqrt(pi)


def seed_target(alpha: complex, beta: complex, delta: float, policy: TruncationPolicy) -> FockState:
    """Normalized three-peak reference α|S_Δ⟩ + (β/2)[D(-√π)+D(√π)]|S_Δ⟩."""
    w = sqrt(pi)
    amps = (
        alpha * displaced_squeezed(0.0, delta, policy.dim).amplitudes
        + 0.5 * beta * displaced_squeezed(-w, delta, policy.dim).amplitudes
        + 0.5 * beta * displaced_squeezed(w, delta, policy.dim).amplitudes
    )
    return FockState(amps / np.linalg.norm(amps), normalized=True)


def _build_seed_detailed(spec: SeedSpec, delta: float, n_seed: int,
                         policy: TruncationPolicy, delta2: float, g: float = 1.0,
                         damping: str = "circuit"):
    """Seed pipeline with per-step bookkeeping: (state, probability, steps)."""
    if damping not in ("circuit", "bare"):
        raise ValidationError("damping must be 'circuit' or 'bare'")
    w = spec.w_seed
    step = solve_step_params(n_seed, w, delta2, g)
    if abs(step.delta1 - delta) > 1e-9:
        warnings.warn(
            f"seed bifurcation delta1 = {step.delta1:.4f} differs from the "
            f"requested input squeezing {delta:.4f}; peaks will be mismatched",
            ParameterWarning,
            stacklevel=3,
        )
    a, b, c, delta_s = seed_params(spec.alpha, spec.beta, w, step.delta1)
    k_bif = kraus_igps(step, policy)
    state = squeezed_vacuum(step.delta1, policy)
    steps: list[tuple[str, float, float]] = []

    def conditioned(op: FockOperator, label: str, st: FockState) -> FockState:
        out = np.asarray(op.entries @ st.amplitudes)
        p = float(np.linalg.norm(out) ** 2)
        if p <= 0:
            raise NumericError(f"seed step {label!r} annihilated the state")
        nxt = FockState(out / sqrt(p), normalized=True)
        steps.append((label, p, nxt.tail_mass()))
        return nxt

    state = conditioned(k_bif, "seed:bifurcation-1", state)
    state = conditioned(k_bif, "seed:bifurcation-2", state)
    if a > 0.0:  # equal logical weights need no outer-peak damping
        if damping == "circuit":
            kd_a, _ = damping_circuit_op(a, "x", delta2, policy)
            state = conditioned(kd_a, "seed:damp-x(a)", state)
        else:
            state = conditioned(damping_op(DampingSpec(a, "x"), policy), "seed:damp-x(a)", state)
    if b != 0.0:
        qp = gaussian_unitary(GateSpec("quadratic_phase", b), policy)
        state = conditioned(qp, "seed:quadratic-phase(b)", state)
    if c > 0.0:
        if damping == "circuit":
            kd_c, _ = damping_circuit_op(c, "p", delta2, policy)
            state = conditioned(kd_c, "seed:damp-p(c)", state)
        else:
            state = conditioned(damping_op(DampingSpec(c, "p"), policy), "seed:damp-p(c)", state)
    if abs(delta_s - 1.0) > 1e-12:
        sq = gaussian_unitary(GateSpec("squeeze", delta_s), policy)
        state = conditioned(sq, "seed:squeeze(delta)", state)
    probability = float(np.prod([p for _, p, _ in steps]))
    ref = seed_target(spec.alpha, spec.beta, step.delta1, policy)
    fid = abs(np.vdot(ref.amplitudes, state.amplitudes)) ** 2
    logger.info("seed built: probability %.3e, fidelity to three-peak reference %.6f", probability, fid)
    check_tail(state, policy, context="seed state")
    return state, probability, steps


def build_seed(spec: SeedSpec, delta: float, n_seed: int, policy: TruncationPolicy,
               delta2: float = exp(-1.16), g: float = 1.0,
               damping: str = "circuit") -> tuple[FockState, float]:
    """Construct the three-peak seed state.

    Returns the normalized state and the total success probability, the product
    of the squared norms of every conditioned step (unitary stages contribute
    1; with damping='circuit' the dampings carry their vacuum-herald factors).
    """
    state, probability, _ = _build_seed_detailed(
        spec, delta, n_seed, policy, delta2=delta2, g=g, damping=damping
    )
    return state, probability


def bifurcate(state: FockState, step: StepParams, policy: TruncationPolicy) -> tuple[FockState, float]:
    """One coherent-bifurcation step: returns the normalized output and the
    heralding probability ‖K_n ψ‖² (input must be normalized)."""
    if abs(state.norm() - 1.0) > 1e-9:
        raise ValidationError("bifurcate expects a normalized input state")
    k = kraus_igps(step, policy)
    out = k.entries @ state.amplitudes
    p = float(np.linalg.norm(out) ** 2)
    if p <= 0:
        raise NumericError("bifurcation heralded with zero probability")
    result = FockState(out / sqrt(p), normalized=True)
    check_tail(result, policy, context=f"bifurcation n={step.n}")
    return result, p
