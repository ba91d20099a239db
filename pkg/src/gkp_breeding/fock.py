"""Truncated Fock-space linear algebra: states, operators, exponentials,
tensor products, ancilla projection and moment extraction.

Conventions: [x, p] = i, so the vacuum has Var(x) = Var(p) = 1/2.
Mode-1-major indexing for two-mode objects: flat index = m1 * dim + m2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, log2, sqrt, pi
from typing import NamedTuple

import numpy as np

from .errors import NumericError, ValidationError, TruncationWarning

# Hard cap on any padded construction dimension (single mode).
MAX_PADDED_DIM = 4096


@dataclass(frozen=True)
class TruncationPolicy:
    """Fock-space truncation settings.

    dim: retained photon numbers 0 .. dim-1 (default 56, i.e. up to 55 photons).
    pad_factor: operators are built at pad_factor*dim and then cropped,
        which pushes exponential truncation artifacts above the retained block.
    tail_tol: probability mass tolerated in the top 10% of levels before a
        truncation warning is emitted.
    """

    dim: int = 56
    pad_factor: int = 2
    tail_tol: float = 1e-8

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError(f"dim must be >= 2, got {self.dim}")
        if self.pad_factor < 1:
            raise ValidationError(f"pad_factor must be >= 1, got {self.pad_factor}")
        if self.dim * self.pad_factor > MAX_PADDED_DIM:
            raise ValidationError(
                f"padded dimension {self.dim * self.pad_factor} exceeds cap {MAX_PADDED_DIM}"
            )
        if not (0 < self.tail_tol < 1):
            raise ValidationError(f"tail_tol must be in (0, 1), got {self.tail_tol}")

    @property
    def padded_dim(self) -> int:
        return self.dim * self.pad_factor


@dataclass(frozen=True)
class FockState:
    """Single-mode state: complex amplitudes over the photon-number basis."""

    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        amps = np.ascontiguousarray(np.asarray(self.amplitudes, dtype=np.complex128))
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or amps.size < 2:
            raise ValidationError("amplitudes must be a vector of length >= 2")
        if not np.isfinite(amps).all():
            raise ValidationError("amplitudes must be finite")
        if self.normalized and abs(self.norm() ** 2 - 1.0) >= 1e-9:
            raise ValidationError(
                f"state flagged normalized but |norm^2 - 1| = {abs(self.norm()**2 - 1.0):.2e}"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tail_mass(self) -> float:
        """Fraction of the total probability in the top 10% of levels."""
        n2 = self.norm() ** 2
        if n2 == 0.0:
            return 0.0
        k = max(1, self.dim // 10)
        return float(np.sum(np.abs(self.amplitudes[-k:]) ** 2)) / n2

    def normalized_copy(self) -> "FockState":
        n = self.norm()
        if n == 0.0:
            raise ValidationError("cannot normalize a zero state")
        return FockState(self.amplitudes / n, normalized=True)


@dataclass(frozen=True)
class TwoModeState:
    """Two-mode state over the product number basis, mode-1 index major."""

    amplitudes: np.ndarray  # flat, length dim**2
    dim: int
    normalized: bool = False

    def __post_init__(self):
        amps = np.ascontiguousarray(np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1))
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != self.dim**2:
            raise ValidationError("two-mode amplitude length must equal dim**2")
        if not np.isfinite(amps).all():
            raise ValidationError("amplitudes must be finite")

    def matrix(self) -> np.ndarray:
        """Amplitudes as a (mode1, mode2) matrix."""
        return self.amplitudes.reshape(self.dim, self.dim)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on the truncated single-mode Fock space."""

    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.ascontiguousarray(np.asarray(self.entries, dtype=np.complex128))
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("operator entries must be a square matrix")
        if not np.isfinite(m).all():
            raise ValidationError(f"operator {self.label!r} has non-finite entries")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "FockOperator":
        return FockOperator(self.entries.conj().T, label=f"{self.label}†")

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if self.dim != other.dim:
            raise ValidationError("operator dimension mismatch")
        return FockOperator(self.entries @ other.entries, label=f"{self.label}·{other.label}")


@dataclass(frozen=True)
class TwoModeOperator:
    """Dense operator on the two-mode product space (mode-1 index major).

    Materializing this at the production dimension is deliberately avoided in
    the library; it exists for brute-force cross-checks at small dimensions.
    """

    entries: np.ndarray
    dim: int
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", m)
        if m.shape != (self.dim**2, self.dim**2):
            raise ValidationError("two-mode operator must be dim^2 x dim^2")


# ---------------------------------------------------------------------------
# elementary operators


@lru_cache(maxsize=64)
def _ladder(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(1, dim):
        a[n - 1, n] = sqrt(n)
    return a


def ladder_ops(policy: TruncationPolicy) -> tuple[FockOperator, FockOperator]:
    """Annihilation and creation operators at the policy dimension."""
    a = _ladder(policy.dim)
    return FockOperator(a, label="a"), FockOperator(a.conj().T, label="a†")


def _quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    a = _ladder(dim)
    ad = a.conj().T
    return (a + ad) / sqrt(2), (a - ad) / (1j * sqrt(2))


def quadrature_ops(policy: TruncationPolicy) -> tuple[FockOperator, FockOperator]:
    """Position and momentum operators, x = (a + a†)/√2, p = (a - a†)/(i√2)."""
    x, p = _quadratures(policy.dim)
    return FockOperator(x, label="x"), FockOperator(p, label="p")


def number_op(policy: TruncationPolicy) -> FockOperator:
    return FockOperator(np.diag(np.arange(policy.dim, dtype=np.complex128)), label="n")


def identity_op(policy: TruncationPolicy) -> FockOperator:
    return FockOperator(np.eye(policy.dim, dtype=np.complex128), label="I")


def basis_state(n: int, policy: TruncationPolicy) -> FockState:
    if not 0 <= n < policy.dim:
        raise ValidationError(f"basis index {n} out of range [0, {policy.dim})")
    amps = np.zeros(policy.dim, dtype=np.complex128)
    amps[n] = 1.0
    return FockState(amps, normalized=True)


def vacuum_state(policy: TruncationPolicy) -> FockState:
    return basis_state(0, policy)


# ---------------------------------------------------------------------------
# matrix exponential

_EXP_MAX_TERMS = 80


def op_exp(op: FockOperator, tol: float = 1e-13) -> FockOperator:
    """Matrix exponential by scaling-and-squaring with a truncated series.

    The series is summed until the current term drops below tol relative to the
    running sum; exceeding the term cap raises a NumericError naming the
    operator label.
    """
    m = op.entries
    dim = m.shape[0]
    norm = float(np.linalg.norm(m, 1))
    if norm == 0.0:
        return FockOperator(np.eye(dim, dtype=np.complex128), label=f"exp({op.label})")
    n_sq = max(0, ceil(log2(norm / 0.5)))
    t = m / (2.0**n_sq)
    total = np.eye(dim, dtype=np.complex128)
    term = np.eye(dim, dtype=np.complex128)
    for k in range(1, _EXP_MAX_TERMS + 1):
        term = term @ t / k
        total += term
        if np.linalg.norm(term, 1) <= 0.25 * tol * np.linalg.norm(total, 1):
            break
    else:
        raise NumericError(
            f"op_exp series for {op.label!r} did not converge in {_EXP_MAX_TERMS} terms"
        )
    for _ in range(n_sq):
        total = total @ total
    return FockOperator(total, label=f"exp({op.label})")


def is_unitary_interior(op: FockOperator, tol: float = 1e-8, frac: float = 0.8) -> bool:
    """Check U U† = I on the interior frac-block (truncation corrupts the top rows)."""
    b = op.entries @ op.entries.conj().T
    k = max(1, int(op.dim * frac))
    return bool(np.max(np.abs(b[:k, :k] - np.eye(k))) <= tol)


# ---------------------------------------------------------------------------
# application, overlaps, tensor structure


def apply(op: FockOperator, state: FockState) -> FockState:
    if op.dim != state.dim:
        raise ValidationError("operator/state dimension mismatch")
    return FockState(op.entries @ state.amplitudes, normalized=False)


def inner(a: FockState, b: FockState) -> complex:
    """⟨a|b⟩ (conjugate-linear in the first argument)."""
    if a.dim != b.dim:
        raise ValidationError("state dimension mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FockState, b: FockState) -> float:
    """|⟨a|b⟩|² / (‖a‖²‖b‖²), in [0, 1]; symmetric and phase invariant."""
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise ValidationError("fidelity of a zero-norm state is undefined")
    f = abs(inner(a, b)) ** 2 / (na**2 * nb**2)
    return float(min(1.0, f))


def tensor(a, b):
    """Tensor product of two states or two operators (mode-1 index major)."""
    if isinstance(a, FockState) and isinstance(b, FockState):
        if a.dim != b.dim:
            raise ValidationError("tensor requires equal single-mode dimensions")
        return TwoModeState(np.kron(a.amplitudes, b.amplitudes), dim=a.dim)
    if isinstance(a, FockOperator) and isinstance(b, FockOperator):
        if a.dim != b.dim:
            raise ValidationError("tensor requires equal single-mode dimensions")
        return TwoModeOperator(
            np.kron(a.entries, b.entries), dim=a.dim, label=f"{a.label}⊗{b.label}"
        )
    raise ValidationError("tensor expects two states or two operators")


def apply_two_mode(op: TwoModeOperator, state: TwoModeState) -> TwoModeState:
    if op.dim != state.dim:
        raise ValidationError("operator/state dimension mismatch")
    return TwoModeState(op.entries @ state.amplitudes, dim=state.dim)


def project_ancilla(state2: TwoModeState, n: int) -> FockState:
    """Project mode 2 onto |n⟩; the returned state is NOT normalized.

    Its squared norm is the probability of detecting n photons in mode 2.
    """
    if not 0 <= n < state2.dim:
        raise ValidationError(f"ancilla photon number {n} out of range [0, {state2.dim})")
    return FockState(state2.matrix()[:, n].copy(), normalized=False)


# ---------------------------------------------------------------------------
# moments and wavefunctions


class Moments(NamedTuple):
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float
    mean_photon: float


def moments(state: FockState) -> Moments:
    """Quadrature means/variances and mean photon number of the normalized state."""
    n = state.norm()
    if n == 0.0:
        raise ValidationError("moments of a zero-norm state are undefined")
    psi = state.amplitudes / n
    x, p = _quadratures(state.dim)
    xpsi = x @ psi
    ppsi = p @ psi
    mean_x = float(np.vdot(psi, xpsi).real)
    mean_p = float(np.vdot(psi, ppsi).real)
    var_x = float(np.vdot(xpsi, xpsi).real) - mean_x**2
    var_p = float(np.vdot(ppsi, ppsi).real) - mean_p**2
    cov = float(np.vdot(xpsi, ppsi).real) - mean_x * mean_p  # Re⟨xψ|pψ⟩ = ½⟨xp+px⟩
    nbar = float(np.sum(np.arange(state.dim) * np.abs(psi) ** 2))
    return Moments(mean_x, mean_p, var_x, var_p, cov, nbar)


def hermite_functions(dim: int, xs: np.ndarray) -> np.ndarray:
    """Orthonormal Hermite functions φ_n(x) for n < dim, shape (dim, len(xs))."""
    xs = np.asarray(xs, dtype=float)
    phi = np.zeros((dim, xs.size))
    phi[0] = pi**-0.25 * np.exp(-xs * xs / 2)
    if dim > 1:
        phi[1] = sqrt(2.0) * xs * phi[0]
    for n in range(1, dim - 1):
        phi[n + 1] = sqrt(2.0 / (n + 1)) * xs * phi[n] - sqrt(n / (n + 1.0)) * phi[n - 1]
    return phi


def position_wavefunction(state: FockState, xs: np.ndarray) -> np.ndarray:
    """ψ(x) evaluated from the Fock amplitudes (unnormalized if the state is)."""
    return state.amplitudes @ hermite_functions(state.dim, xs)


def momentum_wavefunction(state: FockState, ps: np.ndarray) -> np.ndarray:
    """ψ̃(p); Fock amplitudes pick up the phase (-i)^n relative to ψ(x)."""
    phases = (-1j) ** np.arange(state.dim)
    return (state.amplitudes * phases) @ hermite_functions(state.dim, ps)


def check_tail(state: FockState, policy: TruncationPolicy, context: str = "") -> float:
    """Warn if the top-decile mass exceeds the policy tolerance; returns the mass."""
    mass = state.tail_mass()
    if mass > policy.tail_tol:
        warnings.warn(
            f"truncation tail mass {mass:.3e} exceeds tolerance {policy.tail_tol:.1e}"
            + (f" ({context})" if context else ""),
            TruncationWarning,
            stacklevel=2,
        )
    return mass
