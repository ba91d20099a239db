"""Unit tests for the truncated Fock-space layer."""

from math import exp, log

import numpy as np
import pytest

from gkp_breeding import (
    FockOperator,
    FockState,
    NumericError,
    TruncationPolicy,
    TruncationWarning,
    ValidationError,
    apply,
    basis_state,
    fidelity,
    identity_op,
    is_unitary_interior,
    ladder_ops,
    moments,
    momentum_wavefunction,
    op_exp,
    position_wavefunction,
    project_ancilla,
    quadrature_ops,
    tensor,
    vacuum_state,
)
from gkp_breeding.fock import check_tail


def test_policy_validation():
    with pytest.raises(ValidationError):
        TruncationPolicy(dim=1)
    with pytest.raises(ValidationError):
        TruncationPolicy(pad_factor=0)
    with pytest.raises(ValidationError):
        TruncationPolicy(dim=3000, pad_factor=2)
    assert TruncationPolicy().padded_dim == 112


def test_ladder_basics(policy):
    lower, raise_ = ladder_ops(policy)
    one = basis_state(1, policy)
    out = apply(lower, one)
    assert abs(out.amplitudes[0] - 1.0) < 1e-15
    number = (raise_ @ lower).entries
    assert np.allclose(np.diag(number), np.arange(policy.dim))


def test_truncated_commutator_corner():
    pol = TruncationPolicy(dim=3)
    lower, raise_ = ladder_ops(pol)
    comm = lower.entries @ raise_.entries - raise_.entries @ lower.entries
    # truncation turns the top-corner commutator into -(dim-1)
    assert abs(comm[2, 2] - (-2.0)) < 1e-15
    assert np.allclose(comm[:2, :2], np.eye(2))


def test_quadratures(policy):
    x, p = quadrature_ops(policy)
    assert np.max(np.abs(x.entries - x.dag().entries)) == 0.0
    vac = vacuum_state(policy)
    m = moments(vac)
    assert m == pytest.approx((0.0, 0.0, 0.5, 0.5, 0.0, 0.0), abs=1e-12)


def test_commutator_interior_block():
    pol = TruncationPolicy(dim=12)
    x, p = quadrature_ops(pol)
    comm = x.entries @ p.entries - p.entries @ x.entries
    interior = comm[:11, :11]
    assert np.max(np.abs(interior - 1j * np.eye(11))) < 1e-10
    assert abs(comm[11, 11] - 1j) > 1.0  # boundary row deviates


def test_op_exp_zero_and_diagonal(policy):
    zero = FockOperator(np.zeros((8, 8)), label="zero")
    assert np.allclose(op_exp(zero).entries, np.eye(8))
    theta = 0.7
    gen = FockOperator(1j * theta * np.diag(np.arange(10.0)), label="i·θ·n")
    expected = np.exp(1j * theta * np.arange(10))
    assert np.max(np.abs(np.diag(op_exp(gen).entries) - expected)) < 1e-13


def test_op_exp_inverse_pair(rng):
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    m *= 2.0 / np.linalg.norm(m, 1)
    op = FockOperator(m, label="random")
    tol = 1e-13
    a = op_exp(op, tol).entries
    b = op_exp(FockOperator(-m, label="-random"), tol).entries
    kappa = np.linalg.norm(a, 1) * np.linalg.norm(b, 1)
    assert np.max(np.abs(a @ b - np.eye(12))) < 10 * tol * kappa


def test_op_exp_commuting_homomorphism(rng):
    da = np.diag(rng.normal(size=9) + 1j * rng.normal(size=9))
    db = np.diag(rng.normal(size=9) + 1j * rng.normal(size=9))
    tol = 1e-13
    lhs = op_exp(FockOperator(da, "A"), tol).entries @ op_exp(FockOperator(db, "B"), tol).entries
    rhs = op_exp(FockOperator(da + db, "A+B"), tol).entries
    assert np.max(np.abs(lhs - rhs)) < 10 * tol * np.linalg.norm(rhs, 1)


def test_op_exp_nonconvergence_names_label():
    op = FockOperator(np.eye(4), label="my-generator")
    with pytest.raises(NumericError, match="my-generator"):
        op_exp(op, tol=0.0)


def test_op_exp_agrees_with_scipy(rng):
    from scipy.linalg import expm

    m = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    assert np.max(np.abs(op_exp(FockOperator(m, "m")).entries - expm(m))) < 1e-10


def test_fidelity_basics(policy):
    vac = vacuum_state(policy)
    one = basis_state(1, policy)
    assert fidelity(vac, vac) == pytest.approx(1.0, abs=1e-14)
    assert fidelity(vac, one) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValidationError):
        fidelity(vac, FockState(np.zeros(policy.dim)))


def test_fidelity_coherent_overlap(policy):
    # |<0|D(d)|0>|^2 = exp(-d^2/2) for d = 1
    _, p = quadrature_ops(TruncationPolicy(dim=policy.padded_dim, pad_factor=1))
    disp = op_exp(FockOperator(-1j * 1.0 * p.entries, label="displace-gen"))
    state = FockState(disp.entries[: policy.dim, : policy.dim] @ vacuum_state(policy).amplitudes)
    assert fidelity(vacuum_state(policy), state) == pytest.approx(exp(-0.5), abs=1e-9)


def test_fidelity_properties(policy, rng):
    a = FockState(rng.normal(size=policy.dim) + 1j * rng.normal(size=policy.dim))
    b = FockState(rng.normal(size=policy.dim) + 1j * rng.normal(size=policy.dim))
    f = fidelity(a, b)
    assert 0.0 <= f <= 1.0
    assert fidelity(b, a) == pytest.approx(f, rel=1e-12)
    rotated = FockState(a.amplitudes * np.exp(0.913j))
    assert fidelity(rotated, b) == pytest.approx(f, rel=1e-12)


def test_tensor_identities(policy):
    pol = TruncationPolicy(dim=6)
    eye = identity_op(pol)
    two = tensor(eye, eye)
    assert np.allclose(two.entries, np.eye(36))
    vac2 = tensor(vacuum_state(pol), vacuum_state(pol))
    assert vac2.norm() == pytest.approx(1.0, abs=1e-14)


def test_tensor_matrix_elements(rng):
    pol = TruncationPolicy(dim=4)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    two = tensor(FockOperator(a, "A"), FockOperator(b, "B"))
    for _ in range(12):
        m, n, mp, np_ = rng.integers(0, 4, size=4)
        lhs = two.entries[m * 4 + n, mp * 4 + np_]
        assert lhs == pytest.approx(a[m, mp] * b[n, np_], rel=1e-12)


def test_tensor_dim_mismatch():
    with pytest.raises(ValidationError):
        tensor(vacuum_state(TruncationPolicy(dim=5)), vacuum_state(TruncationPolicy(dim=6)))


def test_project_ancilla_basis(policy):
    pol = TruncationPolicy(dim=8)
    zero_three = tensor(basis_state(0, pol), basis_state(3, pol))
    hit = project_ancilla(zero_three, 3)
    assert abs(hit.amplitudes[0] - 1.0) < 1e-14
    miss = project_ancilla(zero_three, 2)
    assert np.all(miss.amplitudes == 0)
    with pytest.raises(ValidationError):
        project_ancilla(zero_three, 8)


def test_projection_completeness(rng):
    pol = TruncationPolicy(dim=10)
    raw = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    raw /= np.linalg.norm(raw)
    from gkp_breeding import TwoModeState

    psi = TwoModeState(raw.reshape(-1), dim=10)
    total = sum(project_ancilla(psi, n).norm() ** 2 for n in range(10))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_moments_squeezed(policy):
    # build |S_2> directly from the generator exponential
    from gkp_breeding.fock import _ladder

    pdim = policy.padded_dim
    a = _ladder(pdim)
    gen = 0.5 * log(2.0) * (a @ a - a.conj().T @ a.conj().T)
    sq = op_exp(FockOperator(gen, "squeeze-gen"))
    state = FockState(sq.entries[: policy.dim, 0])
    m = moments(state)
    assert m.var_x == pytest.approx(1.0 / 8.0, abs=1e-9)
    assert m.var_p == pytest.approx(2.0, abs=1e-6)
    assert moments(basis_state(1, policy)).mean_photon == pytest.approx(1.0, abs=1e-12)


def test_normalized_flag_enforced(policy):
    with pytest.raises(ValidationError):
        FockState(np.ones(policy.dim), normalized=True)
    with pytest.raises(ValidationError):
        FockState(np.array([np.nan] * policy.dim))


def test_tail_warning(policy):
    amps = np.zeros(policy.dim)
    amps[-1] = 1e-3
    amps[0] = 1.0
    state = FockState(amps)
    with pytest.warns(TruncationWarning):
        check_tail(state, policy, context="test")


def test_unitary_interior_check(policy):
    from gkp_breeding import GateSpec, gaussian_unitary

    # small parameters: the cropped gate is unitary well past the interior block
    disp = gaussian_unitary(GateSpec("displace", 0.3), policy)
    assert is_unitary_interior(disp)
    rot = gaussian_unitary(GateSpec("rotate", 1.2), policy)
    assert is_unitary_interior(rot)
    damp = FockOperator(np.diag(np.exp(-0.3 * np.arange(policy.dim))), "decay")
    assert not is_unitary_interior(damp)


def test_wavefunctions_orthonormal(policy):
    xs = np.linspace(-12, 12, 4001)
    for n in (0, 1, 5):
        wf = position_wavefunction(basis_state(n, policy), xs)
        assert np.trapezoid(np.abs(wf) ** 2, xs) == pytest.approx(1.0, abs=1e-8)
    # momentum wavefunction of |1> is still normalized and odd
    wfp = momentum_wavefunction(basis_state(1, policy), xs)
    assert np.trapezoid(np.abs(wfp) ** 2, xs) == pytest.approx(1.0, abs=1e-8)
    assert abs(wfp[2000]) < 1e-12
