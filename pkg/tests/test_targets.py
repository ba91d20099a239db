"""Unit tests for grid-state targets, fitting, damping and Wigner functions."""

from math import cos, exp, pi, sin, sqrt

import numpy as np
import pytest

from gkp_breeding import (
    GkpTarget,
    GridSpec,
    ParameterWarning,
    ValidationError,
    codeword,
    db_to_delta,
    fidelity,
    fit_effective_squeezing,
    fit_two_parameter,
    logical_flip,
    momentum_wavefunction,
    optimize_envelope_damping,
    position_wavefunction,
    qubit_target,
    squeezed_vacuum,
    squeezing_db,
    target_state,
    vacuum_state,
    wigner,
)
from gkp_breeding.fock import FockState
from gkp_breeding.targets import envelope_cutoff


def test_squeezing_db_values():
    assert squeezing_db(sqrt(10.0)) == pytest.approx(10.0, abs=1e-12)
    assert squeezing_db(1.0) == 0.0
    assert squeezing_db(exp(1.0)) == pytest.approx(8.685889638, abs=1e-8)
    assert db_to_delta(squeezing_db(2.2)) == pytest.approx(2.2, rel=1e-12)


def test_envelope_cutoff_bound():
    for kappa in (1.0, 2.5, sqrt(5 * pi)):
        s = envelope_cutoff(kappa)
        dropped = exp(-(((2 * s + 2) * sqrt(pi)) ** 2) / (2 * kappa**2))
        assert dropped < 1e-10
        assert s >= 8


def test_codeword_small_envelope_is_squeezed_vacuum(policy):
    cw = codeword(0, 2.0, 0.05, policy)
    assert fidelity(cw, squeezed_vacuum(2.0, policy)) > 0.9999


def test_codeword_parity(policy):
    # both combs sit on sign-symmetric position sets with even envelopes, so
    # both codewords are even under x -> -x (and live on even photon numbers)
    xs = np.linspace(-8, 8, 1601)
    for k in (0, 1):
        wf = position_wavefunction(codeword(k, 2.0, sqrt(2 * pi), policy), xs)
        assert np.max(np.abs(wf - wf[::-1])) < 1e-8
    assert np.max(np.abs(codeword(1, 2.0, sqrt(2 * pi), policy).amplitudes[1::2])) < 1e-12


def test_codeword_near_orthogonality(policy):
    d = sqrt(10.0)
    overlap = abs(
        np.vdot(codeword(0, d, d, policy).amplitudes, codeword(1, d, d, policy).amplitudes)
    )
    assert overlap < 1e-2


def test_qubit_target_limits(policy):
    assert fidelity(
        qubit_target(1.0, 0.0, 0.3, 2.0, 2.0, policy), codeword(0, 2.0, 2.0, policy)
    ) == pytest.approx(1.0, abs=1e-12)
    h = qubit_target(cos(pi / 8), sin(pi / 8), -pi / 4, 2.0, 2.0, policy)
    rotated = FockState(h.amplitudes * np.exp(1.1j))
    assert fidelity(h, rotated) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        qubit_target(1.0, 1.0, 0.0, 2.0, 2.0, policy)


def test_logical_flip():
    cw = GkpTarget("codeword", k=0)
    assert logical_flip(cw, 2) == cw
    assert logical_flip(cw, 3).k == 1
    assert logical_flip(logical_flip(cw, 1), 1) == cw
    q = GkpTarget("qubit", alpha=0.8, beta=0.6, phi=0.4)
    fq = logical_flip(q, 1)
    assert (fq.alpha, fq.beta, fq.phi) == (0.6, 0.8, -0.4)
    assert logical_flip(fq, 1) == q


def test_fit_self_consistency(policy):
    delta = db_to_delta(6.4)
    state = codeword(0, delta, delta, policy)
    fit = fit_effective_squeezing(state, GkpTarget("codeword", k=0), policy)
    assert fit.db == pytest.approx(6.4, abs=0.005)
    assert fit.fidelity > 1 - 1e-9
    assert not fit.at_bracket_edge
    rotated = FockState(state.amplitudes * np.exp(0.77j))
    fit2 = fit_effective_squeezing(rotated, GkpTarget("codeword", k=0), policy)
    assert fit2.db == fit.db and fit2.fidelity == pytest.approx(fit.fidelity, rel=1e-12)


def test_fit_vacuum_lands_at_low_end(policy):
    fit = fit_effective_squeezing(vacuum_state(policy), GkpTarget("codeword", k=0), policy)
    assert fit.db <= 0.05
    assert 0.0 < fit.fidelity <= 1.0


def test_fit_bracket_edge_warns(policy):
    state = codeword(0, db_to_delta(14.5), db_to_delta(14.5), policy)
    with pytest.warns(ParameterWarning):
        fit = fit_effective_squeezing(state, GkpTarget("codeword", k=0), policy)
    assert fit.at_bracket_edge
    assert fit.db == pytest.approx(14.0, abs=1e-9)


def test_fit_qubit_family(policy):
    delta = db_to_delta(7.0)
    state = qubit_target(cos(pi / 8), sin(pi / 8), -pi / 4, delta, delta, policy)
    fam = GkpTarget("qubit", alpha=cos(pi / 8), beta=sin(pi / 8), phi=-pi / 4)
    fit = fit_effective_squeezing(state, fam, policy)
    assert fit.db == pytest.approx(7.0, abs=0.005)
    assert fit.fidelity > 1 - 1e-9


def test_fit_two_parameter_recovers(policy):
    state = codeword(0, db_to_delta(6.0), db_to_delta(7.5), policy)
    delta, kappa, f = fit_two_parameter(state, GkpTarget("codeword", k=0), policy)
    assert squeezing_db(delta) == pytest.approx(6.0, abs=0.1)
    assert squeezing_db(kappa) == pytest.approx(7.5, abs=0.1)
    assert f > 1 - 1e-6


def test_optimize_damping_matched_state(policy):
    delta = db_to_delta(6.4)
    state = codeword(0, delta, delta, policy)
    res = optimize_envelope_damping(state, GkpTarget("codeword", k=0), policy)
    assert res.t <= 0.01
    assert res.fidelity > 1 - 1e-3
    assert res.probability <= 1.0


def test_optimize_damping_improves_wide_envelope(policy):
    delta = db_to_delta(6.4)
    state = codeword(0, delta, sqrt(3 * pi), policy)
    base = fit_effective_squeezing(state, GkpTarget("codeword", k=0), policy).fidelity
    res = optimize_envelope_damping(state, GkpTarget("codeword", k=0), policy)
    assert res.t > 0.0
    assert res.fidelity > base
    assert 0.0 < res.probability <= 1.0


def test_wigner_vacuum(policy):
    grid = GridSpec()
    w = wigner(vacuum_state(policy), grid)
    i0 = grid.n_p // 2
    j0 = grid.n_x // 2
    assert w.values[i0, j0] == pytest.approx(1 / pi, abs=1e-12)
    total = np.trapezoid(np.trapezoid(w.values, grid.xs(), axis=1), grid.ps())
    assert total == pytest.approx(1.0, abs=1e-3)


def test_wigner_moment_orientation(policy):
    from gkp_breeding import GateSpec, apply, gaussian_unitary
    from gkp_breeding.fock import FockOperator, _quadratures, op_exp

    xq, pq = 1.0, 0.5
    st = apply(gaussian_unitary(GateSpec("displace", xq), policy), vacuum_state(policy))
    # give it momentum +0.5 through e^{i u x}
    x, _ = _quadratures(policy.dim)
    u = op_exp(FockOperator(1j * pq * x, "ix"), tol=1e-13)
    st = FockState(u.entries @ st.amplitudes).normalized_copy()
    grid = GridSpec()
    w = wigner(st, grid)
    mx = np.trapezoid(np.trapezoid(w.values * grid.xs()[None, :], grid.xs(), axis=1), grid.ps())
    mp_ = np.trapezoid(np.trapezoid(w.values * grid.ps()[:, None], grid.xs(), axis=1), grid.ps())
    assert mx == pytest.approx(xq, abs=1e-6)
    assert mp_ == pytest.approx(pq, abs=1e-6)


def test_wigner_marginals(policy):
    # two-peak superposition exercises the interference terms
    from gkp_breeding import displaced_squeezed

    state = FockState(
        displaced_squeezed(-1.5, 1.0, policy.dim).amplitudes
        + displaced_squeezed(1.5, 1.0, policy.dim).amplitudes
    ).normalized_copy()
    grid = GridSpec()
    w = wigner(state, grid)
    marg_x = np.trapezoid(w.values, grid.ps(), axis=0)
    marg_p = np.trapezoid(w.values, grid.xs(), axis=1)
    ref_x = np.abs(position_wavefunction(state, grid.xs())) ** 2
    ref_p = np.abs(momentum_wavefunction(state, grid.ps())) ** 2
    assert np.max(np.abs(marg_x - ref_x)) < 1e-4
    assert np.max(np.abs(marg_p - ref_p)) < 1e-4


def test_wigner_coarse_grid_warns(policy):
    with pytest.warns(ParameterWarning):
        wigner(vacuum_state(policy), GridSpec(n_x=21, n_p=21))


def test_target_state_requires_concrete_member(policy):
    with pytest.raises(ValidationError):
        target_state(GkpTarget("codeword", k=0), policy)
