# test_fock_oracle.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynamics import (
    evolve_general,
    evolve_squeezed_frame,
    squeezed_frame_state,
    variance_pure_decay,
)
from errors import InvalidArgumentError, NumericalConsistencyError, TruncationError
from fock_oracle import (
    annihilation,
    build_generator,
    coherent_state,
    covariance_block,
    evolve_rho,
    fock_squeezed_state,
    fock_state,
    moments,
    project_psd,
    run_oracle,
    x_fourth_cumulant,
)
from gaussian_core import squeezed_vacuum
from structures import BilinearHamiltonian, ChannelRates, FockDensityMatrix, RateMatrices

DIM = 61
ORACLE_TOL = 1e-5


def test_annihilation_commutator():
    b = annihilation(DIM)
    comm = b @ b.conj().T - b.conj().T @ b
    assert np.allclose(np.diag(comm)[:-1], 1.0)
    assert np.allclose(comm - np.diag(np.diag(comm)), 0.0)


def test_vacuum_moments():
    m = moments(fock_state(0, DIM))
    assert m.mean_n == 0.0
    assert m.x_variance == pytest.approx(1.0)
    assert m.purity == pytest.approx(1.0)


def test_coherent_state_is_displaced_vacuum():
    mu = 0.8 - 0.5j
    state = covariance_block(coherent_state(mu, DIM))
    assert state.displacement[0] == pytest.approx(mu, abs=1e-10)
    assert np.allclose(state.covariance, np.eye(2), atol=1e-10)
    assert x_fourth_cumulant(coherent_state(mu, DIM)) == pytest.approx(0.0, abs=1e-8)


def test_fock_state_is_not_gaussian():
    # <1|X⁴|1> = 15, <1|X²|1> = 3
    assert x_fourth_cumulant(fock_state(1, DIM)) == pytest.approx(-12.0, abs=1e-10)
    with pytest.raises(InvalidArgumentError):
        fock_state(DIM, DIM)


@pytest.mark.parametrize("r, theta", [(0.3, 0.0), (0.5, 0.3), (0.8, 1.2)])
def test_squeezed_state_matches_gaussian(r, theta):
    rho = fock_squeezed_state(r, theta, DIM)
    gaussian = squeezed_vacuum(r, theta)
    assert np.allclose(covariance_block(rho).covariance, gaussian.covariance, atol=1e-9)
    assert moments(rho).mean_n == pytest.approx(math.sinh(r) ** 2, abs=1e-9)


def test_squeezed_state_truncation_guard():
    with pytest.raises(TruncationError):
        fock_squeezed_state(1.0, 0.0, DIM)
    assert fock_squeezed_state(1.0, 0.0, 121).dim == 121


def test_density_matrix_validation():
    with pytest.raises(NumericalConsistencyError):
        FockDensityMatrix(np.eye(10) / 2)
    with pytest.raises(TruncationError) as info:
        coherent_state(5.0, 20)
    assert info.value.tail > 1e-8


def test_generator_validation():
    with pytest.raises(InvalidArgumentError):
        build_generator(dim=4)
    with pytest.raises(InvalidArgumentError):
        build_generator(gamma_u=-1.0)
    gen = build_generator(omega=1.0, xi=0.1j, gamma_u=0.5, dim=DIM)
    assert np.allclose(gen.hamiltonian, gen.hamiltonian.conj().T)
    assert gen.max_rate == 1.0


def test_evolve_rejects_dimension_mismatch():
    gen = build_generator(gamma_u=0.1, dim=DIM)
    with pytest.raises(InvalidArgumentError):
        evolve_rho(fock_state(0, 30), gen, 1.0)
    rho = fock_state(0, DIM)
    assert evolve_rho(rho, gen, 0.0) is rho


def test_pure_decay_of_number_state():
    gamma, t = 0.4, 1.5
    gen = build_generator(gamma_u=gamma, dim=DIM)
    rho = evolve_rho(fock_state(3, DIM), gen, t)
    assert moments(rho).mean_n == pytest.approx(3 * math.exp(-gamma * t), abs=ORACLE_TOL)


def test_squeezed_variance_relaxes():
    gamma, t, r = 0.5, 1.0, 0.6
    gen = build_generator(gamma_u=gamma, dim=DIM)
    rho = evolve_rho(fock_squeezed_state(r, 0.0, DIM), gen, t)
    expected = variance_pure_decay(math.exp(-2 * r), gamma, t)
    assert moments(rho).x_variance == pytest.approx(expected, abs=ORACLE_TOL)


def test_run_oracle_doubles_dimension():
    rho = run_oracle(
        lambda dim: fock_squeezed_state(1.0, 0.0, dim), t=0.1, gamma_u=0.5, dims=(61, 121)
    )
    assert rho.dim == 121
    with pytest.raises(TruncationError):
        run_oracle(lambda dim: fock_squeezed_state(1.0, 0.0, dim), t=0.1, dims=(61,))


@given(
    r=st.floats(min_value=0.0, max_value=0.8),
    theta=st.floats(min_value=0.0, max_value=math.pi),
    gamma_u=st.floats(min_value=0.2, max_value=1.0),
    heating=st.floats(min_value=0.0, max_value=0.3),
    omega=st.floats(min_value=-2.0, max_value=2.0),
    xi_abs=st.floats(min_value=0.0, max_value=0.2),
    xi_phase=st.floats(min_value=0.0, max_value=2 * math.pi),
    delta_re=st.floats(min_value=-0.2, max_value=0.2),
    delta_im=st.floats(min_value=-0.2, max_value=0.2),
    t=st.floats(min_value=0.1, max_value=2.0),
)
@settings(max_examples=50, deadline=None)
def test_oracle_matches_gaussian_evolution(
    r, theta, gamma_u, heating, omega, xi_abs, xi_phase, delta_re, delta_im, t
):
    gamma_v = heating * gamma_u
    xi = xi_abs * np.exp(1j * xi_phase)
    delta = complex(delta_re, delta_im)

    rho = run_oracle(
        lambda dim: fock_squeezed_state(r, theta, dim),
        t,
        omega=omega,
        xi=xi,
        delta=delta,
        gamma_u=gamma_u,
        gamma_v=gamma_v,
        dims=(DIM, 121),
    )
    oracle = covariance_block(rho)

    h = BilinearHamiltonian(omegas=[omega], squeezings=[xi], drives=[delta])
    rates = RateMatrices.from_channels([ChannelRates.from_uv(gamma_u, gamma_v)])
    gaussian = evolve_general(squeezed_vacuum(r, theta), h, rates, t)

    assert np.allclose(oracle.displacement, gaussian.displacement, atol=ORACLE_TOL)
    assert np.allclose(oracle.covariance, gaussian.covariance, atol=ORACLE_TOL)


@pytest.mark.parametrize(
    "omega, xi, gamma, t, r",
    [(1.0, 0.3 + 0.1j, 0.5, 1.0, 0.0), (0.2, 0.5, 0.8, 1.5, 0.3), (0.0, -0.2j, 1.0, 2.0, 0.5)],
)
def test_oracle_matches_squeezed_frame(omega, xi, gamma, t, r):
    rho = run_oracle(
        lambda dim: fock_squeezed_state(r, 0.4, dim),
        t,
        omega=omega,
        xi=xi,
        gamma_u=gamma,
    )
    m = moments(rho)
    sf = evolve_squeezed_frame(
        squeezed_frame_state(squeezed_vacuum(r, 0.4), omega, xi, gamma), t
    )
    assert m.mean_bb == pytest.approx(complex(sf.w[0]), abs=ORACLE_TOL)
    assert m.mean_n == pytest.approx(float(np.real(sf.w[1])), abs=ORACLE_TOL)
    assert m.x_variance == pytest.approx(sf.x_variance(), abs=ORACLE_TOL)


class TestUnitaryEvolution:
    def test_free_rotation_of_coherent_state(self):
        rho = run_oracle(lambda dim: coherent_state(1.0, dim), 1.0, omega=1.0)
        assert moments(rho).mean_b == pytest.approx(np.exp(-1j), abs=ORACLE_TOL)
        assert moments(rho).purity == pytest.approx(1.0, abs=ORACLE_TOL)

    def test_drive_displaces_vacuum(self):
        rho = run_oracle(lambda dim: fock_state(0, dim), 1.0, delta=0.5)
        state = covariance_block(rho)
        assert state.displacement[0] == pytest.approx(0.5, abs=ORACLE_TOL)
        assert np.allclose(state.covariance, np.eye(2), atol=ORACLE_TOL)

    def test_undamped_squeeze_matches_gaussian(self):
        rho = run_oracle(lambda dim: fock_state(0, dim), 0.5, omega=1.0, xi=0.95)
        assert np.min(np.linalg.eigvalsh(rho.rho)) >= -1e-14
        assert np.real(np.trace(rho.rho)) == pytest.approx(1.0, abs=1e-12)

        h = BilinearHamiltonian(omegas=[1.0], squeezings=[0.95], drives=[0.0])
        rates = RateMatrices.from_channels([ChannelRates.from_uv(0.0, 0.0)])
        gaussian = evolve_general(squeezed_vacuum(0.0), h, rates, 0.5)
        assert np.allclose(covariance_block(rho).covariance, gaussian.covariance, atol=ORACLE_TOL)

    def test_project_psd_clips_negative_eigenvalues(self):
        state = np.diag([1.0 + 1e-9, -1e-9, 0.0]).astype(complex)
        rho = project_psd(state)
        assert np.min(np.linalg.eigvalsh(rho)) >= 0.0
        assert np.real(np.trace(rho)) == pytest.approx(1.0, abs=1e-15)
        assert FockDensityMatrix(np.pad(rho, (0, 7))).dim == 10


def test_tail_overflow_in_mid_evolution():
    # |Ξ| < ω: сжатие осциллирует, при t = π/ν мода возвращается в вакуум,
    # а в максимуме <n> = Ξ²/ν² ≈ 4.3 не помещается в 61 уровень
    omega, xi = 1.0, 0.9
    nu = math.sqrt(omega**2 - xi**2)
    gen = build_generator(omega=omega, xi=xi, dim=DIM)
    with pytest.raises(TruncationError) as info:
        evolve_rho(fock_state(0, DIM), gen, math.pi / nu)
    assert info.value.tail >= 1e-8


class TestGaussianity:
    def test_damped_squeezed_state_stays_gaussian(self):
        rates = ChannelRates.from_pm(0.2, 0.3)
        gen = build_generator(gamma_u=rates.gamma_u, gamma_v=rates.gamma_v, dim=DIM)
        rho = evolve_rho(fock_squeezed_state(0.5, 0.0, DIM), gen, 1.0)
        assert abs(x_fourth_cumulant(rho)) < 1e-5

    def test_damped_coherent_state_stays_gaussian(self):
        rates = ChannelRates.from_pm(0.2, 0.3)
        gen = build_generator(
            omega=0.7, gamma_u=rates.gamma_u, gamma_v=rates.gamma_v, dim=DIM
        )
        rho = evolve_rho(coherent_state(1.2 - 0.4j, DIM), gen, 1.0)
        assert abs(x_fourth_cumulant(rho)) < 1e-5
