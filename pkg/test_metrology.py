# test_metrology.py
import logging
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynamics import evolve_rwa
from errors import (
    InvalidArgumentError,
    NoInformationError,
    SingularPurityError,
)
from gaussian_core import eigen_spectrum, squeezed_vacuum
from metrology import (
    SCHEMES,
    cramer_rao,
    displacement_family,
    evaluate_scheme,
    heisenberg_rotation_qfi,
    optimal_duration,
    phase_family,
    qfi_continuous_squeezing,
    qfi_displacement,
    qfi_finite_difference,
    qfi_gaussian,
    qfi_rotation,
    qfi_squeezing,
    rotation_family,
    scheme_eigenvalues,
    sensitivity_displacement,
    sensitivity_rotation,
    squeezing_family,
)
from structures import ChannelRates, QfiInput, RateMatrices

NO_DECAY = ChannelRates.from_pm(0.0, 0.0)


def _decayed(r, theta=0.0, gamma_minus=0.2, gamma_plus=0.6, t=1.5):
    rates = RateMatrices.from_channels([ChannelRates.from_pm(gamma_minus, gamma_plus)])
    return evolve_rwa(squeezed_vacuum(r, theta), rates, t)


class TestClosedForms:
    @given(r=st.floats(min_value=0.1, max_value=3.0))
    def test_pure_rotation_identity(self, r):
        result = qfi_rotation(math.exp(-2 * r), math.exp(2 * r))
        n = math.sinh(r) ** 2
        assert result.qfi == pytest.approx(8 * n * (n + 1), rel=1e-10)
        assert heisenberg_rotation_qfi(r) == pytest.approx(result.qfi, rel=1e-10)

    def test_reference_values(self):
        assert evaluate_scheme("rotation", 1.0, NO_DECAY, 0.0).qfi == pytest.approx(
            26.3082, abs=1e-4
        )
        squeezing = evaluate_scheme("squeezing", 1.0, NO_DECAY, 0.0, phi=math.pi / 4)
        assert squeezing.qfi == pytest.approx(28.3082, abs=1e-4)
        assert squeezing.optimal_angle == pytest.approx(math.pi / 4)
        assert evaluate_scheme("squeezing", 1.0, NO_DECAY, 0.0, phi=0.0).qfi == pytest.approx(
            2.0, rel=1e-10
        )
        amplitude = evaluate_scheme("displacement-amplitude", 1.0, NO_DECAY, 0.0)
        assert amplitude.qfi == pytest.approx(4 * math.exp(2.0), rel=1e-10)
        phase = evaluate_scheme("displacement-phase", 1.0, NO_DECAY, 0.0, mu=2.0)
        assert phase.qfi == pytest.approx(16 * math.exp(2.0), rel=1e-10)
        assert phase.optimal_angle == pytest.approx(math.pi / 2)

    def test_squeezing_is_maximal_at_quarter_pi(self):
        lm, lp = eigen_spectrum(_decayed(1.0))
        values = [qfi_squeezing(lm, lp, phi).qfi for phi in np.linspace(0, math.pi, 41)]
        best = qfi_squeezing(lm, lp, math.pi / 4).qfi
        assert max(values) == pytest.approx(best)
        assert qfi_squeezing(lm, lp, 3 * math.pi / 4).qfi == pytest.approx(best)

    def test_continuous_squeezing_scales_with_time(self):
        lm, lp = 0.2, 6.0
        f1 = qfi_continuous_squeezing(lm, lp, 0.3, 1.0).qfi
        f3 = qfi_continuous_squeezing(lm, lp, 0.3, 3.0).qfi
        assert f3 == pytest.approx(9 * f1)
        zero = evaluate_scheme("continuous-squeezing", 1.0, NO_DECAY, 0.0)
        assert zero.qfi == 0.0
        assert zero.delta_theta == math.inf

    def test_argument_checks(self):
        with pytest.raises(InvalidArgumentError):
            qfi_displacement(0.0)
        with pytest.raises(InvalidArgumentError):
            qfi_displacement(0.5, 0.0, mode="phase")
        with pytest.raises(InvalidArgumentError):
            qfi_displacement(0.5, mode="other")
        with pytest.raises(InvalidArgumentError):
            qfi_rotation(2.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            qfi_squeezing(-1.0, 1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            qfi_continuous_squeezing(1.0, 1.0, 0.0, -1.0)
        with pytest.raises(InvalidArgumentError):
            evaluate_scheme("interferometer", 1.0, NO_DECAY, 0.0)

    def test_all_schemes_evaluate(self):
        rates = ChannelRates.from_pm(0.01, 0.05)
        for scheme in SCHEMES:
            result = evaluate_scheme(scheme, 1.0, rates, 2.0)
            assert result.scheme == scheme
            assert result.qfi > 0
            assert result.delta_theta == pytest.approx(1 / math.sqrt(result.qfi))

    def test_decoherence_lowers_information(self):
        pure = evaluate_scheme("rotation", 1.5, NO_DECAY, 0.0).qfi
        noisy = evaluate_scheme("rotation", 1.5, ChannelRates.from_pm(0.1, 0.3), 1.0).qfi
        assert noisy < pure


class TestGaussianFormula:
    def test_displacement_of_vacuum(self):
        inp = QfiInput(
            sigma=np.eye(2),
            sigma_prime=np.zeros((2, 2)),
            d_prime=np.array([1.0, 1.0]),
            purity=1.0,
        )
        assert qfi_gaussian(inp) == pytest.approx(4.0)

    def test_singular_purity(self):
        inp = QfiInput(
            sigma=np.eye(2),
            sigma_prime=np.zeros((2, 2)),
            d_prime=np.zeros(2),
            purity=1.0,
            purity_prime=0.1,
        )
        with pytest.raises(SingularPurityError):
            qfi_gaussian(inp)

    def test_mixed_purity_term(self):
        inp = QfiInput(
            sigma=2 * np.eye(2),
            sigma_prime=np.zeros((2, 2)),
            d_prime=np.zeros(2),
            purity=0.5,
            purity_prime=0.3,
        )
        assert qfi_gaussian(inp) == pytest.approx(2 * 0.09 / (1 - 0.5**4))

    def test_input_validation(self):
        with pytest.raises(InvalidArgumentError):
            QfiInput(np.eye(2), np.zeros((2, 2)), np.zeros(2), purity=1.5)
        with pytest.raises(InvalidArgumentError):
            QfiInput(np.eye(2), np.zeros((3, 3)), np.zeros(2), purity=1.0)

    def test_cramer_rao(self):
        assert cramer_rao(4.0) == 0.5
        with pytest.raises(NoInformationError):
            cramer_rao(0.0)


class TestFiniteDifference:
    @pytest.mark.parametrize("r", [0.3, 1.0, 1.8])
    def test_displacement_amplitude(self, r):
        state = _decayed(r)
        estimate = qfi_finite_difference(displacement_family(state), 0.0)
        expected = qfi_displacement(eigen_spectrum(state)[0]).qfi
        assert estimate.qfi == pytest.approx(expected, rel=1e-4)
        assert estimate.step == pytest.approx(1e-5)

    def test_displacement_phase(self):
        mu = 1.3
        state = _decayed(1.0, theta=math.pi / 2)
        estimate = qfi_finite_difference(phase_family(state, mu), 0.0)
        expected = qfi_displacement(eigen_spectrum(state)[0], mu, mode="phase").qfi
        assert estimate.qfi == pytest.approx(expected, rel=1e-4)

    @pytest.mark.parametrize("pure", [True, False])
    def test_rotation(self, pure):
        state = squeezed_vacuum(1.0) if pure else _decayed(1.0)
        estimate = qfi_finite_difference(rotation_family(state), 0.3)
        expected = qfi_rotation(*eigen_spectrum(state)).qfi
        assert estimate.qfi == pytest.approx(expected, rel=1e-4)

    def test_rotation_base_point_independent(self):
        family = rotation_family(_decayed(1.2))
        values = [qfi_finite_difference(family, theta).qfi for theta in (0.0, 0.7, 1.1, -2.0)]
        assert max(values) == pytest.approx(min(values), rel=1e-6)

    @pytest.mark.parametrize("phi", [0.0, math.pi / 8, math.pi / 4])
    @pytest.mark.parametrize("pure", [True, False])
    def test_squeezing(self, phi, pure):
        state = squeezed_vacuum(1.0) if pure else _decayed(1.0)
        estimate = qfi_finite_difference(squeezing_family(state, phi), 0.0)
        expected = qfi_squeezing(*eigen_spectrum(state), phi).qfi
        assert estimate.qfi == pytest.approx(expected, rel=1e-4)

    def test_step_scales_with_base_point(self):
        family = displacement_family(squeezed_vacuum(0.5), phi_mu=0.2)
        assert qfi_finite_difference(family, 40.0).step == pytest.approx(4e-4)
        with pytest.raises(InvalidArgumentError):
            qfi_finite_difference(family, 0.0, h=0.0)


class TestSensitivity:
    def test_displacement_matches_amplitude_qfi(self):
        r, gamma, t = 2.0, 1e-3, 1.0
        lm, _ = scheme_eigenvalues(r, ChannelRates.from_pm(gamma, gamma), t)
        exact = cramer_rao(qfi_displacement(lm).qfi)
        # |D'| = √2 для D' = (1, 1)
        assert sensitivity_displacement(r, gamma, t, math.sqrt(2)) == pytest.approx(
            exact, rel=1e-3
        )
        assert sensitivity_displacement(0.0, 0.0, 0.0, 1.0) == pytest.approx(1 / math.sqrt(2))

    def test_rotation_asymptote(self):
        exact = cramer_rao(qfi_rotation(math.exp(-6), math.exp(6)).qfi)
        assert sensitivity_rotation(3.0, 0.0, 0.0) == pytest.approx(exact, rel=1e-3)
        # декогеренция: Δ ∝ e^{−r}√(γ⁺t) при e^{2r}γ⁺t ≫ 2
        assert sensitivity_rotation(3.0, 1.0, 10.0) == pytest.approx(
            math.exp(-3) * math.sqrt(10.0), rel=1e-3
        )

    @pytest.mark.parametrize("x", np.geomspace(0.1, 10.0, 9))
    def test_rotation_asymptote_matches_evolved_state(self, x):
        # x = γ⁺t·e^{2r}
        r, gamma = 3.0, 1.0
        t = x * math.exp(-2 * r) / gamma
        state = evolve_rwa(squeezed_vacuum(r), RateMatrices.pure_decay([gamma]), t)
        exact = cramer_rao(qfi_rotation(*eigen_spectrum(state, 0)).qfi)
        assert sensitivity_rotation(r, gamma, t) == pytest.approx(exact, rel=0.05)

    def test_rotation_asymptote_warns_for_weak_squeezing(self, caplog):
        with caplog.at_level(logging.WARNING, logger="metrology"):
            sensitivity_rotation(0.5, 0.1, 1.0)
        assert "asymptote" in caplog.text

    def test_invalid_arguments(self):
        with pytest.raises(InvalidArgumentError):
            sensitivity_displacement(1.0, 0.1, 1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            sensitivity_rotation(-1.0, 0.1, 1.0)


class TestOptimalDuration:
    def test_minimum_over_grid(self):
        rates = ChannelRates.from_pm(0.1, 0.1)
        t_max = 50.0
        t_opt, delta_min = optimal_duration(1.0, rates, t_max=t_max)
        assert 0 < t_opt <= t_max
        grid = [
            qfi_continuous_squeezing(*scheme_eigenvalues(1.0, rates, t), math.pi / 4, t).delta_theta
            for t in np.linspace(0.5, t_max, 100)
        ]
        assert delta_min <= min(grid) * (1 + 1e-6)

    def test_rejects_bad_horizon(self):
        with pytest.raises(InvalidArgumentError):
            optimal_duration(1.0, NO_DECAY, t_max=0.0)
