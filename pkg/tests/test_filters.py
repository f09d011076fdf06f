"""Filter lab: signal generation, response identities, operator properties."""
import numpy as np
import pytest

from adamlab.core import InitMode
from adamlab.filters import (
    FilterKind,
    FilterSpec,
    SignalSpec,
    check_properties,
    decay_blindness,
    density_witness,
    filter_response,
    gen_signal,
    run_property_checks,
)
from adamlab.identities import scalar_adam_trace

REFERENCE_SIGNAL = SignalSpec(amplitude=1.8, frequency=0.03, decay=0.0025, length=2000)


class TestGenSignal:
    def test_starts_at_zero(self):
        g = gen_signal(SignalSpec(amplitude=1.8, frequency=0.03, decay=0.0025, length=3))
        assert g[0] == 0.0
        assert g.shape == (3,)

    def test_no_decay_is_periodic(self):
        # frequency pi/8 has an exact period of 16 steps
        spec = SignalSpec(amplitude=1.0, frequency=np.pi / 8, decay=0.0, length=64)
        g = gen_signal(spec)
        np.testing.assert_allclose(g[16:32], g[0:16], atol=1e-12)

    def test_zero_amplitude(self):
        g = gen_signal(SignalSpec(amplitude=0.0, frequency=0.03, decay=0.0, length=10))
        np.testing.assert_array_equal(g, np.zeros(10))

    def test_validation(self):
        with pytest.raises(ValueError):
            SignalSpec(length=0)
        with pytest.raises(ValueError):
            SignalSpec(decay=-1.0)


class TestFilterResponse:
    def test_sign_filter_is_elementwise_sign(self):
        rng = np.random.default_rng(50)
        g = rng.standard_normal(100)
        response = filter_response(FilterSpec(FilterKind.SIGN), g)
        np.testing.assert_array_equal(response, np.sign(g))

    def test_beta_zero_adaptive_filter_is_sign(self):
        rng = np.random.default_rng(51)
        g = rng.standard_normal(100)
        response = filter_response(FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=0.0), g)
        np.testing.assert_array_equal(response, np.sign(g))

    def test_constant_signal_zero_init_transient(self):
        beta = 0.95
        response = filter_response(
            FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=beta), np.full(50, 3.0)
        )
        expected = np.sqrt(1.0 - beta ** np.arange(1, 51))
        np.testing.assert_allclose(response, expected, rtol=1e-12)

    def test_constant_signal_first_sample_is_one(self):
        response = filter_response(
            FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=0.9, init_mode=InitMode.FIRST_SAMPLE),
            np.full(30, -2.0),
        )
        np.testing.assert_allclose(response, -1.0, rtol=1e-15)

    def test_matches_scalar_identity_trace(self):
        # dual route: the streamed optimizer equals the standalone scalar recursion
        rng = np.random.default_rng(52)
        g = rng.standard_normal(128)
        response = filter_response(FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=0.9), g)
        trace = scalar_adam_trace(g, 0.9)
        np.testing.assert_allclose(response, trace["d_variance"], rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(response, trace["d_standard"], atol=1e-12)

    def test_non_finite_signal_rejected(self):
        with pytest.raises(ValueError):
            filter_response(FilterSpec(FilterKind.SIGN), [1.0, np.nan])


class TestProperties:
    @pytest.mark.parametrize("kind", list(FilterKind))
    def test_all_four_properties_pass(self, kind):
        rng = np.random.default_rng(53)
        report = check_properties(FilterSpec(kind, beta=0.95), trials=25, tol=1e-12, rng=rng)
        assert report.passed, report.to_dict()

    def test_broken_filter_fails_odd_check(self):
        # negative control: a constant offset destroys odd symmetry
        rng = np.random.default_rng(54)
        base = FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=0.9)
        report = run_property_checks(
            lambda g: filter_response(base, g) + 0.1,
            trials=5,
            tol=1e-12,
            rng=rng,
            label="broken",
        )
        assert not report.check("odd").passed
        assert not report.passed

    def test_report_shape(self):
        rng = np.random.default_rng(55)
        report = check_properties(FilterSpec(FilterKind.SIGN), trials=3, rng=rng)
        assert {c.name for c in report.checks} == {"causal", "scaling", "odd", "bounded"}
        assert report.trials == 3
        payload = report.to_dict()
        assert payload["label"] == "sign"
        assert len(payload["checks"]) == 4


class TestDecayBlindness:
    def test_reference_signal_gap_within_tolerance(self):
        report = decay_blindness(0.95, REFERENCE_SIGNAL)
        assert report.max_gap <= 0.05
        assert report.passed

    def test_undamped_signal_has_zero_gap(self):
        spec = SignalSpec(amplitude=1.8, frequency=0.03, decay=0.0, length=500)
        report = decay_blindness(0.95, spec)
        assert report.max_gap == 0.0

    def test_global_rescale_makes_no_difference(self):
        filt = FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=0.95)
        damped = gen_signal(REFERENCE_SIGNAL)
        base = filter_response(filt, damped)
        rescaled = filter_response(filt, 7.0 * damped)
        np.testing.assert_allclose(rescaled, base, atol=1e-12)


class TestDensityWitness:
    def test_target_one_constant_signal(self):
        witness = density_witness(1.0, k=5, beta=0.9)
        assert witness.found
        assert witness.achieved == pytest.approx(1.0, abs=1e-6)

    def test_target_zero(self):
        witness = density_witness(0.0, k=5, beta=0.9)
        assert witness.found
        assert witness.achieved == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("target", [0.37, -0.8, 0.999, -0.05])
    def test_interior_targets(self, target):
        witness = density_witness(target, k=10, beta=0.9)
        assert witness.found
        assert witness.achieved == pytest.approx(target, abs=1e-6)
        # the witness signal really produces the claimed response
        filt = FilterSpec(
            FilterKind.ADAM_EQUAL_BETA, beta=0.9, init_mode=InitMode.FIRST_SAMPLE
        )
        response = filter_response(filt, witness.signal)
        assert response[10] == pytest.approx(witness.achieved, abs=1e-12)

    def test_sign_only_filter_reports_miss_honestly(self):
        # beta=0 keeps only {-1, 0, 1}; a miss is an expected outcome
        witness = density_witness(0.37, k=3, beta=0.0)
        assert not witness.found

    def test_target_validated(self):
        with pytest.raises(ValueError):
            density_witness(1.5, k=3, beta=0.9)
        with pytest.raises(ValueError):
            density_witness(0.5, k=0, beta=0.9)
