"""
Per-sync error terms and the TA-based path-delay residual.

 - sampler bounds, scalar/array forms and seeding
 - residual of the floor quantizer and its correction modes
 - path-delay statistics for Gaussian ToA (kappa = 1, 2)
 - common random numbers: matched seeds halve the residual per numerology
"""
import numpy as np
import pytest

from error_models import (
    Correction,
    CorrectionMode,
    ErrorConfig,
    ToaModel,
    ToaModelKind,
    TRUNCATION_SIGMAS,
    compose_sync_error,
    correction_term,
    pd_estimation_residual,
    sample_item,
    sample_rtge,
    sample_tae,
    sample_toa,
    toa_bound_3gpp,
    toa_sigma,
)
from exceptions import TimingDomainError
from nr_timing import Numerology, ta_granularity, ta_time_unit
from stats import summarize

N_DRAWS = 200_000
# Path-delay statistics are averaged over seeds at this draw count.
STAT_DRAWS = 1_000_000
STAT_SEEDS = (42, 7, 2024)
GAUSSIAN_K2 = ToaModel(ToaModelKind.GAUSSIAN, 2.0)
GAUSSIAN_K1 = ToaModel(ToaModelKind.GAUSSIAN, 1.0)


def _default_pd(num):
    return ErrorConfig().resolved_true_pd_ns(num)


def _seed_averaged(num, toa_model, correction, stat):
    values = [
        getattr(summarize(pd_estimation_residual(_default_pd(num), num, toa_model, correction,
                                                 np.random.default_rng(seed), size=STAT_DRAWS)), stat)
        for seed in STAT_SEEDS
    ]
    return float(np.mean(values))


def test_tae_within_bound(rng):
    draws = sample_tae(65.0, rng, size=N_DRAWS)
    assert draws.shape == (N_DRAWS,)
    assert np.all(np.abs(draws) <= 65.0)
    assert abs(draws.mean()) < 1.0


def test_zero_bounds_give_zero(rng):
    assert sample_tae(0.0, rng) == 0.0
    assert sample_rtge(0.0, rng) == 0.0
    assert isinstance(sample_tae(0.0, rng), float)


def test_rtge_within_half_granularity(rng):
    draws = sample_rtge(300.0, rng, size=N_DRAWS)
    assert np.all(np.abs(draws) <= 150.0)
    assert draws.max() > 149.0


def test_negative_bounds_rejected(rng):
    with pytest.raises(TimingDomainError):
        sample_tae(-1.0, rng)
    with pytest.raises(TimingDomainError):
        sample_rtge(-1.0, rng)
    with pytest.raises(TimingDomainError):
        ErrorConfig(rtge_granularity_range_ns=(300.0, 10.0))


@pytest.mark.parametrize("overrides", [
    {"tae_bound_ns": float("nan")},
    {"rtge_granularity_ns": float("inf")},
    {"rtge_granularity_range_ns": (float("nan"), float("nan"))},
    {"rtge_granularity_range_ns": (10.0, float("inf"))},
    {"true_pd_ns": float("nan")},
])
def test_non_finite_error_config_rejected(overrides):
    with pytest.raises(TimingDomainError):
        ErrorConfig(**overrides)


def test_non_finite_model_parameters_rejected(num15, rng):
    with pytest.raises(TimingDomainError):
        ToaModel(ToaModelKind.GAUSSIAN, float("inf"))
    with pytest.raises(TimingDomainError):
        Correction(CorrectionMode.CUSTOM, float("nan"))
    with pytest.raises(TimingDomainError):
        sample_tae(float("nan"), rng)
    with pytest.raises(TimingDomainError):
        pd_estimation_residual(float("inf"), num15, GAUSSIAN_K2, Correction(), rng)


def test_toa_bounds(num15):
    assert toa_bound_3gpp(num15) == pytest.approx(390.625)
    assert toa_bound_3gpp(Numerology(mu=3)) == pytest.approx(3.5 * 64 * num15.t_c_ns)
    assert toa_sigma(num15, 2.0) == pytest.approx(ta_time_unit(num15) / 2)
    with pytest.raises(TimingDomainError):
        toa_sigma(num15, 0.0)


def test_table_toa_uniform_within_bound(num30, rng):
    draws = sample_toa(ToaModel(ToaModelKind.TABLE_3GPP), num30, rng, size=N_DRAWS)
    assert np.all(np.abs(draws) <= toa_bound_3gpp(num30))


def test_gaussian_toa_truncated(num15, rng):
    draws = sample_toa(GAUSSIAN_K2, num15, rng, size=N_DRAWS)
    sigma = toa_sigma(num15, 2.0)
    assert np.all(np.abs(draws) <= TRUNCATION_SIGMAS * sigma)
    assert np.std(draws) == pytest.approx(sigma, rel=0.01)


def test_residual_without_toa_is_floor_bias(num15, rng):
    unit = ta_time_unit(num15)
    none = ToaModel(ToaModelKind.NONE)
    residual = pd_estimation_residual(_default_pd(num15), num15, none, Correction(), rng)
    assert residual == pytest.approx(-0.37 * unit)
    for true_pd in np.linspace(0, 50 * unit, 97):
        residual = pd_estimation_residual(true_pd, num15, none, Correction(), rng)
        assert -ta_granularity(num15) < residual <= 1e-9


def test_correction_terms(num15):
    gran = ta_granularity(num15)
    assert correction_term(Correction(), num15, GAUSSIAN_K2) == 0.0
    assert correction_term(Correction(CorrectionMode.MINUS_SIGMA_HALF), num15, GAUSSIAN_K1) == gran / 2
    assert correction_term(Correction("literal_sigma_half"), num15, GAUSSIAN_K1) == pytest.approx(
        toa_sigma(num15, 1.0) / 2
    )
    assert correction_term(Correction(CorrectionMode.CUSTOM, 42.0), num15, GAUSSIAN_K2) == 42.0
    with pytest.raises(TimingDomainError):
        correction_term(Correction("literal_sigma_half"), num15, ToaModel(ToaModelKind.TABLE_3GPP))


def test_negative_true_pd_rejected(num15, rng):
    with pytest.raises(TimingDomainError):
        pd_estimation_residual(-1.0, num15, GAUSSIAN_K2, Correction(), rng)


@pytest.mark.parametrize("mu, abs_mean, mean", [
    (0, 192.0, -129.0),
    (1, 96.0, -65.0),
    (2, 48.0, -32.0),
    (3, 24.0, -16.0),
])
def test_uncorrected_residual_kappa2(mu, abs_mean, mean):
    num = Numerology(mu=mu)
    assert _seed_averaged(num, GAUSSIAN_K2, Correction(), "abs_mean_ns") == pytest.approx(abs_mean, rel=0.15)
    assert _seed_averaged(num, GAUSSIAN_K2, Correction(), "mean_ns") == pytest.approx(mean, rel=0.10)


def test_uncorrected_residual_kappa1_bias_independent_of_kappa(num15):
    assert _seed_averaged(num15, GAUSSIAN_K1, Correction(), "abs_mean_ns") == pytest.approx(261.0, rel=0.15)
    assert _seed_averaged(num15, GAUSSIAN_K1, Correction(), "mean_magnitude_ns") == pytest.approx(129.0, rel=0.10)


@pytest.mark.parametrize("mu", [0, 1, 2, 3])
def test_corrected_residual_is_unbiased(mu):
    num = Numerology(mu=mu)
    corrected = Correction(CorrectionMode.MINUS_SIGMA_HALF)
    for seed in STAT_SEEDS:
        residual = pd_estimation_residual(_default_pd(num), num, GAUSSIAN_K2, corrected,
                                          np.random.default_rng(seed), size=STAT_DRAWS)
        assert summarize(residual).mean_magnitude_ns <= 5.0


@pytest.mark.parametrize("correction", [Correction(), Correction(CorrectionMode.MINUS_SIGMA_HALF)])
def test_matched_seeds_halve_residual_per_numerology(correction):
    residuals = [
        pd_estimation_residual(_default_pd(Numerology(mu=mu)), Numerology(mu=mu), GAUSSIAN_K2, correction,
                               np.random.default_rng(7), size=10_000)
        for mu in range(4)
    ]
    for coarse, fine in zip(residuals, residuals[1:]):
        np.testing.assert_array_equal(fine, coarse / 2)


def test_compose_is_deterministic_per_seed(num15):
    cfg = ErrorConfig()
    first = compose_sync_error(cfg, num15, np.random.default_rng(3), size=1000)
    second = compose_sync_error(cfg, num15, np.random.default_rng(3), size=1000)
    other = compose_sync_error(cfg, num15, np.random.default_rng(4), size=1000)
    np.testing.assert_array_equal(first.total_ns, second.total_ns)
    assert not np.array_equal(first.total_ns, other.total_ns)


def test_compose_total_is_sum_of_terms(num30, rng):
    sample = compose_sync_error(ErrorConfig(), num30, rng, size=1000)
    np.testing.assert_allclose(sample.total_ns, sample.tae_ns + sample.rtge_ns + sample.pd_residual_ns)
    assert np.all(np.abs(sample.rtge_ns) <= 150.0)


def test_compose_with_everything_off_is_exact(num15, zero_errors, rng):
    sample = compose_sync_error(zero_errors, num15, rng, size=100)
    assert np.all(sample.total_ns == 0.0)
    assert not np.any(sample.saturated)


def test_compose_scalar_form(num15, rng):
    sample = compose_sync_error(ErrorConfig(), num15, rng)
    assert isinstance(sample.total_ns, float)
    assert isinstance(sample.saturated, bool)


def test_sample_item_matches_batch(num15):
    batch = compose_sync_error(ErrorConfig(), num15, np.random.default_rng(11), size=5)
    item = sample_item(batch, 3)
    assert item.total_ns == batch.total_ns[3]
    assert item.toa_ns == batch.toa_ns[3]


def test_saturation_is_counted_not_raised(num15, rng):
    cfg = ErrorConfig.zero(true_pd_ns=4000 * ta_time_unit(num15))
    sample = compose_sync_error(cfg, num15, rng, size=50)
    assert np.all(sample.saturated)
