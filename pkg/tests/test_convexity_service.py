import math

import pytest
from dateutil.relativedelta import relativedelta

from src.convexity import service as convexity_service
from src.convexity.models import MarketModelParams, PeriodParams
from src.exceptions import ConfigurationError, ModelParametersMissingError, SingularityError
from src.instruments import service as instruments_service


@pytest.fixture
def example_period():
    return PeriodParams(delta=0.0, delta_f=0.0, eta=0.2, eta_f=0.2, sigma=0.1, rho=0.5, rho_f=0.5)


def test_frozen_drift_exponent():
    k = convexity_service.frozen_drift_exponent(0.25, 0.02, 0.0, 0.0, 0.1, 0.2, 0.5, 5.0)
    assert k == pytest.approx(0.000248756219, rel=1e-9)


def test_domestic_adjustment_example(example_period):
    adj = convexity_service.domestic_mtm_adjustment(1.0, 0.02, 0.03, 0.25, 5.0, example_period, 0.0)

    assert adj.delayed_fx == pytest.approx(0.999751274718, rel=1e-11)
    assert adj.fx_times_libor == pytest.approx(adj.delayed_fx * 0.03 * math.exp(0.05), rel=1e-14)


def test_foreign_adjustment_example(example_period):
    adj = convexity_service.foreign_mtm_adjustment(1.0, 0.02, 0.03, 0.25, 5.0, example_period, 0.0)

    assert adj.delayed_inv_fx == pytest.approx(1.00024878716, rel=1e-11)
    assert adj.invfx_times_libor == pytest.approx(adj.delayed_inv_fx * 0.03 * math.exp(-0.05), rel=1e-14)


def test_negative_correlation_flips_the_exponent(example_period):
    anti = example_period.model_copy(update={"rho": -0.5})
    adj = convexity_service.domestic_mtm_adjustment(1.0, 0.02, 0.03, 0.25, 5.0, anti, 0.0)
    assert adj.delayed_fx == pytest.approx(1.0 / 0.999751274718, rel=1e-11)


def test_no_adjustment_without_correlation_or_horizon(example_period):
    uncorrelated = example_period.model_copy(update={"rho": 0.0})
    assert convexity_service.domestic_mtm_adjustment(1.3, 0.02, 0.03, 0.25, 5.0, uncorrelated, 0.0).delayed_fx == 1.3

    at_start = convexity_service.domestic_mtm_adjustment(1.3, 0.02, 0.03, 0.25, 0.0, example_period, 0.0)
    assert at_start.delayed_fx == 1.3
    assert at_start.fx_times_libor == pytest.approx(1.3 * 0.03, rel=1e-15)


def test_singular_discount_ratio(example_period):
    with pytest.raises(SingularityError):
        convexity_service.domestic_mtm_adjustment(1.0, -4.0, 0.03, 0.25, 5.0, example_period, 0.0)


def test_market_adjustment_uses_the_implied_forward(usd_eur_market, asof):
    ccs = instruments_service.quoted_ccs("USDEUR", asof, asof + relativedelta(years=2))
    schedule = ccs.legs[0].schedule
    flat = MarketModelParams(sigma=0.1, eta=0.2)

    adj = convexity_service.adjust_domestic_mtm(usd_eur_market, schedule, flat, 3)
    assert adj.delayed_fx == pytest.approx(
        convexity_service.implied_forward(usd_eur_market, schedule.times[2]), rel=1e-15
    )


def test_per_period_parameters(usd_eur_market, asof):
    ccs = instruments_service.quoted_ccs("USDEUR", asof, asof + relativedelta(months=6))
    schedule = ccs.legs[0].schedule
    params = MarketModelParams(sigma=[0.1, 0.2], eta=0.2, rho_fx_libor=[0.0, 0.5])

    assert params.period(2).sigma == 0.2
    first = convexity_service.adjust_domestic_mtm(usd_eur_market, schedule, params, 1)
    assert first.delayed_fx == usd_eur_market.spot
    with pytest.raises(ConfigurationError):
        params.period(3)


def test_parameters_are_required(usd_eur_market, asof):
    schedule = instruments_service.quoted_ccs("USDEUR", asof, asof + relativedelta(years=1)).legs[0].schedule
    with pytest.raises(ModelParametersMissingError):
        convexity_service.adjust_foreign_mtm(usd_eur_market, schedule, None, 1)


def test_parameter_validation():
    with pytest.raises(ValueError):
        MarketModelParams(sigma=-0.1)
    with pytest.raises(ValueError):
        MarketModelParams(rho_fx_libor=1.5)
