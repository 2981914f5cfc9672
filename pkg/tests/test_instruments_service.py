import numpy as np
import pytest
from dateutil.relativedelta import relativedelta

from src.collateral import service as collateral_service
from src.convexity.models import MarketModelParams
from src.curves import service as curves_service
from src.exceptions import ConfigurationError, DegenerateInstrumentError, ModelParametersMissingError
from src.instruments import service as instruments_service
from src.instruments.models import (
    CcsLeg,
    FxSwapInstrument,
    InstrumentSpec,
    NotionalType,
    PricingMode,
    RateType,
)
from src.timegrid import service as timegrid_service
from src.timegrid.models import Quote, QuoteKind, Schedule


@pytest.fixture
def five_year_ccs(asof):
    return instruments_service.quoted_ccs("USDEUR", asof, asof + relativedelta(years=5))


@pytest.fixture
def single_curve_market(usd_eur_market, asof):
    """Discounting and forwarding on one curve per currency."""
    return usd_eur_market.model_copy(
        update={
            "domestic_forward": usd_eur_market.domestic_discount,
            "foreign_forward": usd_eur_market.foreign_discount,
        }
    )


def test_quoted_ccs_structure(five_year_ccs):
    mtm, spread_leg = five_year_ccs.legs

    assert (mtm.currency, mtm.notional_type) == ("USD", NotionalType.MTM)
    assert (spread_leg.currency, spread_leg.notional_type) == ("EUR", NotionalType.CONSTANT)
    assert five_year_ccs.quoted_leg is spread_leg
    assert mtm.schedule.periods == 20


def test_market_view(usd_eur_market):
    assert usd_eur_market.spot == 1.31
    assert curves_service.zero_rate(usd_eur_market.foreign_discount, 1.0) == pytest.approx(0.004, abs=1e-14)
    assert curves_service.zero_rate(usd_eur_market.foreign_forward, 1.0) == pytest.approx(0.008, abs=1e-14)


def test_price_fx_swap_at_market_forward(usd_fx_system):
    forward = collateral_service.fx_forward(usd_fx_system, "EUR", 1.0)
    at_market = FxSwapInstrument(ccy="EUR", maturity=1.0, forward_rate=forward, notional=1e6)
    off_market = at_market.model_copy(update={"forward_rate": forward * 1.01})

    assert instruments_service.price_fx_swap(at_market, usd_fx_system) == pytest.approx(0.0, abs=1e-9)
    assert instruments_service.price_fx_swap(off_market, usd_fx_system) < 0


def test_fx_swap_from_quote(usd_fx_system, asof):
    quote = Quote(kind=QuoteKind.FX_SWAP, pair_or_ccy="USDEUR", tenor="3m", value=0.0011304)
    swap = instruments_service.fx_swap_from_quote(quote, usd_fx_system, asof)

    assert swap.ccy == "EUR"
    assert swap.forward_rate == pytest.approx(1.3111304, rel=1e-15)
    assert swap.maturity == pytest.approx(91 / 365)


def test_constant_notional_floating_leg_is_worth_zero_on_single_curve(single_curve_market, asof):
    schedule = timegrid_service.build_schedule(asof, asof + relativedelta(years=3), 3)
    leg = CcsLeg(currency="EUR", schedule=schedule, notional=100.0)

    assert instruments_service.price_cn_ccs_leg(leg, single_curve_market) == pytest.approx(0.0, abs=1e-12)
    assert instruments_service.price_cn_ccs_leg(leg.with_spread(0.01), single_curve_market) > 0


def test_mtm_legs_are_worth_zero_on_single_curve(single_curve_market, five_year_ccs):
    mtm = five_year_ccs.legs[0]
    foreign_mtm = mtm.model_copy(update={"currency": "EUR"})

    assert instruments_service.price_mtm_leg_domestic(mtm, single_curve_market) == pytest.approx(0.0, abs=1e-14)
    assert instruments_service.price_mtm_leg_foreign(foreign_mtm, single_curve_market) == pytest.approx(0.0, abs=1e-14)


def test_fixed_rate_leg(single_curve_market, asof):
    schedule = timegrid_service.build_schedule(asof, asof + relativedelta(years=2), 12)
    leg = CcsLeg(currency="USD", schedule=schedule, rate_type=RateType.FIXED, fixed_rate=0.05)
    dfs = curves_service.discount_factors(single_curve_market.domestic_discount, schedule.times)
    expected = -dfs[0] + sum(tau * 0.05 * df for tau, df in zip(schedule.accruals, dfs[1:])) + dfs[-1]

    assert instruments_service.price_cn_ccs_leg(leg, single_curve_market) == pytest.approx(expected, rel=1e-14)


def test_foreign_mtm_lending_value_sums_domestic_discount_factors(usd_eur_market, five_year_ccs):
    leg = five_year_ccs.legs[0].model_copy(update={"currency": "EUR"})
    dfs = curves_service.discount_factors(usd_eur_market.domestic_discount, leg.schedule.times)

    assert instruments_service.foreign_mtm_lending_value(leg, usd_eur_market) == pytest.approx(
        float(sum(dfs[:-1])), rel=1e-13
    )


def test_par_spread_prices_at_zero(usd_eur_market, five_year_ccs):
    spread = instruments_service.par_spread(five_year_ccs, usd_eur_market)
    npv = instruments_service.price_ccs(five_year_ccs.with_spread(spread), usd_eur_market)

    assert npv == pytest.approx(0.0, abs=1e-13)
    annuity = instruments_service.spread_annuity(five_year_ccs, usd_eur_market)
    assert annuity < 0


def test_degenerate_annuity(usd_eur_market, five_year_ccs):
    legs = (five_year_ccs.legs[0], five_year_ccs.legs[1].model_copy(update={"notional": 0.0}))
    degenerate = five_year_ccs.model_copy(update={"legs": legs})

    with pytest.raises(DegenerateInstrumentError):
        instruments_service.par_spread(degenerate, usd_eur_market)


def test_adjusted_mode_collapses_without_correlation(usd_eur_market, five_year_ccs):
    params = MarketModelParams(sigma=0.12, eta=0.3, eta_f=0.25, rho_fx_libor=0.0, rho_fx_libor_f=0.0)
    effective = instruments_service.price_ccs(five_year_ccs, usd_eur_market)
    adjusted = instruments_service.price_ccs(five_year_ccs, usd_eur_market, PricingMode.ADJUSTED, params)

    assert adjusted == pytest.approx(effective, abs=1e-12)


def test_adjusted_mode_moves_the_par_spread(usd_eur_market, five_year_ccs):
    params = MarketModelParams(sigma=0.12, eta=0.3, rho_fx_libor=0.6)
    effective = instruments_service.par_spread(five_year_ccs, usd_eur_market)
    adjusted = instruments_service.par_spread(five_year_ccs, usd_eur_market, PricingMode.ADJUSTED, params)

    assert 0 < abs(adjusted - effective) < 5e-3


def test_adjusted_mode_requires_parameters(usd_eur_market, five_year_ccs):
    with pytest.raises(ModelParametersMissingError):
        instruments_service.price_ccs(five_year_ccs, usd_eur_market, PricingMode.ADJUSTED)


def test_mtm_and_constant_notional_agree_without_fx_drift(usd_eur_market, five_year_ccs):
    flat_fx = usd_eur_market.model_copy(update={"foreign_discount": usd_eur_market.domestic_discount})
    assert instruments_service.mtm_vs_constant_notional(five_year_ccs, flat_fx) == pytest.approx(0.0, abs=1e-8)
    assert instruments_service.mtm_vs_constant_notional(five_year_ccs, usd_eur_market) != 0.0


def test_leg_outside_the_view_is_rejected(usd_eur_market, asof):
    ccs = instruments_service.quoted_ccs("USDHKD", asof, asof + relativedelta(years=1))
    with pytest.raises(ConfigurationError):
        instruments_service.price_ccs(ccs, usd_eur_market)


def test_par_spread_table(flat_curve_set, asof):
    spec = InstrumentSpec(pair="USDEUR", tenor="5y", collateral="USD")
    market = instruments_service.spec_market(spec, flat_curve_set)
    table = instruments_service.par_spread_table(spec, market, asof, ["1y", "5y"])

    assert list(table["tenor"]) == ["1y", "5y"]
    assert table.loc[1, "par_spread"] == pytest.approx(
        instruments_service.par_spread(instruments_service.ccs_from_spec(spec, market, asof), market), abs=1e-15
    )
    assert (market.domestic_ccy, market.foreign_ccy) == ("USD", "EUR")


def test_instrument_spec_validation():
    with pytest.raises(ValueError):
        InstrumentSpec(pair="USD", tenor="5y", collateral="USD")
    with pytest.raises(ValueError):
        InstrumentSpec(pair="USDEUR", tenor="0y", collateral="USD")


def test_fx_swap_from_quote_inverts_for_the_second_currency(flat_curve_set, asof):
    fx = collateral_service.build_fx_system(flat_curve_set, "EUR")
    quote = Quote(kind=QuoteKind.FX_SWAP, pair_or_ccy="USDEUR", tenor="3m", value=0.0011304)
    swap = instruments_service.fx_swap_from_quote(quote, fx, asof)

    assert swap.ccy == "USD"
    assert swap.forward_rate == pytest.approx(1.0 / 1.3111304, rel=1e-13)

    hkd = Quote(kind=QuoteKind.FX_SWAP, pair_or_ccy="USDHKD", tenor="3m", value=0.001)
    with pytest.raises(ConfigurationError):
        instruments_service.fx_swap_from_quote(hkd, fx, asof)


def test_price_fx_swap_cash_flows(usd_fx_system):
    swap = FxSwapInstrument(ccy="EUR", maturity=2.0, forward_rate=1.30, notional=1e6)
    forward = collateral_service.fx_forward(usd_fx_system, "EUR", 2.0)
    p = curves_service.discount_factor(collateral_service.get_curve(usd_fx_system, "USD-OIS"), 2.0)
    expected = 1e6 / 1.30 * forward * p - 1e6 * p

    assert instruments_service.price_fx_swap(swap, usd_fx_system) == pytest.approx(expected, rel=1e-13)
    assert expected > 0


def test_floating_legs_telescope_on_random_curves(single_curve_market):
    rng = np.random.default_rng(7)
    for _ in range(50):
        times = np.cumsum(rng.uniform(0.2, 3.0, rng.integers(2, 12)))
        zeros = rng.uniform(-0.01, 0.06, len(times))
        curve = curves_service.pillar_curve(single_curve_market.domestic_discount.asof, times, np.exp(-zeros * times))
        market = single_curve_market.model_copy(update={"domestic_discount": curve, "domestic_forward": curve})
        periods = int(rng.integers(1, 11)) * int(rng.choice([1, 2, 4, 12]))
        schedule = timegrid_service.schedule_from_times(list(np.linspace(0.0, rng.uniform(0.5, 20.0), periods + 1)))
        leg = CcsLeg(currency="USD", schedule=schedule)
        mtm = leg.model_copy(update={"notional_type": NotionalType.MTM, "notional": 1.0 / market.spot})

        assert instruments_service.price_cn_ccs_leg(leg, market) == pytest.approx(0.0, abs=1e-13)
        assert instruments_service.price_mtm_leg_domestic(mtm, market) == pytest.approx(0.0, abs=1e-12)


def _split(leg: CcsLeg, k: int) -> tuple[CcsLeg, CcsLeg]:
    s = leg.schedule
    head = Schedule(dates=s.dates[: k + 1], times=s.times[: k + 1], accruals=s.accruals[:k], day_count=s.day_count)
    tail = Schedule(dates=s.dates[k:], times=s.times[k:], accruals=s.accruals[k:], day_count=s.day_count)
    return leg.model_copy(update={"schedule": head}), leg.model_copy(update={"schedule": tail})


def test_effective_leg_values_add_over_a_split_schedule(usd_eur_market, five_year_ccs):
    domestic_mtm, cn = five_year_ccs.legs[0], five_year_ccs.legs[1].with_spread(0.0025)
    foreign_mtm = domestic_mtm.model_copy(update={"currency": "EUR"})

    for leg in (domestic_mtm, foreign_mtm, cn):
        whole = instruments_service.leg_value(leg, usd_eur_market)
        for k in (1, 7, 19):
            head, tail = _split(leg, k)
            parts = instruments_service.leg_value(head, usd_eur_market) + instruments_service.leg_value(tail, usd_eur_market)
            assert parts == pytest.approx(whole, abs=1e-14)


def test_two_period_ccs_against_its_cash_flows(usd_eur_market, asof):
    ccs = instruments_service.quoted_ccs("USDEUR", asof, asof + relativedelta(months=6)).with_spread(0.001)
    schedule = ccs.legs[0].schedule
    t0, t1, t2 = schedule.times
    tau1, tau2 = schedule.accruals
    x = usd_eur_market.spot
    pd0, pd1, pd2 = (curves_service.discount_factor(usd_eur_market.domestic_discount, t) for t in (t0, t1, t2))
    pf0, pf1, pf2 = (curves_service.discount_factor(usd_eur_market.foreign_discount, t) for t in (t0, t1, t2))
    fd0, fd1, fd2 = (curves_service.discount_factor(usd_eur_market.domestic_forward, t) for t in (t0, t1, t2))
    ff0, ff1, ff2 = (curves_service.discount_factor(usd_eur_market.foreign_forward, t) for t in (t0, t1, t2))
    libor_d1, libor_d2 = (fd0 / fd1 - 1) / tau1, (fd1 / fd2 - 1) / tau2
    libor_f1, libor_f2 = (ff0 / ff1 - 1) / tau1, (ff1 / ff2 - 1) / tau2

    # USD notional reset to the EUR forward at each period start
    n0, n1 = x * pf0 / pd0, x * pf1 / pd1
    usd_leg = -n0 * pd0 + n0 * (1 + tau1 * libor_d1) * pd1 - n1 * pd1 + n1 * (1 + tau2 * libor_d2) * pd2
    eur_leg = -pf0 + tau1 * (libor_f1 + 0.001) * pf1 + tau2 * (libor_f2 + 0.001) * pf2 + pf2

    assert schedule.periods == 2
    assert instruments_service.price_ccs(ccs, usd_eur_market) == pytest.approx(usd_leg - x * eur_leg, abs=1e-14)
