import logging
from datetime import date

import numpy as np
import pandas as pd

from . import models
from src.collateral import service as collateral_service
from src.collateral.models import CollateralContext, FxSystem
from src.config import CCS_FREQUENCY_MONTHS
from src.convexity import service as convexity_service
from src.convexity.models import MarketModelParams
from src.curves import service as curves_service
from src.curves.models import AnyCurve, CurveSet
from src.exceptions import ConfigurationError, DataError, DegenerateInstrumentError, ModelParametersMissingError
from src.timegrid import service as timegrid_service
from src.timegrid.models import Quote, QuoteKind

_MIN_ANNUITY = 1e-15


def market_view(
    fx: FxSystem,
    domestic_ccy: str,
    foreign_ccy: str,
    forward_curves: dict[str, str] | None = None,
    foreign_discount: AnyCurve | None = None,
) -> models.CcsMarket:
    """Four-curve market for a pair under the collateral of `fx`.

    `foreign_discount` replaces the implied curve of the foreign currency, for
    views built while that curve is still being calibrated.
    """
    forward_curves = forward_curves or {}

    def discount(ccy):
        ctx = CollateralContext(cashflow_ccy=ccy, collateral_ccy=fx.domestic)
        return collateral_service.effective_discount_curve(ctx, fx)

    def forward(ccy):
        return collateral_service.get_curve(fx, forward_curves.get(ccy, curves_service.forward_curve_id(ccy)))

    return models.CcsMarket(
        domestic_ccy=domestic_ccy,
        foreign_ccy=foreign_ccy,
        spot=collateral_service.cross_spot(fx, foreign_ccy, domestic_ccy),
        domestic_discount=discount(domestic_ccy),
        domestic_forward=forward(domestic_ccy),
        foreign_discount=foreign_discount if foreign_discount is not None else discount(foreign_ccy),
        foreign_forward=forward(foreign_ccy),
    )


def implied_fx_forwards(market: models.CcsMarket, times) -> np.ndarray:
    p_f = curves_service.discount_factors(market.foreign_discount, times)
    p_d = curves_service.discount_factors(market.domestic_discount, times)
    return market.spot * p_f / p_d


def _is_domestic(leg: models.CcsLeg, market: models.CcsMarket) -> bool:
    if leg.currency == market.domestic_ccy:
        return True
    if leg.currency == market.foreign_ccy:
        return False
    raise ConfigurationError(f"Leg currency {leg.currency} is not part of the {market.domestic_ccy}/{market.foreign_ccy} view")


def _leg_curves(leg: models.CcsLeg, market: models.CcsMarket):
    if _is_domestic(leg, market):
        return market.domestic_discount, market.domestic_forward
    return market.foreign_discount, market.foreign_forward


def _coupon_rates(leg: models.CcsLeg, forward_curve) -> np.ndarray:
    if leg.rate_type == models.RateType.FIXED:
        return np.full(leg.schedule.periods, leg.fixed_rate)
    return curves_service.forward_rates(forward_curve, leg.schedule)


def price_fx_swap(instrument: models.FxSwapInstrument, fx: FxSystem) -> float:
    """Value in domestic units of paying N domestic and receiving N/X foreign at maturity."""
    market_forward = collateral_service.fx_forward(fx, instrument.ccy, instrument.maturity)
    p = curves_service.discount_factor(
        collateral_service.get_curve(fx, collateral_service.ois_curve_id(fx, fx.domestic)), instrument.maturity
    )
    return instrument.notional * (market_forward / instrument.forward_rate - 1.0) * p


def price_cn_ccs_leg(leg: models.CcsLeg, market: models.CcsMarket) -> float:
    """Constant-notional floating or fixed leg with notional exchanges, in leg currency."""
    if leg.notional == 0:
        return 0.0
    discount, forward = _leg_curves(leg, market)
    schedule = leg.schedule
    dfs = curves_service.discount_factors(discount, schedule.times)
    tau = np.asarray(schedule.accruals)
    rates = _coupon_rates(leg, forward)
    coupons = np.sum(tau * (rates + leg.spread) * dfs[1:])
    return float(leg.notional * (-dfs[0] + coupons + dfs[-1]))


def price_mtm_leg_domestic(
    leg: models.CcsLeg,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    """Domestic leg renotioned at every period start; notional is in foreign units."""
    schedule = leg.schedule
    dfs = curves_service.discount_factors(market.domestic_discount, schedule.times)
    tau = np.asarray(schedule.accruals)
    fx_fwd = implied_fx_forwards(market, schedule.times)
    rates = _coupon_rates(leg, market.domestic_forward)

    if mode == models.PricingMode.EFFECTIVE:
        notionals = leg.notional * fx_fwd[:-1]
        return float(np.sum(notionals * (-dfs[:-1] + dfs[1:] * (1.0 + tau * (rates + leg.spread)))))

    if params is None:
        raise ModelParametersMissingError("adjusted marked-to-market pricing")
    total = 0.0
    for i in range(1, schedule.periods + 1):
        adj = convexity_service.adjust_domestic_mtm(market, schedule, params, i)
        if leg.rate_type == models.RateType.FIXED:
            interest = adj.delayed_fx * leg.fixed_rate
        else:
            interest = adj.fx_times_libor
        redemption = dfs[i] * (adj.delayed_fx * (1.0 + tau[i - 1] * leg.spread) + tau[i - 1] * interest)
        total += redemption - dfs[i - 1] * fx_fwd[i - 1]
    return float(leg.notional * total)


def foreign_mtm_lending_value(leg: models.CcsLeg, market: models.CcsMarket) -> float:
    """Domestic value of lending the renotioned foreign amount at each period start."""
    schedule = leg.schedule
    q = curves_service.discount_factors(market.foreign_discount, schedule.times)
    fx_fwd = implied_fx_forwards(market, schedule.times)
    return float(market.spot * leg.notional * np.sum(q[:-1] / fx_fwd[:-1]))


def price_mtm_leg_foreign(
    leg: models.CcsLeg,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    """Foreign leg renotioned at every period start; notional and value in domestic units."""
    schedule = leg.schedule
    q = curves_service.discount_factors(market.foreign_discount, schedule.times)
    tau = np.asarray(schedule.accruals)
    fx_fwd = implied_fx_forwards(market, schedule.times)
    rates = _coupon_rates(leg, market.foreign_forward)

    if mode == models.PricingMode.EFFECTIVE:
        notionals = leg.notional / fx_fwd[:-1]
        return float(market.spot * np.sum(notionals * (-q[:-1] + q[1:] * (1.0 + tau * (rates + leg.spread)))))

    if params is None:
        raise ModelParametersMissingError("adjusted marked-to-market pricing")
    total = 0.0
    for i in range(1, schedule.periods + 1):
        adj = convexity_service.adjust_foreign_mtm(market, schedule, params, i)
        if leg.rate_type == models.RateType.FIXED:
            interest = adj.delayed_inv_fx * leg.fixed_rate
        else:
            interest = adj.invfx_times_libor
        total += q[i] * (adj.delayed_inv_fx * (1.0 + tau[i - 1] * leg.spread) + tau[i - 1] * interest)
    return float(market.spot * leg.notional * total - foreign_mtm_lending_value(leg, market))


def leg_value(
    leg: models.CcsLeg,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    """Leg value in domestic units."""
    domestic = _is_domestic(leg, market)
    if leg.notional_type == models.NotionalType.MTM:
        if domestic:
            return price_mtm_leg_domestic(leg, market, mode, params)
        return price_mtm_leg_foreign(leg, market, mode, params)
    value = price_cn_ccs_leg(leg, market)
    return value if domestic else market.spot * value


def price_ccs(
    ccs: models.CcsInstrument,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    """NPV in domestic units: domestic leg minus foreign leg."""
    if mode == models.PricingMode.ADJUSTED and params is None:
        raise ModelParametersMissingError("adjusted marked-to-market pricing")
    domestic = ccs.leg_in(market.domestic_ccy)
    foreign = ccs.leg_in(market.foreign_ccy)
    return leg_value(domestic, market, mode, params) - leg_value(foreign, market, mode, params)


def spread_annuity(
    ccs: models.CcsInstrument,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    # NPV is affine in the spread
    return price_ccs(ccs.with_spread(1.0), market, mode, params) - price_ccs(ccs.with_spread(0.0), market, mode, params)


def par_spread(
    ccs: models.CcsInstrument,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    npv_zero = price_ccs(ccs.with_spread(0.0), market, mode, params)
    annuity = price_ccs(ccs.with_spread(1.0), market, mode, params) - npv_zero
    if abs(annuity) < _MIN_ANNUITY:
        logging.warning(f"Degenerate spread annuity {annuity:.3e}")
        raise DegenerateInstrumentError(annuity)
    return -npv_zero / annuity


def constant_notional_version(ccs: models.CcsInstrument, market: models.CcsMarket) -> models.CcsInstrument:
    """Same swap with the renotioning leg frozen at the spot notional."""
    legs = []
    for leg in ccs.legs:
        if leg.notional_type == models.NotionalType.MTM:
            spot = market.spot if _is_domestic(leg, market) else 1.0 / market.spot
            leg = leg.model_copy(update={"notional_type": models.NotionalType.CONSTANT, "notional": leg.notional * spot})
        legs.append(leg)
    return ccs.model_copy(update={"legs": tuple(legs)})


def mtm_vs_constant_notional(
    ccs: models.CcsInstrument,
    market: models.CcsMarket,
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> float:
    """Par-spread difference in bp between the renotioning swap and its constant-notional twin."""
    mtm = par_spread(ccs, market, mode, params)
    constant = par_spread(constant_notional_version(ccs, market), market, mode, params)
    return (mtm - constant) * 1e4


def quoted_ccs(
    pair: str,
    asof: date,
    maturity: date,
    spread: float = 0.0,
    frequency: int = CCS_FREQUENCY_MONTHS,
) -> models.CcsInstrument:
    """Market-standard MtM CCS for a pair: flat floating leg on the first currency,
    renotioned every period, against floating plus spread on the second."""
    major, minor = pair[:3], pair[3:]
    schedule = timegrid_service.build_schedule(asof, maturity, frequency, asof=asof)
    return models.CcsInstrument(
        legs=(
            models.CcsLeg(currency=major, schedule=schedule, notional_type=models.NotionalType.MTM),
            models.CcsLeg(currency=minor, schedule=schedule, spread=spread),
        ),
        spread_leg=1,
    )


def fx_swap_from_quote(quote: Quote, fx: FxSystem, asof: date) -> models.FxSwapInstrument:
    """FX swap exchanging one domestic unit against the quoted outright.

    Points are quoted in units of the first currency of the pair per unit of
    the second.
    """
    if quote.kind != QuoteKind.FX_SWAP:
        raise ConfigurationError(f"Quote {quote.pair_or_ccy} {quote.tenor} is not an FX swap")
    if fx.domestic not in (quote.major, quote.minor):
        raise ConfigurationError(f"FX swap {quote.pair_or_ccy} does not involve {fx.domestic}")
    outright = quote.forward_rate(collateral_service.cross_spot(fx, quote.minor, quote.major))
    if not outright > 0:
        raise DataError(f"FX swap {quote.pair_or_ccy} {quote.tenor} implies a non-positive outright {outright}")
    if fx.domestic == quote.major:
        ccy, forward_rate = quote.minor, outright
    else:
        ccy, forward_rate = quote.major, 1.0 / outright
    maturity = timegrid_service.model_time(asof, quote.maturity_date(asof))
    return models.FxSwapInstrument(ccy=ccy, maturity=maturity, forward_rate=forward_rate)


def spec_market(spec: models.InstrumentSpec, curve_set: CurveSet) -> models.CcsMarket:
    """View of the instrument's pair, from the collateral side when the collateral is one of its currencies."""
    fx = collateral_service.build_fx_system(curve_set, spec.collateral.upper())
    quote = spec.to_quote()
    domestic = fx.domestic if fx.domestic in (quote.major, quote.minor) else quote.major
    foreign = quote.minor if domestic == quote.major else quote.major
    return market_view(fx, domestic, foreign)


def ccs_from_spec(
    spec: models.InstrumentSpec,
    market: models.CcsMarket,
    asof: date,
    tenor: str | None = None,
) -> models.CcsInstrument:
    quote = spec.to_quote() if tenor is None else spec.model_copy(update={"tenor": tenor}).to_quote()
    ccs = quoted_ccs(quote.pair_or_ccy, asof, quote.maturity_date(asof), spec.spread, spec.frequency)
    if spec.kind == "cn-ccs":
        ccs = constant_notional_version(ccs, market)
    legs = tuple(leg.model_copy(update={"notional": leg.notional * spec.notional}) for leg in ccs.legs)
    return ccs.model_copy(update={"legs": legs})


PAR_SPREAD_COLUMNS = ["tenor", "t", "par_spread", "constant_notional_spread", "mtm_minus_cn_bp", "fx_forward"]


def par_spread_table(
    spec: models.InstrumentSpec,
    market: models.CcsMarket,
    asof: date,
    tenors: list[str],
    mode: models.PricingMode = models.PricingMode.EFFECTIVE,
    params: MarketModelParams | None = None,
) -> pd.DataFrame:
    """Par spreads by tenor against the constant-notional version, with the implied FX forward at maturity."""
    rows = []
    for tenor in tenors:
        ccs = ccs_from_spec(spec, market, asof, tenor)
        mtm = par_spread(ccs, market, mode, params)
        constant = par_spread(constant_notional_version(ccs, market), market, mode, params)
        t = ccs.legs[0].schedule.end
        rows.append(
            {
                "tenor": tenor,
                "t": t,
                "par_spread": mtm,
                "constant_notional_spread": constant,
                "mtm_minus_cn_bp": (mtm - constant) * 1e4,
                "fx_forward": float(implied_fx_forwards(market, [t])[0]),
            }
        )
    return pd.DataFrame(rows, columns=PAR_SPREAD_COLUMNS)
