import logging
import math

from . import models
from src.curves import service as curves_service
from src.exceptions import ModelParametersMissingError, SingularityError
from src.instruments.models import CcsMarket
from src.timegrid.models import Schedule


def frozen_drift_exponent(
    tau: float,
    e: float,
    delta: float,
    beta: float,
    sigma: float,
    eta: float,
    rho: float,
    horizon: float,
    period: int | None = None,
) -> float:
    """Drift of ln X frozen at the valuation date, integrated over `horizon`."""
    ratio = 1.0 + tau * e
    if ratio <= 0:
        raise SingularityError(period)
    return tau * (e + delta + beta) / ratio * sigma * eta * rho * horizon


def domestic_mtm_adjustment(
    x_prev: float,
    e: float,
    f: float,
    tau: float,
    horizon: float,
    period: models.PeriodParams,
    beta: float,
) -> models.DomesticAdjustment:
    k = frozen_drift_exponent(tau, e, period.delta, beta, period.sigma, period.eta, period.rho, horizon)
    delayed = x_prev * math.exp(-k)
    libor = (f + period.delta) * math.exp(period.sigma * period.eta * period.rho * horizon) - period.delta
    return models.DomesticAdjustment(delayed_fx=delayed, fx_times_libor=delayed * libor)


def foreign_mtm_adjustment(
    x_prev: float,
    e_f: float,
    f_f: float,
    tau: float,
    horizon: float,
    period: models.PeriodParams,
    beta_f: float,
) -> models.ForeignAdjustment:
    k = frozen_drift_exponent(tau, e_f, period.delta_f, beta_f, period.sigma, period.eta_f, period.rho_f, horizon)
    delayed_inv = math.exp(k) / x_prev
    libor = (f_f + period.delta_f) * math.exp(-period.sigma * period.eta_f * period.rho_f * horizon) - period.delta_f
    return models.ForeignAdjustment(delayed_inv_fx=delayed_inv, invfx_times_libor=delayed_inv * libor)


def _period_inputs(discount, forward, schedule: Schedule, i: int) -> tuple[float, float, float, float]:
    t_prev, t_i = schedule.times[i - 1], schedule.times[i]
    tau = schedule.accruals[i - 1]
    e = curves_service.forward_simple_rate(discount, t_prev, t_i, tau)
    f = curves_service.forward_simple_rate(forward, t_prev, t_i, tau)
    return t_prev, tau, e, f


def implied_forward(market: CcsMarket, T: float) -> float:
    """Forward price in domestic units of one unit of foreign currency."""
    p_f = curves_service.discount_factor(market.foreign_discount, T)
    p_d = curves_service.discount_factor(market.domestic_discount, T)
    return market.spot * p_f / p_d


def adjust_domestic_mtm(
    market: CcsMarket,
    schedule: Schedule,
    params: models.MarketModelParams | None,
    i: int,
) -> models.DomesticAdjustment:
    if params is None:
        raise ModelParametersMissingError("marked-to-market convexity adjustments")
    t_prev, tau, e, f = _period_inputs(market.domestic_discount, market.domestic_forward, schedule, i)
    period = params.period(i)
    beta = period.beta if period.beta is not None else f - e
    try:
        return domestic_mtm_adjustment(implied_forward(market, t_prev), e, f, tau, t_prev, period, beta)
    except SingularityError:
        logging.error(f"Domestic discount ratio is singular in period {i}")
        raise SingularityError(i)


def adjust_foreign_mtm(
    market: CcsMarket,
    schedule: Schedule,
    params: models.MarketModelParams | None,
    i: int,
) -> models.ForeignAdjustment:
    if params is None:
        raise ModelParametersMissingError("marked-to-market convexity adjustments")
    t_prev, tau, e_f, f_f = _period_inputs(market.foreign_discount, market.foreign_forward, schedule, i)
    period = params.period(i)
    beta_f = period.beta_f if period.beta_f is not None else f_f - e_f
    try:
        return foreign_mtm_adjustment(implied_forward(market, t_prev), e_f, f_f, tau, t_prev, period, beta_f)
    except SingularityError:
        logging.error(f"Foreign discount ratio is singular in period {i}")
        raise SingularityError(i)
