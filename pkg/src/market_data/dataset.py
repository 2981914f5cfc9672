"""Reconstructed September 2013 market.

Only the USD/EUR MtM par spreads are market values. Overnight and 3M
curves are continuously compounded stand-ins: flat in USD and HKD, and in
EUR flat to 7y with forwards stepping up beyond. The USD/HKD spreads are
chosen so that their difference to USD/EUR has the shape of the EUR/HKD
basis of that date.
"""
from datetime import date

import numpy as np

from src.curves import service as curves_service
from src.curves.models import Curve, CurveSet
from src.timegrid.models import Quote, QuoteKind

ASOF = date(2013, 9, 6)
SPOT_CCY = "USD"
HUB, COLLATERAL, TARGET = "USD", "EUR", "HKD"

SPOTS = {"EUR": 1.31, "HKD": 1.0 / 7.755}

SHORT_RATES = {
    "EUR-OIS": 0.006,
    "EUR-3M": 0.008,
    "USD-OIS": 0.008,
    "USD-3M": 0.010,
    "HKD-OIS": 0.003,
    "HKD-3M": 0.005,
}

# extra EUR forward rate from each time (years) to the next
EUR_FORWARD_STEPS = {7.0: 0.003, 10.0: 0.006, 12.0: 0.022}

USD_EUR_SPREADS = {
    "1y": -0.001450,
    "18m": -0.001850,
    "2y": -0.002050,
    "3y": -0.002375,
    "4y": -0.002550,
    "5y": -0.002650,
    "7y": -0.002675,
    "10y": -0.002625,
    "15y": -0.002475,
    "20y": -0.002325,
    "30y": -0.002050,
}

# USD per EUR over spot
USD_EUR_FX_POINTS = {
    "3m": 0.0011304,
    "6m": 0.0022617,
    "9m": 0.0033940,
}

USD_HKD_SPREADS = {
    "1y": -0.001100,
    "18m": -0.001170,
    "2y": -0.001015,
    "3y": -0.001110,
    "4y": -0.001075,
    "5y": -0.001040,
    "7y": -0.001020,
    "10y": -0.000890,
    "12y": -0.001030,
    "15y": -0.001370,
    "20y": -0.001400,
    "30y": -0.001500,
}


def stepped_curve(asof: date, rate: float, steps: dict[float, float], horizon: float = 40.0) -> Curve:
    """Forward rate `rate`, plus `steps[t]` from each step time t on."""
    times = sorted(steps) + [horizon]
    log_dfs, integral, previous, extra = [], 0.0, 0.0, 0.0
    for t in times:
        integral += (rate + extra) * (t - previous)
        log_dfs.append(-integral)
        previous, extra = t, steps.get(t, extra)
    return curves_service.pillar_curve(asof, times, np.exp(log_dfs))


def _curve_set(curves: dict[str, Curve], spots: dict[str, float]) -> CurveSet:
    return CurveSet(asof=ASOF, spot_ccy=SPOT_CCY, spots=spots, curves=curves)


def synthetic_curve_set() -> CurveSet:
    curves = {
        curve_id: stepped_curve(ASOF, rate, EUR_FORWARD_STEPS)
        if curve_id.startswith(COLLATERAL)
        else curves_service.flat_curve(ASOF, rate)
        for curve_id, rate in SHORT_RATES.items()
    }
    return _curve_set(curves, SPOTS)


def degenerate_curve_set() -> CurveSet:
    """Identical flat curves in every currency and unit spots."""
    curves = {
        curve_id: curves_service.flat_curve(ASOF, 0.01 if curve_id.endswith("-OIS") else 0.012)
        for curve_id in SHORT_RATES
    }
    return _curve_set(curves, {ccy: 1.0 for ccy in SPOTS})


def _ccs_quotes(pair: str, spreads: dict[str, float], collateral: str | None = SPOT_CCY) -> list[Quote]:
    return [
        Quote(kind=QuoteKind.MTM_CCS, pair_or_ccy=pair, tenor=tenor, value=value, collateral_ccy=collateral)
        for tenor, value in spreads.items()
    ]


def usd_eur_quotes(with_fx_swaps: bool = False) -> list[Quote]:
    quotes = _ccs_quotes(HUB + COLLATERAL, USD_EUR_SPREADS)
    if with_fx_swaps:
        quotes = [
            Quote(kind=QuoteKind.FX_SWAP, pair_or_ccy=HUB + COLLATERAL, tenor=tenor, value=points, collateral_ccy=SPOT_CCY)
            for tenor, points in USD_EUR_FX_POINTS.items()
        ] + quotes
    return quotes


def usd_hkd_quotes() -> list[Quote]:
    return _ccs_quotes(HUB + TARGET, USD_HKD_SPREADS)


def degenerate_quotes(pair: str, tenors=tuple(USD_EUR_SPREADS)) -> list[Quote]:
    return _ccs_quotes(pair, {tenor: 0.0 for tenor in tenors})
