import logging
from datetime import date

import numpy as np
from pydantic import TypeAdapter, ValidationError

from . import models
from src.exceptions import CurveDomainError, CurveRangeError, OrderingError
from src.timegrid.models import Schedule

_curve_adapter = TypeAdapter(models.AnyCurve)

# relative step for the numerical derivative of log df
_BUMP = 1e-5


def ois_curve_id(ccy: str) -> str:
    return f"{ccy}-OIS"


def forward_curve_id(ccy: str, tenor: str = "3M") -> str:
    return f"{ccy}-{tenor}"


def implied_curve_id(ccy: str, collateral: str) -> str:
    return f"{ccy}-IMPL-{collateral}"


def _check_times(T):
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise CurveDomainError(float(np.min(T)))
    return T


def discount_factor(curve: models.AnyCurve, T):
    T = _check_times(T)
    result = np.exp(curve.log_df(T))
    return float(result) if np.ndim(result) == 0 else result


def discount_factors(curve: models.AnyCurve, times) -> np.ndarray:
    return np.atleast_1d(discount_factor(curve, times))


def zero_rate(curve: models.AnyCurve, T: float) -> float:
    T = float(_check_times(T))
    if T == 0:
        return instantaneous_forward(curve, 0.0)
    return float(-curve.log_df(T) / T)


def instantaneous_forward(curve: models.AnyCurve, T: float) -> float:
    T = float(_check_times(T))
    h = _BUMP * max(1.0, T)
    lower = max(T - h, 0.0)
    return float(-(curve.log_df(T + h) - curve.log_df(lower)) / (T + h - lower))


def forward_simple_rate(curve: models.AnyCurve, T1: float, T2: float, tau: float) -> float:
    if T1 >= T2:
        raise OrderingError(T1, T2)
    if tau <= 0:
        raise ValueError("accrual must be positive")
    df1, df2 = discount_factors(curve, [T1, T2])
    return float((df1 / df2 - 1.0) / tau)


def forward_libor(forwarding_curve: models.AnyCurve, schedule: Schedule, i: int) -> float:
    """Forward rate of period i (1-based) read off a forwarding pseudo-curve."""
    if not 1 <= i <= schedule.periods:
        raise ValueError(f"period {i} is outside a schedule of {schedule.periods} periods")
    return forward_simple_rate(forwarding_curve, schedule.times[i - 1], schedule.times[i], schedule.accruals[i - 1])


def forward_rates(forwarding_curve: models.AnyCurve, schedule: Schedule) -> np.ndarray:
    dfs = discount_factors(forwarding_curve, schedule.times)
    return (dfs[:-1] / dfs[1:] - 1.0) / np.asarray(schedule.accruals)


def flat_curve(asof: date, rate: float, horizon: float = 1.0) -> models.Curve:
    """Continuously compounded flat curve."""
    return models.Curve(asof=asof, times=(horizon,), dfs=(float(np.exp(-rate * horizon)),))


def pillar_curve(
    asof: date,
    times,
    dfs,
    interp: models.Interpolation = models.Interpolation.LOG_LINEAR_DF,
) -> models.Curve:
    return models.Curve(asof=asof, times=tuple(float(t) for t in times), dfs=tuple(float(d) for d in dfs), interp=interp)


def to_zero_spread(curve: models.Curve, reference: models.AnyCurve) -> models.ZeroSpreadCurve:
    times = np.asarray(curve.times)
    spreads = -(np.log(np.asarray(curve.dfs)) - reference.log_df(times)) / times
    return models.ZeroSpreadCurve(reference=reference, times=curve.times, spreads=tuple(float(z) for z in spreads))


def compose(components: list[tuple[str, models.AnyCurve, int]]) -> models.AnyCurve:
    """Multiply curves raised to +-1; identical identifiers cancel."""
    powers: dict[str, int] = {}
    curves: dict[str, models.AnyCurve] = {}
    for curve_id, curve, power in components:
        powers[curve_id] = powers.get(curve_id, 0) + power
        curves[curve_id] = curve

    survivors = [(curve_id, power) for curve_id, power in sorted(powers.items()) if power != 0]
    if not survivors:
        # every rate cancelled, discount at zero
        anchor = components[0][1]
        return flat_curve(anchor.asof, 0.0)
    if len(survivors) == 1 and survivors[0][1] == 1:
        return curves[survivors[0][0]]
    if any(abs(power) != 1 for _, power in survivors):
        raise ValueError("curve powers other than +1 and -1 are not supported")
    return models.CompositeCurve(
        components=tuple(
            models.CurveComponent(curve_id=curve_id, curve=curves[curve_id], power=power)
            for curve_id, power in survivors
        )
    )


def build_spline(knots, values) -> models.SplineCurve1D:
    return models.SplineCurve1D(knots=tuple(float(k) for k in knots), values=tuple(float(v) for v in values))


def spline_interpolate(s: models.SplineCurve1D, T: float) -> float:
    lower, upper = s.knots[0], s.knots[-1]
    if T < lower - 1e-12 or T > upper + 1e-12:
        raise CurveRangeError(T, lower, upper)
    return float(s.evaluate(min(max(T, lower), upper)))


def curve_to_json(curve: models.AnyCurve) -> dict:
    if isinstance(curve, models.Curve):
        return {
            "asof": curve.asof.isoformat(),
            "interp": curve.interp.value,
            "pillars": [{"t": t, "df": df} for t, df in zip(curve.times, curve.dfs)],
        }
    return curve.model_dump(mode="json")


def curve_from_json(payload: dict) -> models.AnyCurve:
    if "pillars" in payload:
        pillars = payload["pillars"]
        return models.Curve(
            asof=payload["asof"],
            interp=payload.get("interp", models.Interpolation.LOG_LINEAR_DF),
            times=tuple(p["t"] for p in pillars),
            dfs=tuple(p["df"] for p in pillars),
        )
    return _curve_adapter.validate_python(payload)


def curve_set_to_json(curve_set: models.CurveSet) -> dict:
    return {
        "asof": curve_set.asof.isoformat(),
        "spot_ccy": curve_set.spot_ccy,
        "spots": dict(sorted(curve_set.spots.items())),
        "curves": {curve_id: curve_to_json(curve) for curve_id, curve in sorted(curve_set.curves.items())},
    }


def curve_set_from_json(payload: dict) -> models.CurveSet:
    try:
        curves = {curve_id: curve_from_json(body) for curve_id, body in payload.get("curves", {}).items()}
        return models.CurveSet(
            asof=payload["asof"],
            spot_ccy=payload["spot_ccy"],
            spots=payload.get("spots", {}),
            curves=curves,
        )
    except (KeyError, TypeError, ValidationError) as e:
        logging.error(f"Invalid curve set payload: {e}")
        raise ValueError(f"invalid curve set: {e}") from e


def with_curve(curve_set: models.CurveSet, curve_id: str, curve: models.AnyCurve) -> models.CurveSet:
    return curve_set.model_copy(update={"curves": {**curve_set.curves, curve_id: curve}})
