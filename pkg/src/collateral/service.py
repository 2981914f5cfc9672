import logging
from typing import Literal

from . import models
from src.convexity.models import MarketModelParams
from src.curves import service as curves_service
from src.curves.models import AnyCurve, CurveSet
from src.exceptions import ConfigurationError, MixedCollateralError, ModelParametersMissingError
from src.mc_oracle import service as oracle_service
from src.mc_oracle.models import Estimate, SimulationConfig, SpreadModel


def build_fx_system(
    curve_set: CurveSet,
    domestic: str,
    basis_curves: dict[str, str] | None = None,
) -> models.FxSystem:
    if domestic not in curve_set.spots:
        raise ConfigurationError(f"No spot rate for {domestic} in the curve set")

    anchor = curve_set.spots[domestic]
    spots = {ccy: value / anchor for ccy, value in curve_set.spots.items() if ccy != domestic}
    ois_curves = {
        ccy: curves_service.ois_curve_id(ccy)
        for ccy in [domestic, *spots]
        if curves_service.ois_curve_id(ccy) in curve_set.curves
    }
    if basis_curves is None:
        basis_curves = {
            ccy: curves_service.implied_curve_id(ccy, domestic)
            for ccy in spots
            if curves_service.implied_curve_id(ccy, domestic) in curve_set.curves
        }
    try:
        return models.FxSystem(
            domestic=domestic,
            spots=spots,
            curves=curve_set.curves,
            ois_curves=ois_curves,
            basis_curves=basis_curves,
        )
    except ValueError as e:
        raise ConfigurationError(str(e))


def get_curve(fx: models.FxSystem, curve_id: str) -> AnyCurve:
    curve = fx.curves.get(curve_id)
    if curve is None:
        logging.warning(f"Curve {curve_id} requested but not configured")
        raise ConfigurationError(f"Curve {curve_id} is not configured")
    return curve


def ois_curve_id(fx: models.FxSystem, ccy: str) -> str:
    if ccy not in fx.ois_curves:
        raise ConfigurationError(f"No overnight curve configured for {ccy}")
    return fx.ois_curves[ccy]


def basis_curve_id(fx: models.FxSystem, ccy: str) -> str:
    if ccy == fx.domestic:
        return ois_curve_id(fx, ccy)
    if ccy not in fx.basis_curves:
        raise ConfigurationError(f"No basis curve configured for {ccy} under {fx.domestic} collateral")
    return fx.basis_curves[ccy]


def spot(fx: models.FxSystem, ccy: str) -> float:
    if ccy != fx.domestic and ccy not in fx.spots:
        raise ConfigurationError(f"No spot rate configured for {ccy}")
    return fx.spot(ccy)


def cross_spot(fx: models.FxSystem, x: str, y: str) -> float:
    """Units of y obtained for one unit of x."""
    return spot(fx, x) / spot(fx, y)


def effective_discount_curve(ctx: models.CollateralContext, fx: models.FxSystem) -> AnyCurve:
    """Discount curve for `ctx.cashflow_ccy` flows collateralized in `ctx.collateral_ccy`.

    Every row of the collateral table reduces to

        rate = c^y - b^y(e) + b^x(e)

    for flows in x and collateral in y, with b^d(e) = e for the domestic
    currency. Rates are composed as products of discount curves.
    """
    x, y = ctx.cashflow_ccy, ctx.collateral_ccy
    collateral_id = ctx.collateral_curve or ois_curve_id(fx, y)
    components = [
        (collateral_id, get_curve(fx, collateral_id), 1),
        (basis_curve_id(fx, x), get_curve(fx, basis_curve_id(fx, x)), 1),
        (basis_curve_id(fx, y), get_curve(fx, basis_curve_id(fx, y)), -1),
    ]
    return curves_service.compose(components)


def fx_forward(fx: models.FxSystem, ccy: str, T: float) -> float:
    """Forward price in domestic units of one unit of `ccy` delivered at T."""
    if ccy == fx.domestic:
        return 1.0
    p_basis = curves_service.discount_factor(get_curve(fx, basis_curve_id(fx, ccy)), T)
    p_domestic = curves_service.discount_factor(get_curve(fx, ois_curve_id(fx, fx.domestic)), T)
    return spot(fx, ccy) * p_basis / p_domestic


def cross_forward(fx: models.FxSystem, x: str, y: str, T: float) -> float:
    p_x = curves_service.discount_factor(get_curve(fx, basis_curve_id(fx, x)), T)
    p_y = curves_service.discount_factor(get_curve(fx, basis_curve_id(fx, y)), T)
    return cross_spot(fx, x, y) * p_x / p_y


def triangulate_forward(fx: models.FxSystem, x: str, y: str, z: str, T: float) -> float:
    """Forward x -> y when x, y and z are all collateralized in z."""
    if z != fx.domestic:
        logging.warning(f"Triangulation through {z} requested on a {fx.domestic}-collateralized system")
        raise MixedCollateralError(fx.domestic, z)
    return cross_forward(fx, x, y, T)


def fx_swap_par_rate(
    fx: models.FxSystem,
    ccy: str,
    T: float,
    reference_leg: Literal["domestic", "foreign"] = "domestic",
    notional: float = 1.0,
) -> float:
    chi = spot(fx, ccy)
    p_basis = curves_service.discount_factor(get_curve(fx, basis_curve_id(fx, ccy)), T)
    p_domestic = curves_service.discount_factor(get_curve(fx, ois_curve_id(fx, fx.domestic)), T)

    if reference_leg == "domestic":
        # N domestic at both ends, N/chi then N/X foreign
        foreign_units_at_par = notional * p_domestic / (chi * p_basis)
        return notional / foreign_units_at_par
    # M foreign at both ends, chi*M then X*M domestic
    domestic_value_of_foreign = chi * notional * p_basis
    return domestic_value_of_foreign / (notional * p_domestic)


def collateral_switched_forward(fx: models.FxSystem, ccy: str, T: float, gamma: float) -> float:
    """Par rate of an FX swap collateralized in the foreign currency."""
    return fx_forward(fx, ccy, T) * (1.0 + gamma)


def implied_basis_rate(fx: models.FxSystem, ccy: str, T: float) -> float:
    """Instantaneous basis short rate b(e) embedded in the basis curve of `ccy`."""
    return curves_service.instantaneous_forward(get_curve(fx, basis_curve_id(fx, ccy)), T)


def fx_convexity_gamma(
    params: MarketModelParams | None,
    spread: SpreadModel | None,
    T: float,
    cfg: SimulationConfig | None = None,
) -> Estimate:
    """Simulated collateral convexity of an FX forward to T, with its standard error."""
    if params is None or spread is None:
        raise ModelParametersMissingError("the collateral convexity of an FX forward")
    sigma = params.period(1).sigma
    estimate = oracle_service.estimate_gamma(sigma, spread, T, cfg or SimulationConfig())
    logging.info(f"Collateral convexity at T={T}: {estimate.mean:.3e} (se {estimate.standard_error:.1e})")
    return estimate
