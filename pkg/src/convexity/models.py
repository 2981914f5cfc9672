from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.config import DEFAULT_DISPLACEMENT
from src.exceptions import ConfigurationError

PerPeriod = float | list[float]


def _resolve(value: PerPeriod | None, i: int) -> float | None:
    if value is None or isinstance(value, (int, float)):
        return value
    if not 1 <= i <= len(value):
        raise ConfigurationError(f"Period {i} has no parameter in a list of {len(value)}")
    return value[i - 1]


class PeriodParams(BaseModel):
    """Shifted-lognormal parameters resolved for one coupon period."""
    model_config = ConfigDict(frozen=True)

    delta: float
    delta_f: float
    eta: float
    eta_f: float
    sigma: float
    rho: float
    rho_f: float
    beta: float | None = None
    beta_f: float | None = None


class MarketModelParams(BaseModel):
    """Per-period parameters; a scalar applies to every period, a list is indexed by period.

    `rho` correlates the domestic Libor with the FX forward of the previous
    fixing, `rho_f` does the same for the foreign Libor. `beta` defaults to
    F_0 - E_0 read off the curves.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    delta: PerPeriod = DEFAULT_DISPLACEMENT
    delta_f: PerPeriod = DEFAULT_DISPLACEMENT
    eta: PerPeriod = 0.0
    eta_f: PerPeriod = 0.0
    sigma: PerPeriod = 0.0
    rho: PerPeriod = Field(default=0.0, alias="rho_fx_libor")
    rho_f: PerPeriod = Field(default=0.0, alias="rho_fx_libor_f")
    beta: PerPeriod | None = None
    beta_f: PerPeriod | None = None

    @field_validator("delta", "delta_f", "eta", "eta_f", "sigma")
    @classmethod
    def check_nonnegative(cls, value: PerPeriod) -> PerPeriod:
        values = value if isinstance(value, list) else [value]
        if any(v < 0 for v in values):
            raise ValueError("displacements and volatilities must be nonnegative")
        return value

    @field_validator("rho", "rho_f")
    @classmethod
    def check_correlation(cls, value: PerPeriod) -> PerPeriod:
        values = value if isinstance(value, list) else [value]
        if any(abs(v) > 1 for v in values):
            raise ValueError("correlations must lie in [-1, 1]")
        return value

    def period(self, i: int) -> PeriodParams:
        return PeriodParams(
            delta=_resolve(self.delta, i),
            delta_f=_resolve(self.delta_f, i),
            eta=_resolve(self.eta, i),
            eta_f=_resolve(self.eta_f, i),
            sigma=_resolve(self.sigma, i),
            rho=_resolve(self.rho, i),
            rho_f=_resolve(self.rho_f, i),
            beta=_resolve(self.beta, i),
            beta_f=_resolve(self.beta_f, i),
        )


class DomesticAdjustment(BaseModel):
    model_config = ConfigDict(frozen=True)

    delayed_fx: float
    fx_times_libor: float


class ForeignAdjustment(BaseModel):
    model_config = ConfigDict(frozen=True)

    delayed_inv_fx: float
    invfx_times_libor: float
