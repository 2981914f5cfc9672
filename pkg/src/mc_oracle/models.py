import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import DEFAULT_SEED, MC_BLOCK_SIZE, MC_PATHS, MC_STEP, MC_WORKERS
from src.curves.models import AnyCurve


class SimulationConfig(BaseModel):
    """Paths are split in fixed blocks, each block drawing from its own
    counter-based stream keyed by (seed, stream, block)."""
    model_config = ConfigDict(frozen=True)

    paths: int = Field(default=MC_PATHS, ge=2)
    step: float = Field(default=MC_STEP, gt=0)
    seed: int = DEFAULT_SEED
    antithetic: bool = True
    block_size: int = Field(default=MC_BLOCK_SIZE, ge=2)
    workers: int = Field(default=MC_WORKERS, ge=1)


class SpreadModel(BaseModel):
    """Lognormal discount factor of the spread between foreign collateral and basis rates."""
    model_config = ConfigDict(frozen=True)

    spread_vol: float = Field(ge=0)
    rho: float = Field(ge=-1, le=1)


class RiskFreeSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    risk_free: AnyCurve
    foreign_collateral: AnyCurve
    basis: AnyCurve
    domestic_collateral: AnyCurve


class Estimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    standard_error: float
    samples: int

    def z_score(self, closed_form: float) -> float:
        difference = closed_form - self.mean
        if difference == 0:
            return 0.0
        if self.standard_error == 0:
            return math.copysign(math.inf, difference)
        return difference / self.standard_error


class PeriodInputs(BaseModel):
    """Time-zero state of one coupon period."""
    model_config = ConfigDict(frozen=True)

    x0: float = 1.0
    e0: float
    f0: float
    tau: float = Field(gt=0)
    horizon: float = Field(ge=0)
    delta: float = Field(ge=0)
    beta: float
    sigma: float = Field(ge=0)
    eta: float = Field(ge=0)
    rho: float = Field(ge=-1, le=1)

    @model_validator(mode="after")
    def check_shift(self):
        if not self.f0 + self.delta > 0:
            raise ValueError("shifted forward must be positive at time zero")
        return self


class MtmSimulation(BaseModel):
    model_config = ConfigDict(frozen=True)

    delayed: Estimate
    libor: Estimate
    weighted_delayed: Estimate | None = None
    weighted_libor: Estimate | None = None
    weight: Estimate | None = None
    rejected: int = 0
    paths: int


class OracleGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigmas: tuple[float, ...] = (0.1, 0.2, 0.3)
    etas: tuple[float, ...] = (0.1, 0.2, 0.3)
    rhos: tuple[float, ...] = (-0.9, 0.0, 0.9)
    maturities: tuple[float, ...] = (1.0, 5.0, 10.0)
    tau: float = 0.25
    e0: float = 0.02
    f0: float = 0.025
    delta: float = 0.01


class CarryReplication(BaseModel):
    model_config = ConfigDict(frozen=True)

    dt: float
    realized: float
    limit: float

    @property
    def error(self) -> float:
        return self.realized - self.limit
