from src._compat import StrEnum

from pydantic import BaseModel, ConfigDict, Field

from src.config import CCS_FREQUENCY_MONTHS, SOLVER_MAX_ITER, SOLVER_TOLERANCE, SOLVER_XTOL
from src.curves.models import Curve, ZeroSpreadCurve


class TripletScheme(StrEnum):
    # hub currency calibrated under the target collateral first
    A = "a"
    # everything under hub collateral, then re-bootstrapped
    B = "b"


class PillarSource(StrEnum):
    FX_SWAP = "fx-swap"
    CCS = "ccs"


class BootstrapConfig(BaseModel):
    """Run settings of one effective-curve calibration.

    `cutover` is the longest FX swap maturity in years; when left empty it is
    read off the FX swap quotes, and without FX swaps every CCS is used.
    `tolerance` is the NPV per unit notional every calibration instrument
    must reprice to.
    """
    model_config = ConfigDict(frozen=True)

    cutover: float | None = Field(default=None, gt=0)
    tolerance: float = Field(default=SOLVER_TOLERANCE, gt=0)
    max_iter: int = Field(default=SOLVER_MAX_ITER, ge=1)
    xtol: float = Field(default=SOLVER_XTOL, gt=0)
    spline_to_annual_grid: bool = True
    frequency: int = Field(default=CCS_FREQUENCY_MONTHS, ge=1)
    scheme: TripletScheme = TripletScheme.A


class Pillar(BaseModel):
    model_config = ConfigDict(frozen=True)

    tenor: str
    t: float
    df: float
    source: PillarSource
    # par spread the pillar was solved for, empty on the FX swap short end
    spread: float | None = None
    fx_forward: float | None = None


class RoundTripRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    instrument: str
    tenor: str
    t: float
    quoted: float
    model: float
    npv: float


class BootstrapResult(BaseModel):
    """Implied curve of `currency` for flows collateralized in `collateral`."""
    model_config = ConfigDict(frozen=True)

    curve_id: str
    currency: str
    collateral: str
    curve: Curve
    zero_spread: ZeroSpreadCurve | None = None
    pillars: tuple[Pillar, ...]
    roundtrip: tuple[RoundTripRow, ...] = ()

    @property
    def max_abs_npv(self) -> float:
        return max((abs(row.npv) for row in self.roundtrip), default=0.0)


class TripletResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: TripletScheme
    target: BootstrapResult
    intermediate: tuple[BootstrapResult, ...] = ()
    # synthesized target pair par spreads under hub collateral, by tenor
    synthetic_spreads: dict[str, float] = {}
