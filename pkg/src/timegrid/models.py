import re
from datetime import date
from src._compat import StrEnum

from dateutil.relativedelta import relativedelta
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

TENOR_PATTERN = re.compile(r"^(\d+)([dwmy])$", re.IGNORECASE)


class DayCount(StrEnum):
    ACT_360 = "ACT/360"
    ACT_365F = "ACT/365F"


class QuoteKind(StrEnum):
    FX_SPOT = "fx-spot"
    FX_SWAP = "fx-swap"
    OIS_SWAP = "ois-swap"
    LIBOR_SWAP = "libor-swap"
    CN_CCS = "cn-ccs"
    MTM_CCS = "mtm-ccs"


class Schedule(BaseModel):
    """Payment dates T_0 < ... < T_N with accruals and model times.

    `times` are ACT/365F year fractions from the valuation date, `accruals`
    follow the schedule's own day count.
    """
    model_config = ConfigDict(frozen=True)

    dates: tuple[date, ...] = ()
    times: tuple[float, ...]
    accruals: tuple[float, ...]
    day_count: DayCount = DayCount.ACT_360

    @model_validator(mode="after")
    def check_periods(self):
        if len(self.times) < 2:
            raise ValueError("a schedule needs at least one period")
        if len(self.accruals) != len(self.times) - 1:
            raise ValueError("one accrual per period is required")
        if self.dates and len(self.dates) != len(self.times):
            raise ValueError("dates and times must have the same length")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("schedule times must be strictly increasing")
        if any(tau <= 0 for tau in self.accruals):
            raise ValueError("accruals must be positive")
        return self

    @property
    def periods(self) -> int:
        return len(self.accruals)

    @property
    def start(self) -> float:
        return self.times[0]

    @property
    def end(self) -> float:
        return self.times[-1]


class Quote(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: QuoteKind
    pair_or_ccy: str
    tenor: str
    value: float
    collateral_ccy: str | None = None

    @field_validator("pair_or_ccy")
    @classmethod
    def check_currency_code(cls, value: str) -> str:
        value = value.strip().upper()
        if len(value) not in (3, 6) or not value.isalpha():
            raise ValueError(f"'{value}' is neither a currency nor a currency pair")
        return value

    @field_validator("tenor")
    @classmethod
    def check_tenor(cls, value: str) -> str:
        value = value.strip().lower()
        match = TENOR_PATTERN.match(value)
        if match is None:
            raise ValueError(f"'{value}' is not a tenor of the form <n>d|w|m|y")
        if int(match.group(1)) <= 0:
            raise ValueError(f"maturity '{value}' is not after the valuation date")
        return value

    @field_validator("collateral_ccy")
    @classmethod
    def check_collateral(cls, value: str | None) -> str | None:
        if value is None or not value.strip():
            return None
        return value.strip().upper()

    @property
    def major(self) -> str:
        return self.pair_or_ccy[:3]

    @property
    def minor(self) -> str:
        return self.pair_or_ccy[3:] or self.pair_or_ccy

    @property
    def months(self) -> int | None:
        count, unit = TENOR_PATTERN.match(self.tenor).groups()
        if unit == "m":
            return int(count)
        if unit == "y":
            return 12 * int(count)
        return None

    def maturity_date(self, asof: date) -> date:
        count, unit = TENOR_PATTERN.match(self.tenor).groups()
        count = int(count)
        step = {
            "d": relativedelta(days=count),
            "w": relativedelta(weeks=count),
            "m": relativedelta(months=count),
            "y": relativedelta(years=count),
        }[unit]
        return asof + step

    def forward_rate(self, spot: float) -> float:
        # brokers quote FX swaps as points over spot
        return spot + self.value
