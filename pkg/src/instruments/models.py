from src._compat import StrEnum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.collateral.models import CollateralContext
from src.config import CCS_FREQUENCY_MONTHS
from src.curves.models import AnyCurve
from src.exceptions import ConfigurationError
from src.timegrid.models import Quote, Schedule


class NotionalType(StrEnum):
    CONSTANT = "constant"
    MTM = "mtm"


class RateType(StrEnum):
    FLOATING = "floating"
    FIXED = "fixed"


class PricingMode(StrEnum):
    EFFECTIVE = "effective"
    ADJUSTED = "adjusted"


class CcsMarket(BaseModel):
    """Four-curve view of a currency pair from the side of `domestic_ccy`.

    `spot` is in domestic units per unit of foreign currency. The foreign
    discount curve is the implied (effective) curve, the foreign forwarding
    curve is the one of the foreign money market.
    """
    model_config = ConfigDict(frozen=True)

    domestic_ccy: str
    foreign_ccy: str
    spot: float
    domestic_discount: AnyCurve
    domestic_forward: AnyCurve
    foreign_discount: AnyCurve
    foreign_forward: AnyCurve

    @model_validator(mode="after")
    def check_market(self):
        if self.domestic_ccy == self.foreign_ccy:
            raise ValueError("a cross-currency view needs two distinct currencies")
        if not self.spot > 0:
            raise ValueError("spot must be positive")
        return self


class FxSwapInstrument(BaseModel):
    model_config = ConfigDict(frozen=True)

    ccy: str
    maturity: float
    forward_rate: float
    notional: float = 1.0
    start: float = 0.0
    collateral: CollateralContext | None = None

    @model_validator(mode="after")
    def check_rate(self):
        if not self.forward_rate > 0:
            raise ValueError("contract forward rate must be positive")
        if self.maturity <= self.start:
            raise ValueError("maturity must follow the start")
        return self


class CcsLeg(BaseModel):
    """One leg of a cross-currency swap.

    A constant-notional leg carries its notional in its own currency, a
    marked-to-market leg carries it in the other leg's currency and resets
    it at every period start.
    """
    model_config = ConfigDict(frozen=True)

    currency: str
    schedule: Schedule
    notional: float = 1.0
    notional_type: NotionalType = NotionalType.CONSTANT
    rate_type: RateType = RateType.FLOATING
    fixed_rate: float = 0.0
    spread: float = 0.0

    def with_spread(self, spread: float) -> "CcsLeg":
        return self.model_copy(update={"spread": spread})


class CcsInstrument(BaseModel):
    model_config = ConfigDict(frozen=True)

    legs: tuple[CcsLeg, CcsLeg]
    spread_leg: int = 1
    collateral: CollateralContext | None = None

    @model_validator(mode="after")
    def check_structure(self):
        if self.legs[0].currency == self.legs[1].currency:
            raise ValueError("cross-currency legs must be in different currencies")
        if all(leg.notional_type == NotionalType.MTM for leg in self.legs):
            raise ValueError("at most one leg can be marked to market")
        if self.spread_leg not in (0, 1):
            raise ValueError("spread_leg must be 0 or 1")
        return self

    @property
    def quoted_leg(self) -> CcsLeg:
        return self.legs[self.spread_leg]

    def leg_in(self, ccy: str) -> CcsLeg:
        for leg in self.legs:
            if leg.currency == ccy:
                return leg
        raise ConfigurationError(f"Swap has no leg in {ccy}")

    def with_spread(self, spread: float) -> "CcsInstrument":
        legs = list(self.legs)
        legs[self.spread_leg] = legs[self.spread_leg].with_spread(spread)
        return self.model_copy(update={"legs": tuple(legs)})


class InstrumentSpec(BaseModel):
    """File form of a market-standard instrument on a pair.

    `spread` is the quoted-leg spread for swaps and the forward points
    for FX swaps, in units of the first currency per unit of the second.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["fx-swap", "cn-ccs", "mtm-ccs"] = "mtm-ccs"
    pair: str
    tenor: str
    spread: float = 0.0
    collateral: str
    frequency: int = Field(default=CCS_FREQUENCY_MONTHS, ge=1)
    notional: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def check_quote(self):
        quote = self.to_quote()
        if len(quote.pair_or_ccy) != 6:
            raise ValueError("instruments are defined on a currency pair")
        return self

    def to_quote(self) -> Quote:
        return Quote(
            kind=self.kind,
            pair_or_ccy=self.pair,
            tenor=self.tenor,
            value=self.spread,
            collateral_ccy=self.collateral,
        )
