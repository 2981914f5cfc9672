from src._compat import StrEnum

from pydantic import BaseModel, ConfigDict, model_validator

from src.curves.models import AnyCurve


class FundingConvention(StrEnum):
    # foreign cash is raised with FX swaps collateralized at the domestic rate
    FX_SWAP = "fx-swap"


class CollateralContext(BaseModel):
    model_config = ConfigDict(frozen=True)

    cashflow_ccy: str
    collateral_ccy: str
    collateral_curve: str | None = None
    funding: FundingConvention = FundingConvention.FX_SWAP


class FxSystem(BaseModel):
    """Spots and curves seen by an investor collateralized in `domestic`.

    `spots[a]` converts one unit of currency a into domestic units.
    `ois_curves[a]` discounts at a's own overnight rate, `basis_curves[a]`
    discounts a-flows under domestic collateral. For the domestic currency the
    basis curve is its overnight curve.
    """
    model_config = ConfigDict(frozen=True)

    domestic: str
    spots: dict[str, float]
    curves: dict[str, AnyCurve]
    ois_curves: dict[str, str]
    basis_curves: dict[str, str] = {}

    @model_validator(mode="after")
    def check_system(self):
        if self.domestic not in self.ois_curves:
            raise ValueError(f"no overnight curve declared for {self.domestic}")
        if self.spots.get(self.domestic, 1.0) != 1.0:
            raise ValueError("the domestic spot must be 1")
        if any(not value > 0 for value in self.spots.values()):
            raise ValueError("spot rates must be positive")
        return self

    @property
    def currencies(self) -> list[str]:
        return sorted({self.domestic, *self.spots})

    def spot(self, ccy: str) -> float:
        return 1.0 if ccy == self.domestic else self.spots[ccy]
