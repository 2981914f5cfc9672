from datetime import date
from src._compat import StrEnum
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from scipy.interpolate import PchipInterpolator

from src.exceptions import SpotAnchorError


class Interpolation(StrEnum):
    LOG_LINEAR_DF = "log-linear-df"
    MONOTONE_CUBIC_ZERO = "monotone-cubic-zero"


class Curve(BaseModel):
    """Discount factors on pillars, with an implicit pillar (0, 1).

    Beyond the last pillar the instantaneous forward is held flat.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["pillars"] = "pillars"
    asof: date
    times: tuple[float, ...]
    dfs: tuple[float, ...]
    interp: Interpolation = Interpolation.LOG_LINEAR_DF
    extrapolation: Literal["flat-forward"] = "flat-forward"

    _knots: np.ndarray = PrivateAttr()
    _log_dfs: np.ndarray = PrivateAttr()
    _zero_spline: PchipInterpolator | None = PrivateAttr(default=None)
    _tail_forward: float = PrivateAttr()

    @model_validator(mode="after")
    def check_pillars(self):
        if not self.times:
            raise ValueError("a curve needs at least one pillar")
        if len(self.times) != len(self.dfs):
            raise ValueError("times and dfs must have the same length")
        if self.times[0] <= 0:
            raise ValueError("pillar times must be positive, df(0) = 1 is implicit")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("pillar times must be strictly increasing")
        if any(not df > 0 for df in self.dfs):
            raise ValueError("discount factors must be positive")
        return self

    def model_post_init(self, __context) -> None:
        times = np.asarray(self.times, dtype=float)
        log_dfs = np.log(np.asarray(self.dfs, dtype=float))
        self._knots = np.concatenate(([0.0], times))
        self._log_dfs = np.concatenate(([0.0], log_dfs))

        if self.interp == Interpolation.MONOTONE_CUBIC_ZERO and len(times) > 1:
            self._zero_spline = PchipInterpolator(times, -log_dfs / times, extrapolate=False)
            z_last = -log_dfs[-1] / times[-1]
            slope = float(self._zero_spline.derivative()(times[-1]))
            self._tail_forward = z_last + times[-1] * slope
        else:
            t0, t1 = self._knots[-2], self._knots[-1]
            self._tail_forward = -(self._log_dfs[-1] - self._log_dfs[-2]) / (t1 - t0)

    @property
    def last_time(self) -> float:
        return self.times[-1]

    def log_df(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.minimum(t, self._knots[-1])
        if self._zero_spline is not None:
            first = self.times[0]
            zeros = np.where(
                inside <= first,
                -self._log_dfs[1] / first,
                self._zero_spline(np.clip(inside, first, self._knots[-1])),
            )
            values = -zeros * inside
        else:
            values = np.interp(inside, self._knots, self._log_dfs)
        tail = np.maximum(t - self._knots[-1], 0.0)
        return values - self._tail_forward * tail


class ZeroSpreadCurve(BaseModel):
    """Reference curve times exp(-Z(T) T), with Z(T) T linear between pillars."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["zero-spread"] = "zero-spread"
    reference: "AnyCurve"
    times: tuple[float, ...]
    spreads: tuple[float, ...]

    @model_validator(mode="after")
    def check_pillars(self):
        if not self.times or len(self.times) != len(self.spreads):
            raise ValueError("one spread per pillar time is required")
        if self.times[0] <= 0 or any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("pillar times must be positive and strictly increasing")
        return self

    @property
    def asof(self) -> date:
        return self.reference.asof

    def log_df(self, t):
        t = np.asarray(t, dtype=float)
        knots = np.concatenate(([0.0], self.times))
        accrued = np.concatenate(([0.0], np.asarray(self.spreads) * np.asarray(self.times)))
        inside = np.interp(np.minimum(t, knots[-1]), knots, accrued)
        tail = np.maximum(t - knots[-1], 0.0) * (accrued[-1] - accrued[-2]) / (knots[-1] - knots[-2])
        return self.reference.log_df(t) - inside - tail


class CurveComponent(BaseModel):
    model_config = ConfigDict(frozen=True)

    curve_id: str
    curve: "AnyCurve"
    power: Literal[1, -1]


class CompositeCurve(BaseModel):
    """Product of curves raised to +1 or -1, used for composed discount rates."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["composite"] = "composite"
    components: tuple[CurveComponent, ...]

    @model_validator(mode="after")
    def check_components(self):
        if not self.components:
            raise ValueError("a composite curve needs at least one component")
        return self

    @property
    def asof(self) -> date:
        return self.components[0].curve.asof

    def log_df(self, t):
        return sum(component.power * component.curve.log_df(t) for component in self.components)


AnyCurve = Annotated[Union[Curve, ZeroSpreadCurve, CompositeCurve], Field(discriminator="kind")]

ZeroSpreadCurve.model_rebuild()
CurveComponent.model_rebuild()
CompositeCurve.model_rebuild()


class SplineCurve1D(BaseModel):
    """Monotone cubic (Fritsch-Carlson family) interpolant through knots."""
    model_config = ConfigDict(frozen=True)

    knots: tuple[float, ...]
    values: tuple[float, ...]

    _spline: PchipInterpolator = PrivateAttr()

    @model_validator(mode="after")
    def check_knots(self):
        if len(self.knots) < 2 or len(self.knots) != len(self.values):
            raise ValueError("at least two knots with one value each are required")
        if any(k1 <= k0 for k0, k1 in zip(self.knots, self.knots[1:])):
            raise ValueError("knots must be strictly increasing")
        return self

    def model_post_init(self, __context) -> None:
        self._spline = PchipInterpolator(np.asarray(self.knots), np.asarray(self.values), extrapolate=False)

    def evaluate(self, x):
        return self._spline(x)


class CurveSet(BaseModel):
    """Named curves plus spot rates quoted in units of `spot_ccy` per unit of each currency."""
    asof: date
    spot_ccy: str
    spots: dict[str, float] = {}
    curves: dict[str, AnyCurve] = {}

    @model_validator(mode="after")
    def check_spots(self):
        if any(not value > 0 for value in self.spots.values()):
            raise ValueError("spot rates must be positive")
        anchor = self.spots.setdefault(self.spot_ccy, 1.0)
        if anchor != 1.0:
            raise SpotAnchorError(self.spot_ccy, anchor)
        return self
