import csv
import io
import logging
from datetime import date

from dateutil.relativedelta import relativedelta
from pydantic import ValidationError

from . import models
from src.exceptions import OrderingError, QuoteParseError

DAYS_IN_YEAR = {
    models.DayCount.ACT_360: 360.0,
    models.DayCount.ACT_365F: 365.0,
}

QUOTE_COLUMNS = ["kind", "pair_or_ccy", "maturity", "value", "collateral_ccy"]


def year_fraction(d1: date, d2: date, convention: models.DayCount = models.DayCount.ACT_360) -> float:
    if d1 > d2:
        raise OrderingError(d1, d2)
    return (d2 - d1).days / DAYS_IN_YEAR[models.DayCount(convention)]


def model_time(asof: date, d: date) -> float:
    """Year fraction used by every curve and model formula."""
    return year_fraction(asof, d, models.DayCount.ACT_365F)


def build_schedule(
    start: date,
    end: date,
    frequency: int,
    day_count: models.DayCount = models.DayCount.ACT_360,
    asof: date | None = None,
) -> models.Schedule:
    if start >= end:
        raise OrderingError(start, end)
    if frequency <= 0:
        raise ValueError("frequency must be a positive number of months")

    asof = asof or start
    rolled = []
    k = 1
    # roll backward from the end date, the stub lands at the front
    while True:
        d = end - relativedelta(months=k * frequency)
        if d <= start:
            break
        rolled.append(d)
        k += 1

    dates = [start, *reversed(rolled), end]
    accruals = [year_fraction(d0, d1, day_count) for d0, d1 in zip(dates, dates[1:])]
    times = [model_time(asof, d) for d in dates]
    logging.debug(f"Built schedule {start} -> {end} with {len(accruals)} periods")
    return models.Schedule(dates=tuple(dates), times=tuple(times), accruals=tuple(accruals), day_count=day_count)


def schedule_from_times(times: list[float], accruals: list[float] | None = None) -> models.Schedule:
    """Schedule on abstract year-fraction times; accruals default to time differences."""
    if accruals is None:
        accruals = [t1 - t0 for t0, t1 in zip(times, times[1:])]
    return models.Schedule(times=tuple(times), accruals=tuple(accruals), day_count=models.DayCount.ACT_365F)


def _is_header(row: list[str]) -> bool:
    return bool(row) and row[0].strip().lower() == "kind"


def parse_quotes(text: str) -> list[models.Quote]:
    quotes = []
    for line_number, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if line_number == 1 and _is_header(row):
            continue
        if len(row) not in (4, 5):
            raise QuoteParseError(line_number, f"expected 4 or 5 columns, found {len(row)}")
        try:
            value = float(row[3])
        except ValueError:
            raise QuoteParseError(line_number, f"value '{row[3].strip()}' is not a number")
        try:
            quote = models.Quote(
                kind=row[0].strip().lower(),
                pair_or_ccy=row[1],
                tenor=row[2],
                value=value,
                collateral_ccy=row[4] if len(row) == 5 else None,
            )
        except ValidationError as e:
            reason = "; ".join(error["msg"] for error in e.errors())
            logging.warning(f"Rejected quote row {line_number}: {reason}")
            raise QuoteParseError(line_number, reason)
        quotes.append(quote)

    logging.info(f"Parsed {len(quotes)} quotes")
    return quotes


def serialize_quotes(quotes: list[models.Quote]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(QUOTE_COLUMNS)
    for quote in quotes:
        writer.writerow([quote.kind.value, quote.pair_or_ccy, quote.tenor, repr(quote.value), quote.collateral_ccy or ""])
    return buffer.getvalue()
