import json
import logging
from pathlib import Path
from typing import TypeVar

import pandas as pd
from pydantic import BaseModel, ValidationError

from src.curves import service as curves_service
from src.curves.models import AnyCurve, CurveSet
from src.exceptions import ConfigurationError, CurveFileError, QuoteParseError
from src.timegrid import service as timegrid_service
from src.timegrid.models import Quote

ModelT = TypeVar("ModelT", bound=BaseModel)

FLOAT_FORMAT = "%.12g"


def _read_text(path: Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_curve_set(path: Path) -> CurveSet:
    try:
        payload = json.loads(_read_text(path))
    except OSError as e:
        logging.error(f"Cannot read curve file {path}: {e}")
        raise CurveFileError(path, str(e))
    except json.JSONDecodeError as e:
        logging.error(f"Curve file {path} is not valid JSON: {e}")
        raise CurveFileError(path, f"invalid JSON at line {e.lineno} column {e.colno}")
    if not isinstance(payload, dict):
        raise CurveFileError(path, "expected a JSON object")
    try:
        return curves_service.curve_set_from_json(payload)
    except ValueError as e:
        raise CurveFileError(path, str(e))


def load_quotes(path: Path) -> list[Quote]:
    try:
        text = _read_text(path)
    except OSError as e:
        logging.error(f"Cannot read quote file {path}: {e}")
        raise QuoteParseError(reason=f"cannot read {path}: {e}")
    return timegrid_service.parse_quotes(text)


def load_model(path: Path, model: type[ModelT], label: str) -> ModelT:
    """Validate a JSON file against a pydantic model."""
    try:
        return model.model_validate_json(_read_text(path))
    except OSError as e:
        logging.error(f"Cannot read {label} file {path}: {e}")
        raise ConfigurationError(f"Cannot read {label} file {path}: {e}")
    except ValidationError as e:
        logging.error(f"Invalid {label} file {path}: {e}")
        raise ConfigurationError(f"Invalid {label} file {path}: {e.error_count()} validation error(s)")


def dump_json(payload, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logging.debug(f"Wrote {path}")
    return path


def save_curve_set(curve_set: CurveSet, path: Path) -> Path:
    return dump_json(curves_service.curve_set_to_json(curve_set), path)


def save_curve(curve: AnyCurve, path: Path) -> Path:
    return dump_json(curves_service.curve_to_json(curve), path)


def save_quotes(quotes: list[Quote], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(timegrid_service.serialize_quotes(quotes), encoding="utf-8")
    return path


def save_table(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logging.debug(f"Wrote {len(frame)} rows to {path}")
    return path
