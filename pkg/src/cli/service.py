import argparse
import hashlib
import json
import logging
from datetime import date
from pathlib import Path

from . import models
from src.exceptions import ConfigurationError, UsageError
from src.storage import core as storage

MANIFEST_NAME = "manifest.json"
# settings that never change results
_UNHASHED = {"workers", "log_level"}


class CliArgumentParser(argparse.ArgumentParser):
    """Argument parser reporting usage errors as exceptions instead of exiting."""

    def error(self, message: str):
        raise UsageError(message)


def parse_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not an ISO date")


def check_asof(requested: date | None, actual: date):
    if requested is not None and requested != actual:
        raise ConfigurationError(f"Requested valuation date {requested} but the curve set is dated {actual}")


def file_digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_digest(command: str, asof: date | None, inputs: dict[str, Path], settings: dict) -> str:
    canonical = {
        "command": command,
        "asof": asof.isoformat() if asof else None,
        "inputs": {name: file_digest(path) for name, path in sorted(inputs.items())},
        "settings": {key: value for key, value in sorted(settings.items()) if key not in _UNHASHED},
    }
    return hashlib.sha256(json.dumps(canonical, sort_keys=True).encode("utf-8")).hexdigest()


def build_manifest(
    command: str,
    asof: date | None,
    inputs: dict[str, Path],
    output_dir: Path,
    settings: dict,
    seed: int | None = None,
) -> models.RunManifest:
    settings = {**settings, "seed": seed} if seed is not None else dict(settings)
    return models.RunManifest(
        command=command,
        asof=asof,
        inputs={name: str(path) for name, path in sorted(inputs.items())},
        output_dir=str(output_dir),
        seed=seed,
        settings=settings,
        digest=run_digest(command, asof, inputs, settings),
    )


def write_manifest(manifest: models.RunManifest) -> Path:
    path = storage.dump_json(manifest.model_dump(mode="json"), Path(manifest.output_dir) / MANIFEST_NAME)
    logging.info(f"Run {manifest.command} digest {manifest.digest[:12]}")
    return path
