from datetime import date

from pydantic import BaseModel, ConfigDict


class RunManifest(BaseModel):
    """Reproducibility record written next to every command output.

    `digest` covers the command, the valuation date, the contents of every
    input file and the settings that change results; paths and worker counts
    are left out.
    """
    model_config = ConfigDict(frozen=True)

    command: str
    asof: date | None = None
    inputs: dict[str, str] = {}
    output_dir: str
    seed: int | None = None
    settings: dict[str, str | int | float | bool | None] = {}
    digest: str
