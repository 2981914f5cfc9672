from pathlib import Path

from . import models
from . import service
from src.cli import service as cli_service
from src.config import DEFAULT_SEED, MC_PATHS, MC_STEP, MC_WORKERS, Z_THRESHOLD
from src.exceptions import OracleBreachError
from src.storage import core as storage


def register(subparsers):
    check = subparsers.add_parser(
        "convexity-check", help="Validate the marked-to-market convexity closed forms by simulation"
    )
    check.add_argument("--params", type=Path, help="Parameter grid; defaults to the full sweep")
    check.add_argument("--paths", type=int, default=MC_PATHS)
    check.add_argument("--step", type=float, default=MC_STEP)
    check.add_argument("--seed", type=int, default=DEFAULT_SEED)
    check.add_argument("--workers", type=int, default=MC_WORKERS)
    check.add_argument("--threshold", type=float, default=Z_THRESHOLD)
    check.add_argument("--out", type=Path, default=Path("out"))
    check.set_defaults(handler=cmd_convexity_check)


def cmd_convexity_check(args) -> int:
    grid = storage.load_model(args.params, models.OracleGrid, "grid") if args.params else models.OracleGrid()
    cfg = models.SimulationConfig(paths=args.paths, step=args.step, seed=args.seed, workers=args.workers)

    report = service.validate_closed_forms(grid, cfg)
    storage.save_table(report, args.out / "zscores.csv")
    inputs = {"params": args.params} if args.params else {}
    settings = {
        "paths": args.paths,
        "step": args.step,
        "threshold": args.threshold,
        "grid": grid.model_dump_json(),
        "workers": args.workers,
    }
    cli_service.write_manifest(
        cli_service.build_manifest("convexity-check", None, inputs, args.out, settings, seed=args.seed)
    )

    worst = service.max_abs_z(report)
    print(f"{len(report)} targets, max |z| {worst:.3f} (threshold {args.threshold:.2f})")
    if worst > args.threshold:
        note = service.regime_note(service.breaches(report, args.threshold))
        if note:
            print(f"note: {note}")
        raise OracleBreachError(worst, args.threshold)
    return 0
