import logging
from pathlib import Path

from . import models
from . import service
from src.cli import service as cli_service
from src.curves import service as curves_service
from src.exceptions import ConfigurationError, NoCalibrationInstrumentsError
from src.storage import core as storage
from src.timegrid.models import QuoteKind


def register(subparsers):
    bootstrap = subparsers.add_parser("bootstrap", help="Calibrate an implied discount curve from FX swaps and CCS")
    bootstrap.add_argument("--quotes", type=Path, required=True)
    bootstrap.add_argument("--curves", type=Path, required=True)
    bootstrap.add_argument("--collateral", help="Collateral currency; defaults to the one declared by the quotes")
    bootstrap.add_argument("--target", help="Currency whose implied curve is calibrated")
    bootstrap.add_argument("--asof", type=cli_service.parse_date)
    bootstrap.add_argument("--cutover", type=float, help="Longest FX swap maturity in years")
    bootstrap.add_argument("--tolerance", type=float, default=models.BootstrapConfig().tolerance)
    bootstrap.add_argument("--no-spline", action="store_true", help="Bootstrap on quoted maturities only")
    bootstrap.add_argument("--out", type=Path, default=Path("out"))
    bootstrap.set_defaults(handler=cmd_bootstrap)

    triplet = subparsers.add_parser("triplet-check", help="Compare the two currency-triplet calibration schemes")
    triplet.add_argument(
        "--quotes",
        type=Path,
        nargs=2,
        required=True,
        metavar=("HUB_COLLATERAL", "HUB_TARGET"),
        help="Quote files of the two pairs sharing the hub currency",
    )
    triplet.add_argument("--curves", type=Path, required=True)
    triplet.add_argument("--scheme", choices=[scheme.value for scheme in models.TripletScheme], default="a")
    triplet.add_argument("--asof", type=cli_service.parse_date)
    triplet.add_argument("--tolerance", type=float, default=models.BootstrapConfig().tolerance)
    triplet.add_argument("--no-spline", action="store_true")
    triplet.add_argument("--out", type=Path, default=Path("out"))
    triplet.set_defaults(handler=cmd_triplet_check)


def _declared_collateral(quotes) -> str:
    declared = {quote.collateral_ccy for quote in quotes if quote.collateral_ccy}
    if len(declared) != 1:
        raise ConfigurationError("Pass --collateral: the quotes do not declare a single collateral currency")
    return declared.pop()


def cmd_bootstrap(args) -> int:
    quotes = storage.load_quotes(args.quotes)
    curve_set = storage.load_curve_set(args.curves)
    cli_service.check_asof(args.asof, curve_set.asof)
    if not any(quote.kind in (QuoteKind.FX_SWAP, QuoteKind.MTM_CCS) for quote in quotes):
        raise NoCalibrationInstrumentsError(str(args.quotes))
    collateral = args.collateral.upper() if args.collateral else _declared_collateral(quotes)
    config = models.BootstrapConfig(
        cutover=args.cutover,
        tolerance=args.tolerance,
        spline_to_annual_grid=not args.no_spline,
    )

    result = service.bootstrap_implied_curve(
        quotes,
        curve_set,
        collateral,
        args.target.upper() if args.target else None,
        config,
        source=str(args.quotes),
    )

    out = args.out
    storage.save_curve(result.curve, out / f"{result.curve_id}.json")
    if result.zero_spread is not None:
        storage.save_curve(result.zero_spread, out / f"{result.curve_id}.zero-spread.json")
    storage.save_curve_set(curves_service.with_curve(curve_set, result.curve_id, result.curve), out / "curves.json")
    storage.save_table(service.roundtrip_table(result), out / "roundtrip.csv")
    storage.save_table(service.pillar_table(result), out / "pillars.csv")
    manifest = cli_service.build_manifest(
        "bootstrap",
        curve_set.asof,
        {"quotes": args.quotes, "curves": args.curves},
        out,
        {
            "collateral": collateral,
            "target": result.currency,
            "cutover": args.cutover,
            "tolerance": args.tolerance,
            "spline_to_annual_grid": not args.no_spline,
        },
    )
    cli_service.write_manifest(manifest)

    print(f"{result.curve_id}: {len(result.pillars)} pillars, {len(result.roundtrip)} instruments repriced")
    print(f"max |NPV| per unit notional {result.max_abs_npv:.3e} (tolerance {config.tolerance:.1e})")
    return 0


def cmd_triplet_check(args) -> int:
    hub_collateral = storage.load_quotes(args.quotes[0])
    hub_target = storage.load_quotes(args.quotes[1])
    curve_set = storage.load_curve_set(args.curves)
    cli_service.check_asof(args.asof, curve_set.asof)
    config = models.BootstrapConfig(tolerance=args.tolerance, spline_to_annual_grid=not args.no_spline)

    scheme_a = service.triplet_scheme_a(hub_collateral, hub_target, curve_set, config)
    scheme_b = service.triplet_scheme_b(hub_collateral, hub_target, curve_set, config)
    collateral, target = scheme_a.target.collateral, scheme_a.target.currency
    report = service.compare_triplet(scheme_a.target.curve, scheme_b.target.curve, curve_set, collateral, target)

    selected = scheme_a if args.scheme == models.TripletScheme.A else scheme_b
    out = args.out
    storage.save_table(report, out / "triplet.csv")
    storage.save_table(service.synthetic_spread_table(scheme_b), out / "synthetic_spreads.csv")
    storage.save_curve(selected.target.curve, out / f"{selected.target.curve_id}.json")
    storage.save_curve_set(
        curves_service.with_curve(curve_set, selected.target.curve_id, selected.target.curve), out / "curves.json"
    )
    manifest = cli_service.build_manifest(
        "triplet-check",
        curve_set.asof,
        {"hub_collateral_quotes": args.quotes[0], "hub_target_quotes": args.quotes[1], "curves": args.curves},
        out,
        {"scheme": args.scheme, "tolerance": args.tolerance, "spline_to_annual_grid": not args.no_spline},
    )
    cli_service.write_manifest(manifest)

    logging.info(f"Exported {selected.target.curve_id} from scheme {args.scheme}")
    print(report.to_string(index=False, float_format=lambda x: f"{x:.6f}"))
    return 0
