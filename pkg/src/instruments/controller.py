import argparse
from pathlib import Path

from . import models
from . import service
from src.cli import service as cli_service
from src.collateral import service as collateral_service
from src.convexity.models import MarketModelParams
from src.exceptions import ConfigurationError
from src.storage import core as storage
from src.timegrid.models import TENOR_PATTERN


def _tenor_list(value: str) -> list[str]:
    tenors = [tenor.strip().lower() for tenor in value.split(",") if tenor.strip()]
    for tenor in tenors:
        if not TENOR_PATTERN.match(tenor):
            raise argparse.ArgumentTypeError(f"'{tenor}' is not a tenor of the form <n>d|w|m|y")
    return tenors


def _add_pricing_arguments(parser):
    parser.add_argument("--instrument", type=Path, required=True)
    parser.add_argument("--curves", type=Path, required=True)
    parser.add_argument("--asof", type=cli_service.parse_date)
    parser.add_argument("--mode", choices=[mode.value for mode in models.PricingMode], default="effective")
    parser.add_argument("--params", type=Path, help="Market-model parameters for adjusted pricing")
    parser.add_argument("--out", type=Path, default=Path("out"))


def register(subparsers):
    price = subparsers.add_parser("price", help="Value an FX swap or cross-currency swap")
    _add_pricing_arguments(price)
    price.set_defaults(handler=cmd_price)

    spreads = subparsers.add_parser("par-spread", help="Par spreads by tenor against the constant-notional swap")
    _add_pricing_arguments(spreads)
    spreads.add_argument("--tenors", type=_tenor_list, help="Comma separated tenors, defaults to the instrument's")
    spreads.set_defaults(handler=cmd_par_spread)


def _load_inputs(args):
    spec = storage.load_model(args.instrument, models.InstrumentSpec, "instrument")
    curve_set = storage.load_curve_set(args.curves)
    cli_service.check_asof(args.asof, curve_set.asof)
    params = storage.load_model(args.params, MarketModelParams, "parameter") if args.params else None
    inputs = {"instrument": args.instrument, "curves": args.curves}
    if args.params:
        inputs["params"] = args.params
    return spec, curve_set, params, inputs


def _price_fx_swap(spec: models.InstrumentSpec, curve_set, mode: str) -> dict:
    if mode != models.PricingMode.EFFECTIVE:
        raise ConfigurationError("Adjusted pricing applies to marked-to-market swaps only")
    fx = collateral_service.build_fx_system(curve_set, spec.collateral.upper())
    instrument = service.fx_swap_from_quote(spec.to_quote(), fx, curve_set.asof)
    instrument = instrument.model_copy(update={"notional": spec.notional})
    return {
        "npv": service.price_fx_swap(instrument, fx),
        "contract_forward": instrument.forward_rate,
        "par_forward": collateral_service.fx_forward(fx, instrument.ccy, instrument.maturity),
    }


def cmd_price(args) -> int:
    spec, curve_set, params, inputs = _load_inputs(args)
    if spec.kind == "fx-swap":
        result = _price_fx_swap(spec, curve_set, args.mode)
    else:
        market = service.spec_market(spec, curve_set)
        ccs = service.ccs_from_spec(spec, market, curve_set.asof)
        result = {
            "npv": service.price_ccs(ccs, market),
            "par_spread": service.par_spread(ccs, market),
        }
        if args.mode == models.PricingMode.ADJUSTED:
            adjusted_spread = service.par_spread(ccs, market, models.PricingMode.ADJUSTED, params)
            result["npv_adjusted"] = service.price_ccs(ccs, market, models.PricingMode.ADJUSTED, params)
            result["par_spread_adjusted"] = adjusted_spread
            result["adjustment_bp"] = (adjusted_spread - result["par_spread"]) * 1e4

    storage.dump_json({"instrument": spec.model_dump(mode="json"), **result}, args.out / "price.json")
    cli_service.write_manifest(
        cli_service.build_manifest("price", curve_set.asof, inputs, args.out, {"mode": args.mode})
    )
    for key, value in result.items():
        print(f"{key}: {value:.12g}")
    return 0


def cmd_par_spread(args) -> int:
    spec, curve_set, params, inputs = _load_inputs(args)
    if spec.kind == "fx-swap":
        raise ConfigurationError("Par spreads are defined for cross-currency swaps")
    market = service.spec_market(spec, curve_set)
    tenors = args.tenors or [spec.to_quote().tenor]
    table = service.par_spread_table(spec, market, curve_set.asof, tenors, models.PricingMode(args.mode), params)

    storage.save_table(table, args.out / "par_spreads.csv")
    cli_service.write_manifest(
        cli_service.build_manifest(
            "par-spread",
            curve_set.asof,
            inputs,
            args.out,
            {"mode": args.mode, "tenors": ",".join(tenors)},
        )
    )
    print(table.to_string(index=False, float_format=lambda x: f"{x:.8f}"))
    return 0
