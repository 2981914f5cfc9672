import json

import pandas as pd
import pytest

from src.instruments import service as instruments_service
from src.instruments.models import InstrumentSpec
from src.market_data import dataset
from src.storage import core as storage


@pytest.fixture
def market_files(tmp_path, flat_curve_set):
    curves = storage.save_curve_set(flat_curve_set, tmp_path / "curves.json")
    quotes = storage.save_quotes(dataset.usd_eur_quotes(with_fx_swaps=True), tmp_path / "usdeur.csv")
    return curves, quotes


def _write_spec(path, spec: InstrumentSpec):
    return storage.dump_json(spec.model_dump(mode="json"), path)


def test_bootstrap_writes_curve_and_manifest(cli, tmp_path):
    curves = storage.save_curve_set(dataset.synthetic_curve_set(), tmp_path / "synthetic.json")
    quotes = storage.save_quotes(dataset.usd_eur_quotes(with_fx_swaps=True), tmp_path / "usdeur.csv")
    out = tmp_path / "out"

    code, stdout, _ = cli("bootstrap", "--quotes", quotes, "--curves", curves, "--out", out)

    assert code == 0
    assert "EUR-IMPL-USD" in stdout
    for name in ("EUR-IMPL-USD.json", "EUR-IMPL-USD.zero-spread.json", "curves.json", "roundtrip.csv", "pillars.csv"):
        assert (out / name).exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "bootstrap"
    assert manifest["asof"] == "2013-09-06"
    roundtrip = pd.read_csv(out / "roundtrip.csv")
    assert roundtrip["npv"].abs().max() <= 1e-10
    assert "EUR-IMPL-USD" in json.loads((out / "curves.json").read_text())["curves"]


def test_bootstrap_is_reproducible(cli, tmp_path):
    curves = storage.save_curve_set(dataset.synthetic_curve_set(), tmp_path / "synthetic.json")
    quotes = storage.save_quotes(dataset.usd_eur_quotes(), tmp_path / "usdeur.csv")
    args = ("bootstrap", "--quotes", quotes, "--curves", curves, "--collateral", "EUR", "--no-spline")

    assert cli(*args, "--out", tmp_path / "first")[0] == 0
    assert cli("--log-level", "debug", *args, "--out", tmp_path / "second")[0] == 0

    first = json.loads((tmp_path / "first" / "manifest.json").read_text())
    second = json.loads((tmp_path / "second" / "manifest.json").read_text())
    assert first["digest"] == second["digest"]
    assert (tmp_path / "first" / "USD-IMPL-EUR.json").read_bytes() == (
        tmp_path / "second" / "USD-IMPL-EUR.json"
    ).read_bytes()


def test_bootstrap_without_instruments(cli, tmp_path, market_files):
    curves, _ = market_files
    empty = tmp_path / "empty.csv"
    empty.write_text("kind,pair_or_ccy,maturity,value,collateral_ccy\n")

    code, _, stderr = cli("bootstrap", "--quotes", empty, "--curves", curves, "--collateral", "USD")

    assert code == 3
    assert "no calibration instruments" in stderr


def test_bootstrap_without_instruments_or_collateral(cli, tmp_path, market_files):
    curves, _ = market_files
    ois_only = tmp_path / "ois.csv"
    ois_only.write_text("kind,pair_or_ccy,maturity,value\nois-swap,USD,1y,0.008\n")

    for quotes in (tmp_path / "empty.csv", ois_only):
        quotes.touch()
        code, _, stderr = cli("bootstrap", "--quotes", quotes, "--curves", curves)

        assert code == 3
        assert "no calibration instruments" in stderr
        assert "--collateral" not in stderr


def test_corrupt_curve_file(cli, tmp_path, market_files):
    _, quotes = market_files
    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text("{not json")

    code, _, stderr = cli("bootstrap", "--quotes", quotes, "--curves", corrupt)

    assert code == 3
    assert str(corrupt) in stderr


def test_mismatched_valuation_date(cli, market_files):
    curves, quotes = market_files
    code, _, _ = cli("bootstrap", "--quotes", quotes, "--curves", curves, "--asof", "2014-01-02")
    assert code == 3


def test_triplet_check_on_identical_curves(cli, tmp_path):
    curves = storage.save_curve_set(dataset.degenerate_curve_set(), tmp_path / "curves.json")
    usd_eur = storage.save_quotes(dataset.degenerate_quotes("USDEUR"), tmp_path / "usdeur.csv")
    usd_hkd = storage.save_quotes(dataset.degenerate_quotes("USDHKD"), tmp_path / "usdhkd.csv")
    out = tmp_path / "out"

    code, _, _ = cli("triplet-check", "--quotes", usd_eur, usd_hkd, "--curves", curves, "--scheme", "b", "--out", out)

    assert code == 0
    report = pd.read_csv(out / "triplet.csv")
    assert len(report) == 10
    assert report["diff_bp"].abs().max() < 1e-4
    assert (out / "HKD-IMPL-EUR.json").exists()
    assert json.loads((out / "manifest.json").read_text())["settings"]["scheme"] == "b"


def test_unknown_scheme_is_a_usage_error(cli, tmp_path, market_files):
    curves, quotes = market_files
    code, _, stderr = cli("triplet-check", "--quotes", quotes, quotes, "--curves", curves, "--scheme", "c")

    assert code == 3
    assert "usage error" in stderr


def test_price_at_par(cli, tmp_path, market_files, flat_curve_set):
    curves, _ = market_files
    spec = InstrumentSpec(pair="USDEUR", tenor="5y", collateral="USD")
    market = instruments_service.spec_market(spec, flat_curve_set)
    spread = instruments_service.par_spread(
        instruments_service.ccs_from_spec(spec, market, flat_curve_set.asof), market
    )
    instrument = _write_spec(tmp_path / "ccs.json", spec.model_copy(update={"spread": spread}))
    out = tmp_path / "out"

    code, stdout, _ = cli("price", "--instrument", instrument, "--curves", curves, "--out", out)

    assert code == 0
    assert stdout.startswith("npv:")
    price = json.loads((out / "price.json").read_text())
    assert price["npv"] == pytest.approx(0.0, abs=1e-12)
    assert price["par_spread"] == pytest.approx(spread, abs=1e-15)


def test_adjusted_price(cli, tmp_path, market_files):
    curves, _ = market_files
    instrument = _write_spec(tmp_path / "ccs.json", InstrumentSpec(pair="USDEUR", tenor="3y", collateral="USD"))
    params = storage.dump_json({"sigma": 0.1, "eta": 0.2, "rho_fx_libor": 0.5}, tmp_path / "params.json")
    out = tmp_path / "out"

    missing = cli("price", "--instrument", instrument, "--curves", curves, "--mode", "adjusted", "--out", out)
    assert missing[0] == 3
    assert "Model parameters are required" in missing[2]

    args = ("--instrument", instrument, "--curves", curves, "--mode", "adjusted", "--params", params, "--out", out)
    assert cli("price", *args)[0] == 0
    price = json.loads((out / "price.json").read_text())
    assert {"npv_adjusted", "par_spread_adjusted", "adjustment_bp"} <= set(price)


def test_price_fx_swap(cli, tmp_path, market_files):
    curves, _ = market_files
    spec = InstrumentSpec(kind="fx-swap", pair="USDEUR", tenor="1y", spread=0.00524, collateral="USD")
    instrument = _write_spec(tmp_path / "fx.json", spec)

    code, _, _ = cli("price", "--instrument", instrument, "--curves", curves, "--out", tmp_path / "out")

    assert code == 0
    price = json.loads((tmp_path / "out" / "price.json").read_text())
    assert price["contract_forward"] == pytest.approx(1.31524, rel=1e-14)
    assert price["par_forward"] > 1.31


def test_par_spread_table(cli, tmp_path, market_files):
    curves, _ = market_files
    instrument = _write_spec(tmp_path / "ccs.json", InstrumentSpec(pair="USDEUR", tenor="5y", collateral="USD"))
    out = tmp_path / "out"

    code, _, _ = cli("par-spread", "--instrument", instrument, "--curves", curves, "--tenors", "1y,5y,10y", "--out", out)

    assert code == 0
    table = pd.read_csv(out / "par_spreads.csv")
    assert list(table["tenor"]) == ["1y", "5y", "10y"]
    assert list(table.columns) == instruments_service.PAR_SPREAD_COLUMNS

    assert cli("par-spread", "--instrument", instrument, "--curves", curves, "--tenors", "5q")[0] == 3


def test_convexity_check(cli, tmp_path):
    grid = storage.dump_json(
        {"sigmas": [0.0], "etas": [0.0], "rhos": [0.0], "maturities": [1.0]}, tmp_path / "grid.json"
    )
    out = tmp_path / "out"

    code, _, _ = cli("convexity-check", "--params", grid, "--paths", 1000, "--step", 0.5, "--out", out)

    assert code == 0
    report = pd.read_csv(out / "zscores.csv")
    assert len(report) == 4
    assert (report["z"] == 0).all()
    assert json.loads((out / "manifest.json").read_text())["seed"] == 42


def test_convexity_check_breach(cli, tmp_path):
    grid = storage.dump_json(
        {"sigmas": [0.3], "etas": [0.3], "rhos": [0.9], "maturities": [5.0]}, tmp_path / "grid.json"
    )
    args = ("--params", grid, "--paths", 2000, "--step", 0.5, "--threshold", 0.0, "--out", tmp_path / "out")

    code, _, stderr = cli("convexity-check", *args)

    assert code == 4
    assert "exceeds threshold" in stderr


def test_convexity_check_notes_the_frozen_drift_regime(cli, tmp_path):
    grid = storage.dump_json(
        {"sigmas": [0.3], "etas": [0.6], "rhos": [-0.9], "maturities": [10.0]}, tmp_path / "grid.json"
    )
    args = ("--params", grid, "--paths", 200_000, "--step", 0.1, "--out", tmp_path / "out")

    code, stdout, _ = cli("convexity-check", *args)

    assert code == 4
    assert "frozen-drift regime" in stdout
    report = pd.read_csv(tmp_path / "out" / "zscores.csv")
    assert set(report["regime"]) == {"frozen-drift"}


def test_curve_file_with_a_rescaled_quoting_currency(cli, tmp_path, market_files):
    curves, quotes = market_files
    payload = json.loads(curves.read_text())
    payload["spots"]["USD"] = 2.0
    storage.dump_json(payload, curves)

    code, _, stderr = cli("bootstrap", "--quotes", quotes, "--curves", curves)

    assert code == 3
    assert "must be 1.0" in stderr
