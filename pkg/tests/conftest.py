import pytest
from datetime import date

from src.bootstrap import service as bootstrap_service
from src.bootstrap.models import BootstrapConfig
from src.collateral import service as collateral_service
from src.curves import service as curves_service
from src.curves.models import CurveSet
from src.instruments import service as instruments_service
from src.main import main
from src.market_data import dataset
from src.mc_oracle.models import SimulationConfig


@pytest.fixture(scope="session")
def asof():
    return date(2013, 9, 6)


@pytest.fixture(scope="function")
def flat_curve_set(asof):
    """Synthetic curves plus flat basis curves of EUR and HKD under USD collateral."""
    rates = {
        "USD-OIS": 0.008,
        "USD-3M": 0.010,
        "EUR-OIS": 0.006,
        "EUR-3M": 0.008,
        "EUR-IMPL-USD": 0.004,
        "HKD-OIS": 0.009,
        "HKD-3M": 0.011,
        "HKD-IMPL-USD": 0.0095,
    }
    return CurveSet(
        asof=asof,
        spot_ccy="USD",
        spots={"EUR": 1.31, "HKD": 1.0 / 7.755},
        curves={curve_id: curves_service.flat_curve(asof, rate) for curve_id, rate in rates.items()},
    )


@pytest.fixture(scope="function")
def usd_fx_system(flat_curve_set):
    return collateral_service.build_fx_system(flat_curve_set, "USD")


@pytest.fixture(scope="function")
def usd_eur_market(usd_fx_system):
    """USD-collateralized view with USD domestic and EUR foreign."""
    return instruments_service.market_view(usd_fx_system, "USD", "EUR")


@pytest.fixture(scope="session")
def synthetic_curve_set():
    return dataset.synthetic_curve_set()


@pytest.fixture(scope="session")
def degenerate_curve_set():
    return dataset.degenerate_curve_set()


@pytest.fixture(scope="session")
def usd_under_eur(synthetic_curve_set):
    """USD flows under EUR collateral, calibrated to the USD/EUR quotes and FX swaps."""
    return bootstrap_service.bootstrap_implied_curve(
        dataset.usd_eur_quotes(with_fx_swaps=True), synthetic_curve_set, "EUR", "USD", BootstrapConfig()
    )


@pytest.fixture(scope="session")
def triplet_results(synthetic_curve_set):
    config = BootstrapConfig()
    usd_eur, usd_hkd = dataset.usd_eur_quotes(), dataset.usd_hkd_quotes()
    scheme_a = bootstrap_service.triplet_scheme_a(usd_eur, usd_hkd, synthetic_curve_set, config)
    scheme_b = bootstrap_service.triplet_scheme_b(usd_eur, usd_hkd, synthetic_curve_set, config)
    return scheme_a, scheme_b


@pytest.fixture(scope="function")
def small_simulation():
    return SimulationConfig(paths=20_000, step=1 / 50, seed=42, block_size=4096)


@pytest.fixture(scope="function")
def cli(capsys):
    """Run a command line and return (exit code, stdout, stderr)."""

    def run(*argv):
        code = main([str(arg) for arg in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run
