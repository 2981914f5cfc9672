import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Literal

import numpy as np
import pandas as pd

from . import models
from src.config import FROZEN_DRIFT_REGIME, MAX_REJECTION_RATE
from src.convexity import service as convexity_service
from src.convexity.models import MarketModelParams, PeriodParams
from src.curves import service as curves_service
from src.exceptions import ModelParametersMissingError, SimulationError
from src.instruments.models import CcsMarket
from src.timegrid.models import Schedule

REPORT_COLUMNS = ["sigma", "eta", "rho", "T", "target", "closed_form", "mc_mean", "mc_se", "z", "regime"]

# kernel(rng, pairs, antithetic) -> per-sample arrays by target, rejected path count
Kernel = Callable[[np.random.Generator, int, bool], tuple[dict[str, np.ndarray], int]]


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def _draw(rng: np.random.Generator, n: int, antithetic: bool) -> np.ndarray:
    z = rng.standard_normal((n, 2))
    return np.concatenate((z, -z)) if antithetic else z


def _pair_average(values: np.ndarray, alive: np.ndarray, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return values[alive]
    n = values.shape[0] // 2
    keep = alive[:n] & alive[n:]
    return (0.5 * (values[:n] + values[n:]))[keep]


def _time_grid(horizon: float, step: float) -> tuple[int, float]:
    if horizon <= 0:
        return 0, 0.0
    n_steps = max(1, math.ceil(horizon / step - 1e-12))
    return n_steps, horizon / n_steps


def _run_blocks(
    kernel: Kernel,
    references: dict[str, float],
    cfg: models.SimulationConfig,
    stream: int,
) -> tuple[dict[str, models.Estimate], int]:
    """Reduce block moments in block order; results do not depend on worker count."""
    per_sample = 2 if cfg.antithetic else 1
    block_samples = max(1, cfg.block_size // per_sample)
    total_samples = math.ceil(cfg.paths / per_sample)
    sizes = [min(block_samples, total_samples - start) for start in range(0, total_samples, block_samples)]

    def run(block: int):
        rng = block_generator(cfg.seed, stream, block)
        samples, rejected = kernel(rng, sizes[block], cfg.antithetic)
        moments = {}
        for target, values in samples.items():
            shifted = values - references[target]
            moments[target] = (float(np.sum(shifted)), float(np.sum(shifted * shifted)), shifted.size)
        return moments, rejected

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, range(len(sizes))))
    else:
        results = [run(block) for block in range(len(sizes))]

    rejected = sum(r for _, r in results)
    simulated = total_samples * per_sample
    if rejected > MAX_REJECTION_RATE * simulated:
        logging.error(f"Rejected {rejected} of {simulated} paths on stream {stream}")
        raise SimulationError(rejected, simulated)
    if rejected:
        logging.warning(f"Rejected {rejected} of {simulated} paths on stream {stream}")

    estimates = {}
    for target, reference in references.items():
        s1 = s2 = 0.0
        n = 0
        for moments, _ in results:
            b1, b2, bn = moments[target]
            s1 += b1
            s2 += b2
            n += bn
        mean = s1 / n
        variance = max(s2 - s1 * mean, 0.0) / (n - 1) if n > 1 else 0.0
        estimates[target] = models.Estimate(
            mean=reference + mean,
            standard_error=math.sqrt(variance / n),
            samples=n,
        )
    return estimates, rejected


def _period(inputs: models.PeriodInputs) -> tuple[float, float, float]:
    shift_base = inputs.delta + inputs.beta
    shift0 = inputs.e0 + shift_base
    ratio0 = 1.0 + inputs.tau * (shift0 - shift_base)
    return shift_base, shift0, ratio0


def _domestic_kernel(inputs: models.PeriodInputs, step: float, measure: Literal["native", "previous"]) -> Kernel:
    n_steps, dt = _time_grid(inputs.horizon, step)
    sigma, eta, rho, tau = inputs.sigma, inputs.eta, inputs.rho, inputs.tau
    shifted_libor = inputs.f0 + inputs.delta
    shift_base, shift0, ratio0 = _period(inputs)
    orthogonal = math.sqrt(max(1.0 - rho * rho, 0.0))
    sqrt_dt = math.sqrt(dt)

    def kernel(rng, pairs, antithetic):
        n = 2 * pairs if antithetic else pairs
        log_growth = np.zeros(n)
        log_x = np.zeros(n)
        alive = np.ones(n, dtype=bool)
        for _ in range(n_steps):
            z = _draw(rng, pairs, antithetic)
            shift = shift0 * np.exp(log_growth)
            ratio = 1.0 + tau * (shift - shift_base)
            alive &= ratio > 0
            safe_ratio = np.where(alive, ratio, 1.0)
            dw_f = sqrt_dt * z[:, 0]
            dw_x = sqrt_dt * (rho * z[:, 0] + orthogonal * z[:, 1])
            if measure == "native":
                # X drifts under the payment-date measure, E is a martingale
                drift_x = -sigma * eta * rho * tau * shift / safe_ratio
                drift_shift = 0.0
            else:
                drift_x = 0.0
                drift_shift = eta * eta * tau * shift / safe_ratio
            log_x += (drift_x - 0.5 * sigma * sigma) * dt + sigma * dw_x
            log_growth += (drift_shift - 0.5 * eta * eta) * dt + eta * dw_f

        growth = np.exp(log_growth)
        ratio = 1.0 + tau * (shift0 * growth - shift_base)
        alive &= ratio > 0
        fx = np.exp(log_x)
        libor = fx * (shifted_libor * growth - inputs.delta)
        if measure == "native":
            samples = {"delayed": fx, "libor": libor}
        else:
            weight = ratio0 / np.where(alive, ratio, 1.0)
            samples = {"delayed": weight * fx, "libor": weight * libor, "weight": weight}
        samples = {target: _pair_average(values, alive, antithetic) for target, values in samples.items()}
        return samples, int(n - np.count_nonzero(alive))

    return kernel


def _foreign_kernel(inputs: models.PeriodInputs, step: float, measure: Literal["native", "previous"]) -> Kernel:
    n_steps, dt = _time_grid(inputs.horizon, step)
    sigma, eta, rho, tau = inputs.sigma, inputs.eta, inputs.rho, inputs.tau
    shifted_libor = inputs.f0 + inputs.delta
    shift_base, shift0, ratio0 = _period(inputs)
    orthogonal = math.sqrt(max(1.0 - rho * rho, 0.0))
    sqrt_dt = math.sqrt(dt)

    def kernel(rng, pairs, antithetic):
        n = 2 * pairs if antithetic else pairs
        log_growth = np.zeros(n)
        log_x = np.zeros(n)
        alive = np.ones(n, dtype=bool)
        for _ in range(n_steps):
            z = _draw(rng, pairs, antithetic)
            shift = shift0 * np.exp(log_growth)
            ratio = 1.0 + tau * (shift - shift_base)
            alive &= ratio > 0
            safe_ratio = np.where(alive, ratio, 1.0)
            dw_f = sqrt_dt * z[:, 0]
            dw_x = sqrt_dt * (rho * z[:, 0] + orthogonal * z[:, 1])
            if measure == "native":
                # ln X under the basis payment-date measure
                drift_x = sigma * sigma - sigma * eta * rho * tau * shift / safe_ratio
                drift_shift = 0.0
            else:
                drift_x = 0.0
                drift_shift = -eta * (sigma * rho - eta * tau * shift / safe_ratio)
            log_x += (drift_x - 0.5 * sigma * sigma) * dt + sigma * dw_x
            log_growth += (drift_shift - 0.5 * eta * eta) * dt + eta * dw_f

        growth = np.exp(log_growth)
        ratio = 1.0 + tau * (shift0 * growth - shift_base)
        alive &= ratio > 0
        inverse_fx = np.exp(-log_x)
        libor = inverse_fx * (shifted_libor * growth - inputs.delta)
        if measure == "native":
            samples = {"delayed": inverse_fx, "libor": libor}
        else:
            weight = np.exp(log_x) * ratio0 / np.where(alive, ratio, 1.0)
            samples = {"delayed": weight * inverse_fx, "libor": weight * libor, "weight": weight}
        samples = {target: _pair_average(values, alive, antithetic) for target, values in samples.items()}
        return samples, int(n - np.count_nonzero(alive))

    return kernel


def _references(inputs: models.PeriodInputs) -> dict[str, float]:
    # value of each sample on a path with no diffusion
    return {"delayed": 1.0, "libor": 1.0 * (inputs.f0 + inputs.delta) * 1.0 - inputs.delta, "weight": 1.0}


def simulate_period(
    inputs: models.PeriodInputs,
    leg: Literal["domestic", "foreign"],
    cfg: models.SimulationConfig,
    stream: int = 0,
    measure_check: bool = True,
) -> models.MtmSimulation:
    """Exact (non-frozen) dynamics of one period, normalized to X_0 = 1."""
    kernel_factory = _domestic_kernel if leg == "domestic" else _foreign_kernel
    references = _references(inputs)

    native, rejected = _run_blocks(
        kernel_factory(inputs, cfg.step, "native"),
        {"delayed": references["delayed"], "libor": references["libor"]},
        cfg,
        2 * stream,
    )
    weighted = {}
    if measure_check:
        weighted, more = _run_blocks(kernel_factory(inputs, cfg.step, "previous"), references, cfg, 2 * stream + 1)
        rejected += more
        logging.debug(f"Measure weight mean {weighted['weight'].mean:.6f} (se {weighted['weight'].standard_error:.1e})")

    return models.MtmSimulation(
        delayed=native["delayed"],
        libor=native["libor"],
        weighted_delayed=weighted.get("delayed"),
        weighted_libor=weighted.get("libor"),
        weight=weighted.get("weight"),
        rejected=rejected,
        paths=cfg.paths,
    )


def _scale(estimate: models.Estimate | None, factor: float) -> models.Estimate | None:
    if estimate is None:
        return None
    return models.Estimate(
        mean=estimate.mean * factor,
        standard_error=estimate.standard_error * abs(factor),
        samples=estimate.samples,
    )


def period_inputs(
    market: CcsMarket,
    schedule: Schedule,
    period: PeriodParams,
    i: int,
    leg: Literal["domestic", "foreign"],
) -> models.PeriodInputs:
    t_prev, t_i = schedule.times[i - 1], schedule.times[i]
    tau = schedule.accruals[i - 1]
    if leg == "domestic":
        discount, forward = market.domestic_discount, market.domestic_forward
        delta, eta, rho, beta = period.delta, period.eta, period.rho, period.beta
    else:
        discount, forward = market.foreign_discount, market.foreign_forward
        delta, eta, rho, beta = period.delta_f, period.eta_f, period.rho_f, period.beta_f
    e0 = curves_service.forward_simple_rate(discount, t_prev, t_i, tau)
    f0 = curves_service.forward_simple_rate(forward, t_prev, t_i, tau)
    return models.PeriodInputs(
        x0=convexity_service.implied_forward(market, t_prev),
        e0=e0,
        f0=f0,
        tau=tau,
        horizon=t_prev,
        delta=delta,
        beta=beta if beta is not None else f0 - e0,
        sigma=period.sigma,
        eta=eta,
        rho=rho,
    )


def simulate_mtm_expectations(
    params: MarketModelParams | None,
    market: CcsMarket,
    schedule: Schedule,
    i: int,
    cfg: models.SimulationConfig,
    leg: Literal["domestic", "foreign"] = "domestic",
    stream: int = 0,
) -> models.MtmSimulation:
    """Monte Carlo estimates of the delayed FX and FX-times-Libor expectations of period i.

    Domestic legs return E[X] and E[X F]; foreign legs return E[1/X] and E[F/X].
    """
    if params is None:
        raise ModelParametersMissingError("marked-to-market expectations")
    inputs = period_inputs(market, schedule, params.period(i), i, leg)
    result = simulate_period(inputs, leg, cfg, stream)
    factor = inputs.x0 if leg == "domestic" else 1.0 / inputs.x0
    return result.model_copy(
        update={
            "delayed": _scale(result.delayed, factor),
            "libor": _scale(result.libor, factor),
            "weighted_delayed": _scale(result.weighted_delayed, factor),
            "weighted_libor": _scale(result.weighted_libor, factor),
        }
    )


def simulate_foreign_mtm_expectations(
    params: MarketModelParams | None,
    market: CcsMarket,
    schedule: Schedule,
    i: int,
    cfg: models.SimulationConfig,
    stream: int = 0,
) -> models.MtmSimulation:
    return simulate_mtm_expectations(params, market, schedule, i, cfg, leg="foreign", stream=stream)


def closed_form_targets(inputs: models.PeriodInputs, leg: Literal["domestic", "foreign"]) -> dict[str, float]:
    period = PeriodParams(
        delta=inputs.delta,
        delta_f=inputs.delta,
        eta=inputs.eta,
        eta_f=inputs.eta,
        sigma=inputs.sigma,
        rho=inputs.rho,
        rho_f=inputs.rho,
    )
    if leg == "domestic":
        adj = convexity_service.domestic_mtm_adjustment(
            1.0, inputs.e0, inputs.f0, inputs.tau, inputs.horizon, period, inputs.beta
        )
        return {"delayed": adj.delayed_fx, "libor": adj.fx_times_libor}
    adj = convexity_service.foreign_mtm_adjustment(
        1.0, inputs.e0, inputs.f0, inputs.tau, inputs.horizon, period, inputs.beta
    )
    return {"delayed": adj.delayed_inv_fx, "libor": adj.invfx_times_libor}


TARGET_NAMES = {
    ("domestic", "delayed"): "domestic_delayed_fx",
    ("domestic", "libor"): "domestic_fx_times_libor",
    ("foreign", "delayed"): "foreign_delayed_inv_fx",
    ("foreign", "libor"): "foreign_invfx_times_libor",
}


def drift_regime(sigma: float, eta: float, rho: float, T: float) -> str:
    """Accuracy regime of the frozen-drift closed forms at one grid point."""
    return "frozen-drift" if sigma * eta * abs(rho) * T > FROZEN_DRIFT_REGIME else "standard"


def validate_closed_forms(grid: models.OracleGrid, cfg: models.SimulationConfig) -> pd.DataFrame:
    """Z-scores of the frozen-drift closed forms against simulation of the exact dynamics."""
    rows = []
    point = 0
    for sigma in grid.sigmas:
        for eta in grid.etas:
            for rho in grid.rhos:
                for maturity in grid.maturities:
                    inputs = models.PeriodInputs(
                        e0=grid.e0,
                        f0=grid.f0,
                        tau=grid.tau,
                        horizon=maturity,
                        delta=grid.delta,
                        beta=grid.f0 - grid.e0,
                        sigma=sigma,
                        eta=eta,
                        rho=rho,
                    )
                    for offset, leg in enumerate(("domestic", "foreign")):
                        closed = closed_form_targets(inputs, leg)
                        simulated = simulate_period(inputs, leg, cfg, stream=2 * point + offset, measure_check=False)
                        for key, estimate in (("delayed", simulated.delayed), ("libor", simulated.libor)):
                            rows.append(
                                {
                                    "sigma": sigma,
                                    "eta": eta,
                                    "rho": rho,
                                    "T": maturity,
                                    "target": TARGET_NAMES[(leg, key)],
                                    "closed_form": closed[key],
                                    "mc_mean": estimate.mean,
                                    "mc_se": estimate.standard_error,
                                    "z": estimate.z_score(closed[key]),
                                    "regime": drift_regime(sigma, eta, rho, maturity),
                                }
                            )
                    point += 1

    report = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    logging.info(f"Oracle sweep over {point} points, max |z| {max_abs_z(report):.2f}")
    return report


def max_abs_z(report: pd.DataFrame) -> float:
    if report.empty:
        return 0.0
    return float(report["z"].abs().max())


def breaches(report: pd.DataFrame, threshold: float) -> pd.DataFrame:
    return report[report["z"].abs() > threshold]


def regime_note(breaching: pd.DataFrame) -> str | None:
    """Note printed when every breaching row lies in the frozen-drift regime."""
    if breaching.empty or (breaching["regime"] != "frozen-drift").any():
        return None
    return (
        f"all {len(breaching)} breaches lie in the frozen-drift regime "
        f"(sigma * eta * |rho| * T > {FROZEN_DRIFT_REGIME:.2f}), where the closed forms "
        "leave out the drift of the shifted rate under the delayed measure"
    )


def estimate_gamma(
    sigma: float,
    spread: models.SpreadModel,
    T: float,
    cfg: models.SimulationConfig,
    stream: int = 0,
) -> models.Estimate:
    """Collateral convexity as cov(chi_T, D) / (X E[D]) from exact terminal draws.

    chi_T / X and D / E[D] are unit-mean lognormals with correlation `spread.rho`.
    """
    vol_fx = sigma * math.sqrt(T)
    vol_spread = spread.spread_vol * math.sqrt(T)
    orthogonal = math.sqrt(max(1.0 - spread.rho ** 2, 0.0))

    def kernel(rng, pairs, antithetic):
        z = _draw(rng, pairs, antithetic)
        fx = np.exp(vol_fx * z[:, 0] - 0.5 * vol_fx ** 2)
        discount = np.exp(vol_spread * (spread.rho * z[:, 0] + orthogonal * z[:, 1]) - 0.5 * vol_spread ** 2)
        covariance = (fx - 1.0) * (discount - 1.0)
        alive = np.ones(covariance.shape[0], dtype=bool)
        return {"gamma": _pair_average(covariance, alive, antithetic)}, 0

    estimates, _ = _run_blocks(kernel, {"gamma": 0.0}, cfg, stream)
    return estimates["gamma"]


def carry_limit(rfs: models.RiskFreeSpec) -> float:
    """Continuous dividend rate r - c^f + b^f(e) - e at the valuation date."""
    rate = curves_service.instantaneous_forward
    return (
        rate(rfs.risk_free, 0.0)
        - rate(rfs.foreign_collateral, 0.0)
        + rate(rfs.basis, 0.0)
        - rate(rfs.domestic_collateral, 0.0)
    )


def replicate_foreign_collateral_carry(rfs: models.RiskFreeSpec, dt: float) -> models.CarryReplication:
    """Dividend rate of one period of the foreign-collateral margining strategy.

    One domestic unit borrowed at the risk-free rate buys foreign collateral
    at spot, which accrues at c^f and is sold forward with an FX swap
    collateralized at e. The period dividend is the funding cost net of the
    discounted forward proceeds.
    """
    if dt <= 0:
        raise ValueError("replication period must be positive")
    funding = curves_service.discount_factor(rfs.risk_free, dt)
    # X(dt) / chi from the FX swap
    forward_points = curves_service.discount_factor(rfs.basis, dt) / curves_service.discount_factor(
        rfs.domestic_collateral, dt
    )
    accrual = 1.0 + curves_service.instantaneous_forward(rfs.foreign_collateral, 0.0) * dt
    realized = (1.0 - funding * accrual * forward_points) / dt
    return models.CarryReplication(dt=dt, realized=realized, limit=carry_limit(rfs))
