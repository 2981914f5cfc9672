class CurveEngineError(Exception):
    """Base exception for every error the engine reports to its caller"""
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InputError(CurveEngineError):
    """Base exception for malformed or inconsistent inputs"""
    exit_code = 3

class UsageError(InputError):
    def __init__(self, message: str):
        super().__init__(f"usage error: {message}")

class OrderingError(InputError):
    def __init__(self, first=None, second=None):
        message = "Dates or times are out of order" if first is None else f"Expected {first} before {second}"
        super().__init__(message)

class QuoteParseError(InputError):
    def __init__(self, line_number=None, reason: str = "malformed row"):
        message = f"Quote parse error: {reason}" if line_number is None else f"Quote parse error at line {line_number}: {reason}"
        super().__init__(message)

class CurveFileError(InputError):
    def __init__(self, path=None, reason: str = "unreadable curve file"):
        message = reason if path is None else f"Cannot parse curve file {path}: {reason}"
        super().__init__(message)

class ConfigurationError(InputError):
    def __init__(self, message: str = "Missing configuration"):
        super().__init__(message)

class NoCalibrationInstrumentsError(InputError):
    def __init__(self, source=None):
        message = "no calibration instruments" if source is None else f"no calibration instruments in {source}"
        super().__init__(message)

class ModelParametersMissingError(InputError):
    def __init__(self, quantity: str = "this quantity"):
        super().__init__(
            f"Model parameters are required for {quantity}; it cannot be inferred from market quotes"
        )

class MixedCollateralError(InputError):
    def __init__(self, collateral=None, required=None):
        message = "Triangulation requires a common collateral currency" if collateral is None else (
            f"Triangulation requires common collateral {required}, system is collateralized in {collateral}"
        )
        super().__init__(message)

class SpotAnchorError(InputError):
    def __init__(self, ccy: str, value: float):
        super().__init__(f"Spot of the quoting currency {ccy} must be 1.0, got {value}")


class PricingError(CurveEngineError):
    """Base exception for numerical failures while valuing an instrument"""
    exit_code = 3

class CurveDomainError(PricingError):
    def __init__(self, t=None):
        message = "Curve queried before the valuation date" if t is None else f"Curve queried at negative time {t}"
        super().__init__(message)

class CurveRangeError(PricingError):
    def __init__(self, t=None, lower=None, upper=None):
        message = "Spline extrapolation is not supported" if t is None else (
            f"Spline queried at {t} outside knot range [{lower}, {upper}]"
        )
        super().__init__(message)

class SingularityError(PricingError):
    def __init__(self, period=None):
        message = "Discount ratio 1 + tau*E is not positive" if period is None else (
            f"Discount ratio 1 + tau*E is not positive in period {period}"
        )
        super().__init__(message)

class DegenerateInstrumentError(PricingError):
    def __init__(self, annuity=None):
        message = "Spread annuity vanishes" if annuity is None else f"Spread annuity {annuity:.3e} vanishes"
        super().__init__(message)

class DataError(PricingError):
    def __init__(self, message: str = "Market data implies a non-positive discount factor"):
        super().__init__(message)


class CalibrationError(CurveEngineError):
    """Base exception for failed curve calibrations"""
    exit_code = 2

class BracketError(CalibrationError):
    def __init__(self, maturity=None, report: str = ""):
        message = "No sign change in solver bracket" if maturity is None else (
            f"No sign change in solver bracket for pillar {maturity}: {report}"
        )
        super().__init__(message)

class RoundTripError(CalibrationError):
    def __init__(self, maturity=None, npv=None):
        message = "Calibration instrument does not reprice at par" if maturity is None else (
            f"Calibration instrument {maturity} reprices with NPV {npv:.3e}"
        )
        super().__init__(message)

class SimulationError(CalibrationError):
    def __init__(self, rejected=None, total=None):
        message = "Too many rejected Monte Carlo paths" if rejected is None else (
            f"Rejected {rejected} of {total} Monte Carlo paths"
        )
        super().__init__(message)


class OracleBreachError(CurveEngineError):
    exit_code = 4

    def __init__(self, max_z=None, threshold=None):
        message = "Closed form disagrees with simulation" if max_z is None else (
            f"Max |z| {max_z:.2f} exceeds threshold {threshold:.2f}"
        )
        super().__init__(message)
