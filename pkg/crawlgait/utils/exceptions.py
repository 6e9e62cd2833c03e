"""
Custom Exceptions for crawlgait
"""

from typing import Any, Dict, Optional


class CrawlGaitError(Exception):
    """Base exception for crawlgait"""
    pass


class ConfigError(CrawlGaitError):
    """Run configuration errors, located by JSON pointer"""

    def __init__(self, message: str, pointer: str = "", check: Optional[str] = None):
        self.pointer = pointer or "/"
        self.check = check
        text = f"{self.pointer}: {message}"
        if check:
            text += f" [{check}]"
        super().__init__(text)


class SignalError(CrawlGaitError):
    """Periodic signal errors"""
    pass


class SignalSyntaxError(SignalError):
    """Malformed signal expression"""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class UnboundNameError(SignalError):
    """Free name without a binding"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unbound name: {name}")


class PeriodError(SignalError):
    """Non-positive or inconsistent period"""
    pass


class LawError(CrawlGaitError):
    """Friction law specification errors"""
    pass


class ModelError(CrawlGaitError):
    """Crawler model invariant violations"""
    pass


class InvalidStepError(CrawlGaitError):
    """Non-positive step size or unstable explicit step"""
    pass


class NumericalError(CrawlGaitError):
    """Numerical failure inside the integrator or an analysis routine"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DissipativityError(CrawlGaitError):
    """The load overcomes friction: the attractor cannot be certified"""

    def __init__(self, message: str, integral_plus: float, integral_minus: float):
        super().__init__(message)
        self.integral_plus = integral_plus
        self.integral_minus = integral_minus


class NotPeriodicError(CrawlGaitError):
    """Starting value is not a fixed point of the period map"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
