"""Exceptions raised by the loranbi toolkit."""


class LoRaNBIError(Exception):
    """Base class of all toolkit errors."""


class DomainError(LoRaNBIError, ValueError):
    """An argument lies outside the domain of an operation."""


class ContractError(LoRaNBIError, ValueError):
    """Shape or sample-rate mismatch between two stages of the chain."""


class FitError(LoRaNBIError):
    """The threshold model cannot be fitted to the given curve."""


class ThresholdSearchError(LoRaNBIError):
    """The descending INR scan could not bracket a zero-error level.

    Attributes
    ----------
    snr_db : float
        SNR of the scan that failed.
    last_inr_db : float
        Last INR level that was evaluated.
    """

    def __init__(self, message, snr_db, last_inr_db):
        super().__init__(message)
        self.snr_db = snr_db
        self.last_inr_db = last_inr_db


class ConfigError(LoRaNBIError, ValueError):
    """Invalid experiment configuration, referencing the offending key and line."""

    def __init__(self, message, key=None, line=None):
        self.message = message
        self.key = key
        self.line = line
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.key is not None:
            where.append(f"key '{self.key}'")
        if not where:
            return self.message
        return ": ".join([", ".join(where), self.message])
