#!/usr/bin/env python3
"""
Custom exception classes for the ConPT percolation toolkit.
"""

from typing import Optional, Any, Dict


class ConPTError(Exception):
    """Base exception class for the toolkit."""

    def __init__(self, message: str, error_code: Optional[str] = None,
                 context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.context = context or {}

    def __str__(self) -> str:
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ValidationError(ConPTError):
    """Raised when input validation fails."""

    def __init__(self, message: str, field_name: Optional[str] = None,
                 field_value: Optional[Any] = None, **kwargs):
        context = kwargs.pop('context', {})
        if field_name:
            context['field_name'] = field_name
        if field_value is not None:
            context['field_value'] = str(field_value)
        super().__init__(message, error_code="VALIDATION_ERROR", context=context, **kwargs)
        self.field_name = field_name


class NetworkFormatError(ConPTError):
    """Raised when a network document cannot be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None,
                 column: Optional[int] = None, file_path: Optional[str] = None, **kwargs):
        context = kwargs.pop('context', {})
        if file_path:
            context['file_path'] = file_path
        if line_number is not None:
            context['line_number'] = line_number
        if column is not None:
            context['column'] = column
        location = f" (line {line_number}, column {column})" if line_number is not None else ""
        super().__init__(f"{message}{location}", error_code="FORMAT_ERROR", context=context, **kwargs)
        self.line_number = line_number
        self.column = column


class FileSecurityError(ConPTError):
    """Raised when file security checks fail."""

    def __init__(self, message: str, file_path: Optional[str] = None,
                 reason: Optional[str] = None, **kwargs):
        context = kwargs.pop('context', {})
        if file_path:
            context['file_path'] = file_path
        if reason:
            context['reason'] = reason
        super().__init__(message, error_code="SECURITY_ERROR", context=context, **kwargs)


class StarTooLargeError(ConPTError):
    """Raised when a star exceeds the configured solver size."""

    def __init__(self, message: str, star_size: Optional[int] = None,
                 limit: Optional[int] = None, **kwargs):
        context = kwargs.pop('context', {})
        if star_size is not None:
            context['star_size'] = star_size
        if limit is not None:
            context['limit'] = limit
        super().__init__(message, error_code="STAR_TOO_LARGE", context=context, **kwargs)
        self.star_size = star_size


class SolverConvergenceError(ConPTError):
    """Raised when the star-mesh equations cannot be solved."""

    def __init__(self, message: str, best_residual: float = float('inf'),
                 star_size: Optional[int] = None, seed: Optional[int] = None, **kwargs):
        context = kwargs.pop('context', {})
        context['best_residual'] = best_residual
        if star_size is not None:
            context['star_size'] = star_size
        if seed is not None:
            context['seed'] = seed
        super().__init__(message, error_code="SOLVER_ERROR", context=context, **kwargs)
        self.best_residual = best_residual


class ReductionError(ConPTError):
    """Raised when a network reduction aborts."""

    def __init__(self, message: str, partial_trace: Optional[Any] = None,
                 succeeded_runs: Optional[int] = None, **kwargs):
        context = kwargs.pop('context', {})
        if succeeded_runs is not None:
            context['succeeded_runs'] = succeeded_runs
        super().__init__(message, error_code="REDUCTION_ERROR", context=context, **kwargs)
        self.partial_trace = partial_trace
        self.succeeded_runs = succeeded_runs


class BetheConvergenceError(ConPTError):
    """Raised when a Bethe fixed point iteration does not settle."""

    def __init__(self, message: str, last_value: Optional[float] = None,
                 iterations: Optional[int] = None, **kwargs):
        context = kwargs.pop('context', {})
        if last_value is not None:
            context['last_value'] = last_value
        if iterations is not None:
            context['iterations'] = iterations
        super().__init__(message, error_code="BETHE_ERROR", context=context, **kwargs)


class OracleLimitError(ConPTError):
    """Raised when the exact oracle would exceed its enumeration budget."""

    def __init__(self, message: str, limit_type: Optional[str] = None,
                 current_value: Optional[Any] = None, limit: Optional[Any] = None, **kwargs):
        context = kwargs.pop('context', {})
        if limit_type:
            context['limit_type'] = limit_type
        if current_value is not None:
            context['current_value'] = str(current_value)
        if limit is not None:
            context['limit'] = str(limit)
        super().__init__(message, error_code="ORACLE_LIMIT", context=context, **kwargs)


class FitError(ConPTError):
    """Raised when a threshold or exponent cannot be extracted."""

    def __init__(self, message: str, quantity: Optional[str] = None, **kwargs):
        context = kwargs.pop('context', {})
        if quantity:
            context['quantity'] = quantity
        super().__init__(message, error_code="FIT_ERROR", context=context, **kwargs)


class ConfigurationError(ConPTError):
    """Raised when configuration is invalid."""

    def __init__(self, message: str, config_key: Optional[str] = None,
                 config_value: Optional[Any] = None, **kwargs):
        context = kwargs.pop('context', {})
        if config_key:
            context['config_key'] = config_key
        if config_value is not None:
            context['config_value'] = str(config_value)
        super().__init__(message, error_code="CONFIG_ERROR", context=context, **kwargs)


class ExportError(ConPTError):
    """Raised when writing an output artifact fails."""

    def __init__(self, message: str, output_path: Optional[str] = None, **kwargs):
        context = kwargs.pop('context', {})
        if output_path:
            context['output_path'] = output_path
        super().__init__(message, error_code="EXPORT_ERROR", context=context, **kwargs)
