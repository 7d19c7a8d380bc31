#!/usr/bin/env python3
"""
Custom Exceptions Module

This module defines the exception hierarchy for irs-lab so that every
operation surfaces a specific, catchable error with structured details.
"""


class IRSLabError(Exception):
    """Base exception class for all irs-lab errors."""

    def __init__(self, message: str, source: str = None, details: dict = None):
        """
        Initialize IRSLabError.

        Args:
            message (str): Error message
            source (str): Config field, file or object that caused the error (optional)
            details (dict): Additional error details (optional)
        """
        super().__init__(message)
        self.message = message
        self.source = source
        self.details = details if details is not None else {}

    def __str__(self):
        """Return formatted error message."""
        base_msg = self.message
        if self.source:
            base_msg = f"{base_msg} (source: {self.source})"
        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            base_msg = f"{base_msg} [{details_str}]"
        return base_msg


# Group arithmetic

class UnknownGenerator(IRSLabError):
    """Raised when a word uses a letter outside the generating set."""
    pass


class FamilyMismatch(IRSLabError):
    """Raised when objects from different marked groups are combined."""
    pass


class BallTooLarge(IRSLabError):
    """Raised when a word-metric ball would exceed the configured cap."""

    def __init__(self, radius: int, cap: int):
        """
        Initialize BallTooLarge.

        Args:
            radius (int): Requested radius
            cap (int): Element cap that was exceeded
        """
        super().__init__(
            f"Ball of radius {radius} exceeds the cap of {cap} elements",
            details={'radius': radius, 'cap': cap}
        )
        self.radius = radius
        self.cap = cap


class NotAHomomorphism(IRSLabError):
    """Raised when generator images do not define a homomorphism or action."""
    pass


class UnsupportedSource(IRSLabError):
    """Raised when a homomorphism is requested from a group with relations."""
    pass


class GroupTooLarge(IRSLabError):
    """Raised when an exhaustive routine is asked to run on a large group."""
    pass


class Unsupported(IRSLabError):
    """Raised when an operation has no implementation for a family."""
    pass


# Subgroup space

class ClosureExceedsBound(IRSLabError):
    """Raised when a normal closure grows past the caller's index bound."""
    pass


class NotNormal(IRSLabError):
    """Raised when a quotient is requested by a non-normal subgroup."""
    pass


class IndexOverflow(IRSLabError):
    """Raised when a fiber product exceeds the index bound."""
    pass


class Undecided(IRSLabError):
    """Raised when no rule decides a property; never guessed."""
    pass


# IRS

class NotInvariantMeasure(IRSLabError):
    """Raised when a finite action does not preserve its measure."""
    pass


class NotInvariant(IRSLabError):
    """Raised when an IRS fails conjugation invariance where it is required."""

    def __init__(self, message: str, witness=None):
        """
        Initialize NotInvariant.

        Args:
            message (str): Error message
            witness: Violation witness returned by the invariance check
        """
        details = {}
        if witness is not None:
            details['witness'] = witness
        super().__init__(message, details=details)
        self.witness = witness


# Spectral

class IncompleteTable(IRSLabError):
    """Raised when a coset table has undefined entries."""
    pass


class GraphTooSmall(IRSLabError):
    """Raised when l2_0 of a graph is empty."""
    pass


class NoConvergence(IRSLabError):
    """Raised when an iteration hits its cap."""

    def __init__(self, message: str, iterations: int = None, last_value: float = None):
        """
        Initialize NoConvergence.

        Args:
            message (str): Error message
            iterations (int): Number of iterations performed
            last_value (float): Last estimate before giving up
        """
        details = {}
        if iterations is not None:
            details['iterations'] = iterations
        if last_value is not None:
            details['last_value'] = last_value
        super().__init__(message, details=details)
        self.iterations = iterations
        self.last_value = last_value


# Tree groups

class DepthOutOfRange(IRSLabError):
    """Raised when a level index lies outside 0..depth."""
    pass


class NotACosetUnion(IRSLabError):
    """Raised when a set only partially covers some coset."""

    def __init__(self, message: str, witness=None):
        """
        Initialize NotACosetUnion.

        Args:
            message (str): Error message
            witness: Element whose coset is partially covered
        """
        super().__init__(message, details={'witness': witness} if witness is not None else None)
        self.witness = witness


class EmptySet(IRSLabError):
    """Raised when a Haar ratio involves an empty coset union."""
    pass


class RepNotInSubgroup(IRSLabError):
    """Raised when a Følner test element lies outside the subgroup."""
    pass


class MalformedCertificate(IRSLabError):
    """Raised when a Følner certificate cannot be interpreted."""
    pass


# Convex cone

class DimensionMismatch(IRSLabError):
    """Raised when vectors, matrices or bodies disagree in dimension."""
    pass


class LeavesUnitBall(IRSLabError):
    """Raised when a body would leave the closed unit ball."""
    pass


class EmptyMeasure(IRSLabError):
    """Raised when a body measure has no atoms."""
    pass


class NotContained(IRSLabError):
    """Raised when a body is not contained in the reference body."""
    pass


class NotOrthogonal(IRSLabError):
    """Raised when a matrix fails the exact orthogonality test."""
    pass


class AtomNotContained(IRSLabError):
    """Raised when an atom of a body measure leaves the reference body."""
    pass


# Configuration and I/O

class ConfigInvalid(IRSLabError):
    """Raised when an experiment config fails validation."""

    def __init__(self, message: str, field: str = None, errors: list = None):
        """
        Initialize ConfigInvalid.

        Args:
            message (str): Error message
            field (str): Dotted path of the first offending field
            errors (list): All validation messages
        """
        details = {}
        if field:
            details['field'] = field
        super().__init__(message, source=field, details=details)
        self.field = field
        self.errors = errors if errors is not None else []


class SerializationError(IRSLabError):
    """Raised when a text block cannot be parsed or written."""

    def __init__(self, message: str, source: str = None, line: int = None):
        """
        Initialize SerializationError.

        Args:
            message (str): Error message
            source (str): File the block came from (optional)
            line (int): 1-based line number of the problem (optional)
        """
        super().__init__(message, source=source,
                         details={'line': line} if line is not None else None)
        self.line = line


class ValidationError(IRSLabError):
    """Raised when data validation or an internal cross-check fails."""
    pass


def handle_exception(func):
    """
    Decorator to handle exceptions and convert them to IRSLabError.

    Args:
        func: Function to decorate

    Returns:
        Decorated function
    """
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except IRSLabError:
            raise
        except (FileNotFoundError, PermissionError) as e:
            raise IRSLabError(str(e), source=getattr(e, 'filename', None),
                              details={'original_error': type(e).__name__})
        except Exception as e:
            raise IRSLabError(
                f"Unexpected error in {func.__name__}: {str(e)}",
                details={'original_error': type(e).__name__, 'function': func.__name__}
            )
    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


def format_error_report(error: IRSLabError) -> str:
    """
    Format a comprehensive error report.

    Args:
        error (IRSLabError): Error to format

    Returns:
        str: Formatted error report
    """
    lines = [
        "=" * 60,
        "IRS-LAB ERROR REPORT",
        "=" * 60,
        f"Error Type: {type(error).__name__}",
        f"Message: {error.message}",
    ]

    if error.source:
        lines.append(f"Source: {error.source}")

    if error.details:
        lines.append("Details:")
        for key, value in error.details.items():
            lines.append(f"  {key}: {value}")

    lines.append("=" * 60)

    return "\n".join(lines)


CONFIGURATION_ERRORS = (
    ConfigInvalid,
    SerializationError,
    ValidationError,
)

COMPUTATION_LIMIT_ERRORS = (
    BallTooLarge,
    GroupTooLarge,
    ClosureExceedsBound,
    IndexOverflow,
    NoConvergence,
)

DECISION_ERRORS = (
    Undecided,
    Unsupported,
    UnsupportedSource,
)

ALL_IRS_LAB_ERRORS = (
    IRSLabError,
    UnknownGenerator,
    FamilyMismatch,
    BallTooLarge,
    NotAHomomorphism,
    UnsupportedSource,
    GroupTooLarge,
    Unsupported,
    ClosureExceedsBound,
    NotNormal,
    IndexOverflow,
    Undecided,
    NotInvariantMeasure,
    NotInvariant,
    IncompleteTable,
    GraphTooSmall,
    NoConvergence,
    DepthOutOfRange,
    NotACosetUnion,
    EmptySet,
    RepNotInSubgroup,
    MalformedCertificate,
    DimensionMismatch,
    LeavesUnitBall,
    EmptyMeasure,
    NotContained,
    NotOrthogonal,
    AtomNotContained,
    ConfigInvalid,
    SerializationError,
    ValidationError,
)
