"""Exception hierarchy shared by all modules.

Every error carries a stable machine-readable ``code`` so the CLI, the
HTTP service, and tests can dispatch on it without parsing messages.
"""

from __future__ import annotations

__all__ = ["FormationKitError", "EditError", "AnalysisError", "AssessmentError", "PersistenceError"]


class FormationKitError(Exception):
    def __init__(self, code: str, message: str, location: str | None = None):
        super().__init__(message)
        self.code = code
        self.location = location

    def __str__(self):
        base = f"{self.code}: {self.args[0]}"
        return f"{base} (at {self.location})" if self.location else base


class EditError(FormationKitError):
    """An editing operation was rejected; the choreography is unchanged."""


class AnalysisError(FormationKitError):
    """A geometry or analytics query received invalid input."""


class AssessmentError(FormationKitError):
    """Track parsing, homography estimation, or deviation math failed."""


class PersistenceError(FormationKitError):
    """A document could not be serialized or deserialized."""
