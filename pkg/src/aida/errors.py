"""Domain exceptions shared by the engine, store, service, and CLI."""

from __future__ import annotations


class AidaError(Exception):
    """Base error carrying a machine-readable code."""

    code = "error"

    def __init__(self, message: str, code: str | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return str(self)


class ValidationError(AidaError):
    code = "validation"


class NotFoundError(AidaError):
    code = "not-found"


class ConflictError(AidaError):
    code = "conflict"


class StoreError(AidaError):
    code = "store"
