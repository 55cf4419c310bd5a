"""Exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class OOVError(Exception):
    """Base class for all errors raised by oovcover."""


class TextDecodeError(OOVError, ValueError):
    def __init__(self, offset: int, reason: str, source: str | None = None, line: int | None = None):
        self.offset = offset
        self.reason = reason
        self.source = source
        self.line = line
        where = f"byte offset {offset}"
        if line is not None:
            where = f"line {line}, {where}"
        if source is not None:
            where = f"{source}: {where}"
        super().__init__(f"invalid UTF-8 at {where}: {reason}")


class ModeMismatchError(OOVError, ValueError):
    def __init__(self, left, right):
        super().__init__(f"segmentation mode mismatch: {left} vs {right}")


class LineTooLongError(OOVError, ValueError):
    def __init__(self, source: str, line: int, length: int):
        self.source = source
        self.line = line
        super().__init__(f"{source}: line {line} is {length} bytes, limit is 1 MB")


class TableFormatError(OOVError, ValueError):
    pass


class ConfigError(OOVError, ValueError):
    pass


class DuplicateWordsError(OOVError, ValueError):
    def __init__(self, duplicates):
        self.duplicates = sorted(duplicates)
        super().__init__("duplicate words: " + ", ".join(self.duplicates))


class IncompleteQuotaError(OOVError):
    def __init__(self, shortfalls):
        self.shortfalls = shortfalls
        parts = [f"{cat} {status} {have}/{want}" for cat, status, have, want in shortfalls]
        super().__init__("quota incomplete: " + "; ".join(parts))


class MissingCategoryError(OOVError, KeyError):
    def __init__(self, category, context=""):
        self.category = category
        msg = f"missing category {category}"
        if context:
            msg += f" for {context}"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]
