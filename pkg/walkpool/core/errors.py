# walkpool/core/errors.py
from typing import Iterable, Optional


class WalkPoolError(Exception):
    """Base class for every error raised by the toolkit"""
    pass


class InputError(WalkPoolError, ValueError):
    """Bad user data or arguments (CLI exit code 2)"""
    pass


class ParseError(InputError):
    """File syntax error with the offending line"""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class ConfigError(InputError):
    """Invalid configuration keys or values"""

    def __init__(self, message: str, keys: Optional[Iterable[str]] = None):
        self.keys = sorted(set(keys or ()))
        if self.keys:
            message = f"{message} (keys: {', '.join(self.keys)})"
        super().__init__(message)


class SplitValidationError(InputError):
    pass


class LoadError(InputError):
    pass


class SamplingError(InputError):
    """Not enough non-edges to draw the requested negatives"""
    pass


class ShapeError(InputError):
    def __init__(self, op: str, *shapes):
        self.op = op
        self.shapes = shapes
        rendered = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


class ConvergenceError(WalkPoolError):
    pass


class CheckpointError(WalkPoolError):
    pass
