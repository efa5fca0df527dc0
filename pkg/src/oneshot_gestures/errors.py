"""Exception hierarchy shared by every stage of the pipeline."""


class GestureError(ValueError):
    """Base class for all recoverable pipeline errors."""


class MissingTorso(GestureError):
    pass


class DegenerateExtent(GestureError):
    pass


class EmptyPath(GestureError):
    pass


class DegenerateShape(GestureError):
    pass


class EmptyImage(GestureError):
    pass


class DegenerateHull(GestureError):
    pass


class InvalidOrder(GestureError):
    pass


class DegenerateContour(GestureError):
    pass


class LengthMismatch(GestureError):
    pass


class DuplicateLabel(GestureError):
    pass


class ParseError(GestureError):
    """Malformed language or stream file.

    ``line`` and ``field`` are filled in when the location is known.
    """

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class VersionMismatch(GestureError):
    pass


class MissingSalient(GestureError):
    pass


class EmptyLanguage(GestureError):
    pass


class AllReferencesMissing(GestureError):
    pass


class UnknownLabel(GestureError):
    pass


class EmptyDataset(GestureError):
    pass


class OutOfOrder(GestureError):
    pass
