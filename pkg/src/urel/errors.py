"""Exception hierarchy shared by every urel module."""


class UrelError(Exception):
    """Base class for all errors raised by urel."""


class SchemaError(UrelError):
    pass


class UnknownRelation(SchemaError):
    pass


class UnknownAttribute(SchemaError):
    pass


class AmbiguousAttribute(SchemaError):
    pass


class ValueTypeError(UrelError):
    """Two values with different type tags were compared."""


class InvalidWorldTable(UrelError):
    pass


class ConflictingAssignment(UrelError):
    def __init__(self, var, left, right):
        super().__init__(f"variable {var!r} assigned both {left!r} and {right!r}")
        self.var = var


class NotProbabilistic(UrelError):
    pass


class WorldLimitExceeded(UrelError):
    pass


class OutputGuardExceeded(UrelError):
    pass


class QuerySyntaxError(UrelError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class QueryError(UrelError):
    """A query is well-formed text but not a supported positive RA query."""


class MergeOriginError(UrelError):
    pass


class AliasingError(UrelError):
    pass


class NotReduced(UrelError):
    pass


class NotNormalized(UrelError):
    pass


class NotTupleLevel(UrelError):
    pass


class StorageError(UrelError):
    pass


class ParameterError(UrelError):
    pass
