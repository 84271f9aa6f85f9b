class RecipNetException(Exception):
    pass


class RecipNetUsageError(RecipNetException):
    pass


class RecipNetDataFormatError(RecipNetUsageError):

    def __init__(self, msg, line_number=None, path=None):
        if line_number is not None:
            msg = "{} (line {}{})".format(
                msg, line_number,
                " of '{}'".format(path) if path is not None else '')
        super(RecipNetDataFormatError, self).__init__(msg)
        self.line_number = line_number
        self.path = path


class RecipNetRuntimeError(RecipNetException):
    pass


class RecipNetDimensionError(ValueError, RecipNetRuntimeError):

    def __init__(self, msg, *shapes):
        if shapes:
            msg = "{}: {}".format(
                msg, ' vs '.join(str(tuple(s)) for s in shapes))
        super(RecipNetDimensionError, self).__init__(msg)
        self.shapes = tuple(tuple(s) for s in shapes)


class RecipNetDomainError(ValueError, RecipNetRuntimeError):
    pass


class RecipNetNumericError(ArithmeticError, RecipNetRuntimeError):
    pass


class TrainingDivergedError(RecipNetNumericError):
    pass


class RecipNetIndexError(IndexError, RecipNetRuntimeError):
    pass


class RecipNetCheckpointError(RecipNetRuntimeError):
    pass


class CheckpointCorruptError(RecipNetCheckpointError):
    pass


class CheckpointVersionError(RecipNetCheckpointError):

    def __init__(self, found, expected):
        super(CheckpointVersionError, self).__init__(
            "Checkpoint format version {} cannot be read by this reader "
            "(version {}) and no migration is registered"
            .format(found, expected))
        self.found = found
        self.expected = expected


class CheckpointShapeError(RecipNetCheckpointError):
    pass
