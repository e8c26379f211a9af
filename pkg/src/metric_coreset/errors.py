"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """A precondition on an argument was violated."""


class ResourceLimit(RuntimeError):
    """An exhaustive computation would exceed its configured cap."""


class DatasetError(InvalidArgument):
    """A dataset or serialized artifact could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class RoundFailure(RuntimeError):
    """A worker failed inside a simulated round."""

    def __init__(self, round_index, partition, cause):
        self.round_index = round_index
        self.partition = partition
        self.cause = cause
        super().__init__(f"round {round_index}, partition {partition}: {cause!r}")
