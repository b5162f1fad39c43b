"""Exception types shared by all modules."""


class NcqsysError(Exception):
    pass


class BackendMismatch(NcqsysError):
    pass


class GeneratorContextMismatch(NcqsysError):
    pass


class NotAUnit(NcqsysError):
    pass


class SingularMatrix(NcqsysError):
    pass


class NonUnitConstantTerm(NcqsysError):
    pass


class InexactDivision(NcqsysError):
    pass


class NonInvertibleMinor(NcqsysError):
    def __init__(self, row, col, message=""):
        super().__init__(message or "minor pivot (%s, %s) not invertible" % (row, col))
        self.row = row
        self.col = col


class MissingSequenceIndex(NcqsysError):
    pass


class InvalidMutationSite(NcqsysError):
    pass


class NonInvertibleSum(NcqsysError):
    pass


class MissingData(NcqsysError):
    pass


class PatternMismatch(NcqsysError):
    pass


class ExplosionGuardExceeded(NcqsysError):
    pass


class WindowTooSmall(NcqsysError):
    pass


class CheckFailed(NcqsysError):
    """An exact identity check did not hold; carries both serialized sides."""

    def __init__(self, name, detail=""):
        super().__init__("%s: %s" % (name, detail) if detail else name)
        self.name = name
        self.detail = detail
