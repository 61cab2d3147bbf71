"""Exception hierarchy shared by all surfcalc modules."""


class SurfcalcError(Exception):
    """Base class for every error raised by the library."""


class ContractViolation(SurfcalcError, ValueError):
    """A precondition of an operation was not met by the caller."""


class SingularMatrix(SurfcalcError, ArithmeticError):
    pass


class DegenerateChart(SurfcalcError, ArithmeticError):
    """The tangent vectors of a chart are (numerically) linearly dependent."""


class VanishingGradient(SurfcalcError, ArithmeticError):
    pass


class InvertedBounds(SurfcalcError, ValueError):
    """Lower bound of a graph-bounded region is not below the upper bound."""


class InterfaceEscapesVolume(SurfcalcError, ValueError):
    pass


class MissingExtension(SurfcalcError, ValueError):
    """A surface-only density was used where its normal derivative is needed."""


class ZeroJump(SurfcalcError, ArithmeticError):
    pass


class CFLViolation(SurfcalcError, ValueError):
    pass


class InterfaceLeavesDomain(SurfcalcError, ValueError):
    pass


class ConsistencyError(SurfcalcError, AssertionError):
    """Two independent evaluations of the same quantity disagree."""


class ConfigParse(SurfcalcError, ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(f"{where}{message}")


class UnknownCatalogEntry(SurfcalcError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown catalog entry"
