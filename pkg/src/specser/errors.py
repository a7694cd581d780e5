"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SeriationError(Exception):
    """Base class for every error raised by this package."""


class StructureError(SeriationError, ValueError):
    """A PQ-tree node violates an arity or labelling rule."""


class TreeFormatError(SeriationError, ValueError):
    """A serialized tree could not be decoded.

    ``position`` is a character offset for JSON syntax errors, or a
    JSONPath-like location (``$.children[2]``) for schema errors.
    """

    def __init__(self, message: str, position: int | str | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class PathError(SeriationError, IndexError):
    """A node path or unit index does not address anything."""


class PermutationLimitError(SeriationError):
    """Enumeration refused because the tree encodes too many permutations."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"tree encodes {count} permutations, cap is {cap}")


class DimensionError(SeriationError, ValueError):
    """Matrix or permutation sizes are incompatible."""


class SymmetryError(SeriationError, ValueError):
    """A matrix expected to be symmetric is not."""


class ReducibilityError(SeriationError):
    """The Laplacian has more than one (numerically) zero eigenvalue."""

    def __init__(self, zero_multiplicity: int):
        self.zero_multiplicity = zero_multiplicity
        super().__init__(
            f"graph is disconnected: zero eigenvalue has multiplicity {zero_multiplicity}"
        )


class ConvergenceError(SeriationError):
    """The iterative eigensolver did not reach the requested residual."""

    def __init__(self, message: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{message} after {iterations} iterations")


class SortError(SeriationError):
    """A failure inside the recursive sort, tagged with the unit set being processed."""

    def __init__(self, units, cause: Exception):
        self.units = tuple(int(u) for u in units)
        self.cause = cause
        shown = list(self.units[:10])
        more = "" if len(self.units) <= 10 else f", ... ({len(self.units)} units)"
        super().__init__(f"{cause} [while sorting units {shown}{more}]")


class MatrixFormatError(SeriationError, ValueError):
    """A matrix file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")
